//! Compiles and runs a real C client against the generated header and the
//! static library, proving the ABI end to end. Skips (with a note) when no
//! C compiler is available.

use std::path::PathBuf;
use std::process::Command;

const C_CLIENT: &str = r#"
#include <stdio.h>
#include <math.h>
#include "netprox.h"

int main(void) {
    NpGraph *g = np_graph_new();
    if (np_graph_add_node(g, 1, 1) != NP_STATUS_OK) return 10;
    if (np_graph_add_node(g, 2, 1) != NP_STATUS_OK) return 11;

    double zero = 0.0, shift = -3.0;
    double lo = -INFINITY, hi = 0.0;
    if (np_node_add_sum_squares(g, 1, 1.0, &zero, 1) != NP_STATUS_OK) return 12;
    if (np_node_set_box(g, 1, &lo, 1, &hi, 1) != NP_STATUS_OK) return 13;
    if (np_node_add_norm1(g, 2, 1.0, &shift, 1) != NP_STATUS_OK) return 14;
    if (np_graph_add_edge(g, 1, 2) != NP_STATUS_OK) return 15;
    if (np_edge_set_sq_diff(g, 1, 2, 1.0) != NP_STATUS_OK) return 16;

    NpSolveOptions options = np_solve_options_default();
    NpResult *result = NULL;
    if (np_solve(g, &options, &result) != NP_STATUS_OK) {
        char msg[256];
        np_last_error_message(msg, sizeof msg);
        fprintf(stderr, "solve failed: %s\n", msg);
        return 17;
    }
    if (!np_result_converged(result)) return 18;

    double x1, x2;
    if (np_result_node_value(result, 1, &x1, 1) != NP_STATUS_OK) return 19;
    if (np_result_node_value(result, 2, &x2, 1) != NP_STATUS_OK) return 20;
    if (fabs(x1 + 0.5) > 1e-3 || fabs(x2 + 1.0) > 1e-3) return 21;

    printf("x1=%.4f x2=%.4f objective=%.4f\n", x1, x2, np_result_objective(result));
    np_result_free(result);
    np_graph_free(g);
    return 0;
}
"#;

#[test]
fn c_client_links_and_solves() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include_dir = manifest.join("include");

    // The static library lands next to this test's own artifacts.
    let mut lib_dir = PathBuf::from(std::env::current_exe().unwrap());
    lib_dir.pop(); // test binary
    if lib_dir.ends_with("deps") {
        lib_dir.pop();
    }
    let static_lib = lib_dir.join("libnetprox_ffi.a");
    assert!(
        static_lib.exists(),
        "static library not found at {}",
        static_lib.display()
    );

    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler (`{cc}`) available");
        return;
    }

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let bin = dir.path().join("client");
    std::fs::write(&src, C_CLIENT).unwrap();

    let compile = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include_dir)
        .arg(static_lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&bin).output().unwrap();
    assert_eq!(
        run.status.code(),
        Some(0),
        "client exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("objective=2.5"), "stdout: {stdout}");
}
