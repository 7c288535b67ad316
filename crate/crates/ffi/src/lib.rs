//! C ABI for the netprox solver: opaque handles, integer status codes, and
//! a thread-local last-error message.
//!
//! Every function tolerates null handles (reporting
//! `NP_STATUS_NULL_ARGUMENT` or returning a neutral value). Pointer/length
//! pairs must describe valid readable or writable memory. Handles are
//! created and freed exclusively through this API.
//!
//! The generated header lives at `include/netprox.h`.

use std::cell::RefCell;
use std::ffi::CStr;
use std::os::raw::c_char;
use std::path::Path;
use std::sync::Arc;

use netprox::io::load_problem;
use netprox::solver::{solve, RhoPolicy, SolveOptions, SolveResult, SolveStatus, StoppingCriteria};
use netprox::{BoxConstraint, EdgeAtom, EdgeSpec, Error, NodeAtom, NodeSpec, ProblemGraph};

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn record_error(message: String) {
    LAST_ERROR.with(|slot| {
        let mut bytes = message.into_bytes();
        bytes.retain(|&b| b != 0);
        bytes.push(0);
        *slot.borrow_mut() = bytes;
    });
}

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    GraphError = 4,
    Unsupported = 5,
    InvalidArgument = 6,
    IoError = 7,
}

fn status_of(e: &Error) -> NpStatus {
    match e {
        Error::SyntaxError { .. }
        | Error::UnknownAtom(_)
        | Error::DuplicateBox
        | Error::ParseError { .. } => NpStatus::ParseError,
        Error::DuplicateNode(_)
        | Error::UnknownNode(_)
        | Error::UnknownEndpoint(_)
        | Error::DuplicateEdge(..)
        | Error::UnknownEdge(..)
        | Error::SelfLoop(_)
        | Error::DimensionMismatch(_)
        | Error::InvalidBox(_)
        | Error::InvalidAtom(_)
        | Error::NegativeWeight { .. }
        | Error::MissingColumn(_)
        | Error::RowDimensionMismatch(_) => NpStatus::GraphError,
        Error::UnsupportedComposite(_) | Error::UnboundedObjective(_) => NpStatus::Unsupported,
        Error::InvalidRho(_)
        | Error::WarmStartDimMismatch { .. }
        | Error::InvalidArgument(_)
        | Error::NotQuadratic(_)
        | Error::SingularSystem(_)
        | Error::OddNodeCount(_) => NpStatus::InvalidArgument,
        Error::Io(_) => NpStatus::IoError,
    }
}

fn fail(e: Error) -> NpStatus {
    let status = status_of(&e);
    record_error(e.to_string());
    status
}

fn fail_null(what: &str) -> NpStatus {
    record_error(format!("null argument: {what}"));
    NpStatus::NullArgument
}

/// Opaque problem handle.
pub struct NpGraph {
    inner: ProblemGraph,
}

/// Opaque solve-result handle.
pub struct NpResult {
    inner: SolveResult,
}

/// Penalty adaptation selector for [`NpSolveOptions`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NpRhoPolicy {
    Fixed = 0,
    ResidualBalance = 1,
}

/// Optional user hook deciding the next penalty from
/// `(iter, rho, primal_norm, dual_norm)`. Takes precedence over
/// `rho_policy` when non-null. Must return a positive finite value.
pub type NpRhoCallback =
    Option<unsafe extern "C" fn(iter: usize, rho: f64, primal: f64, dual: f64) -> f64>;

/// Solver settings; obtain defaults from [`np_solve_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct NpSolveOptions {
    pub rho: f64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iters: usize,
    pub rho_policy: NpRhoPolicy,
    pub mu: f64,
    pub tau_incr: f64,
    pub tau_decr: f64,
    /// Worker threads; 0 uses all cores.
    pub threads: usize,
    /// Print one residual line per iteration to stdout.
    pub verbose: bool,
    pub rho_callback: NpRhoCallback,
}

/// Copies the most recent error message (NUL-terminated) into `buf` and
/// returns the full length in bytes including the terminator. When the
/// buffer is too small the message is truncated; call with a null buffer
/// to query the required size.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null.
#[no_mangle]
pub unsafe extern "C" fn np_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let bytes = slot.borrow();
        if bytes.is_empty() {
            if !buf.is_null() && cap > 0 {
                *buf = 0;
            }
            return 1;
        }
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Creates an empty problem graph. Free with [`np_graph_free`].
#[no_mangle]
pub extern "C" fn np_graph_new() -> *mut NpGraph {
    Box::into_raw(Box::new(NpGraph {
        inner: ProblemGraph::new(),
    }))
}

/// # Safety
/// `graph` must be null or a handle from this API that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn np_graph_free(graph: *mut NpGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

/// Adds a node with the given variable dimension and an empty objective.
///
/// # Safety
/// `graph` must be a live handle from this API.
#[no_mangle]
pub unsafe extern "C" fn np_graph_add_node(graph: *mut NpGraph, id: u64, dim: usize) -> NpStatus {
    let Some(g) = graph.as_mut() else {
        return fail_null("graph");
    };
    match g.inner.add_node(NodeSpec::new(id, dim)) {
        Ok(()) => NpStatus::Ok,
        Err(e) => fail(e),
    }
}

unsafe fn add_atom(
    graph: *mut NpGraph,
    id: u64,
    params: *const f64,
    len: usize,
    build: impl FnOnce(Vec<f64>) -> NodeAtom,
) -> NpStatus {
    let Some(g) = graph.as_mut() else {
        return fail_null("graph");
    };
    let Some(p) = slice_arg(params, len) else {
        return fail_null("parameter vector");
    };
    match g.inner.add_node_atom(id, build(p.to_vec())) {
        Ok(()) => NpStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Appends `weight * ||x - shift||_2^2` to a node objective. `shift` has
/// length `shift_len` (the node dimension, or 1 to broadcast).
///
/// # Safety
/// `graph` must be a live handle; `shift` must point to `shift_len` f64s.
#[no_mangle]
pub unsafe extern "C" fn np_node_add_sum_squares(
    graph: *mut NpGraph,
    id: u64,
    weight: f64,
    shift: *const f64,
    shift_len: usize,
) -> NpStatus {
    add_atom(graph, id, shift, shift_len, |p| {
        NodeAtom::sum_squares(weight, p)
    })
}

/// Appends `weight * ||x - shift||_1`.
///
/// # Safety
/// As for [`np_node_add_sum_squares`].
#[no_mangle]
pub unsafe extern "C" fn np_node_add_norm1(
    graph: *mut NpGraph,
    id: u64,
    weight: f64,
    shift: *const f64,
    shift_len: usize,
) -> NpStatus {
    add_atom(graph, id, shift, shift_len, |p| NodeAtom::norm1(weight, p))
}

/// Appends `weight * ||x - shift||_2`.
///
/// # Safety
/// As for [`np_node_add_sum_squares`].
#[no_mangle]
pub unsafe extern "C" fn np_node_add_norm2(
    graph: *mut NpGraph,
    id: u64,
    weight: f64,
    shift: *const f64,
    shift_len: usize,
) -> NpStatus {
    add_atom(graph, id, shift, shift_len, |p| NodeAtom::norm2(weight, p))
}

/// Appends a Huber penalty with the given threshold about `shift`.
///
/// # Safety
/// As for [`np_node_add_sum_squares`].
#[no_mangle]
pub unsafe extern "C" fn np_node_add_huber(
    graph: *mut NpGraph,
    id: u64,
    weight: f64,
    shift: *const f64,
    shift_len: usize,
    threshold: f64,
) -> NpStatus {
    add_atom(graph, id, shift, shift_len, |p| {
        NodeAtom::huber(weight, p, threshold)
    })
}

/// Appends the linear term `weight * slope' x`.
///
/// # Safety
/// As for [`np_node_add_sum_squares`].
#[no_mangle]
pub unsafe extern "C" fn np_node_add_linear(
    graph: *mut NpGraph,
    id: u64,
    weight: f64,
    slope: *const f64,
    slope_len: usize,
) -> NpStatus {
    add_atom(graph, id, slope, slope_len, |p| NodeAtom::linear(weight, p))
}

/// Sets elementwise bounds on a node variable (entries may be infinite;
/// lengths are the node dimension or 1 to broadcast).
///
/// # Safety
/// `graph` must be a live handle; the bound pointers must be readable for
/// their stated lengths.
#[no_mangle]
pub unsafe extern "C" fn np_node_set_box(
    graph: *mut NpGraph,
    id: u64,
    lower: *const f64,
    lower_len: usize,
    upper: *const f64,
    upper_len: usize,
) -> NpStatus {
    let Some(g) = graph.as_mut() else {
        return fail_null("graph");
    };
    let (Some(lo), Some(hi)) = (slice_arg(lower, lower_len), slice_arg(upper, upper_len)) else {
        return fail_null("bound vector");
    };
    match g
        .inner
        .set_node_bound(id, BoxConstraint::new(lo.to_vec(), hi.to_vec()))
    {
        Ok(()) => NpStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Adds an undirected edge with an empty (zero) objective.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_graph_add_edge(graph: *mut NpGraph, a: u64, b: u64) -> NpStatus {
    let Some(g) = graph.as_mut() else {
        return fail_null("graph");
    };
    match g.inner.add_edge(EdgeSpec::new(a, b, Vec::new())) {
        Ok(()) => NpStatus::Ok,
        Err(e) => fail(e),
    }
}

unsafe fn add_edge_atom(graph: *mut NpGraph, a: u64, b: u64, atom: EdgeAtom) -> NpStatus {
    let Some(g) = graph.as_mut() else {
        return fail_null("graph");
    };
    match g.inner.add_edge_atom(a, b, atom) {
        Ok(()) => NpStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Appends `weight * ||x_a - x_b||_2^2` to an existing edge.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_edge_set_sq_diff(
    graph: *mut NpGraph,
    a: u64,
    b: u64,
    weight: f64,
) -> NpStatus {
    add_edge_atom(graph, a, b, EdgeAtom::sq_diff(weight))
}

/// Appends the network-lasso penalty `weight * ||x_a - x_b||_2`.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_edge_set_netlasso(
    graph: *mut NpGraph,
    a: u64,
    b: u64,
    weight: f64,
) -> NpStatus {
    add_edge_atom(graph, a, b, EdgeAtom::netlasso(weight))
}

/// Appends `weight * ||x_a - x_b||_1`.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_edge_set_abs_diff(
    graph: *mut NpGraph,
    a: u64,
    b: u64,
    weight: f64,
) -> NpStatus {
    add_edge_atom(graph, a, b, EdgeAtom::abs_diff(weight))
}

/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_graph_node_count(graph: *const NpGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.node_count())
}

/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_graph_edge_count(graph: *const NpGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// Total stacked variable dimension.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_graph_total_dim(graph: *const NpGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.total_dim())
}

unsafe fn cstr_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, NpStatus> {
    if ptr.is_null() {
        return Err(fail_null(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        record_error(format!("{what} is not valid UTF-8"));
        NpStatus::InvalidUtf8
    })
}

/// Builds a problem from an edge-list file, a node-data CSV, objective
/// templates, and an optional edge-data CSV (`edge_data_path` may be null).
/// On success writes a new handle to `out`.
///
/// # Safety
/// The path and template arguments must be NUL-terminated strings (or null
/// where documented); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn np_graph_load(
    graph_path: *const c_char,
    node_data_path: *const c_char,
    node_template: *const c_char,
    edge_template: *const c_char,
    edge_data_path: *const c_char,
    out: *mut *mut NpGraph,
) -> NpStatus {
    if out.is_null() {
        return fail_null("out");
    }
    let graph_path = match cstr_arg(graph_path, "graph_path") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let node_data_path = match cstr_arg(node_data_path, "node_data_path") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let node_template = match cstr_arg(node_template, "node_template") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let edge_template = match cstr_arg(edge_template, "edge_template") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let edge_data = if edge_data_path.is_null() {
        None
    } else {
        match cstr_arg(edge_data_path, "edge_data_path") {
            Ok(s) => Some(s.to_string()),
            Err(status) => return status,
        }
    };
    match load_problem(
        Path::new(graph_path),
        Path::new(node_data_path),
        node_template,
        edge_template,
        edge_data.as_deref().map(Path::new),
    ) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(NpGraph { inner }));
            NpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Default solver settings (rho 1, eps_abs 1e-4, eps_rel 1e-3, 1000
/// iterations, fixed penalty, all cores).
#[no_mangle]
pub extern "C" fn np_solve_options_default() -> NpSolveOptions {
    NpSolveOptions {
        rho: 1.0,
        eps_abs: 1e-4,
        eps_rel: 1e-3,
        max_iters: 1000,
        rho_policy: NpRhoPolicy::Fixed,
        mu: 10.0,
        tau_incr: 2.0,
        tau_decr: 2.0,
        threads: 0,
        verbose: false,
        rho_callback: None,
    }
}

/// Runs the solver. `options` may be null for defaults. On success writes a
/// result handle to `out`; free it with [`np_result_free`].
///
/// # Safety
/// `graph` must be a live handle, `options` null or valid, `out` a valid
/// pointer. A non-null `rho_callback` must be callable for the duration of
/// the solve.
#[no_mangle]
pub unsafe extern "C" fn np_solve(
    graph: *const NpGraph,
    options: *const NpSolveOptions,
    out: *mut *mut NpResult,
) -> NpStatus {
    let Some(g) = graph.as_ref() else {
        return fail_null("graph");
    };
    if out.is_null() {
        return fail_null("out");
    }
    let opts = options
        .as_ref()
        .copied()
        .unwrap_or_else(|| np_solve_options_default());
    let policy = match opts.rho_callback {
        Some(cb) => RhoPolicy::Custom(Arc::new(move |iter, rho, primal, dual| unsafe {
            cb(iter, rho, primal, dual)
        })),
        None => match opts.rho_policy {
            NpRhoPolicy::Fixed => RhoPolicy::Fixed,
            NpRhoPolicy::ResidualBalance => RhoPolicy::ResidualBalance {
                mu: opts.mu,
                tau_incr: opts.tau_incr,
                tau_decr: opts.tau_decr,
            },
        },
    };
    let solve_options = SolveOptions {
        criteria: StoppingCriteria {
            eps_abs: opts.eps_abs,
            eps_rel: opts.eps_rel,
            max_iters: opts.max_iters,
        },
        rho: opts.rho,
        policy,
        threads: (opts.threads > 0).then_some(opts.threads),
        verbose: opts.verbose,
        warm_start: None,
    };
    match solve(&g.inner, &solve_options) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(NpResult { inner }));
            NpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `result` must be null or a handle from [`np_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn np_result_free(result: *mut NpResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// True when the solve stopped on the residual certificates (rather than
/// the iteration cap).
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_result_converged(result: *const NpResult) -> bool {
    result
        .as_ref()
        .is_some_and(|r| r.inner.status == SolveStatus::Converged)
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_result_iterations(result: *const NpResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.iters)
}

/// Objective value at the returned solution (NaN for a null handle).
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_result_objective(result: *const NpResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.inner.objective)
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_result_node_count(result: *const NpResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.x.len())
}

/// Node id at `index` in ascending id order; `UINT64_MAX` out of range.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_result_node_id(result: *const NpResult, index: usize) -> u64 {
    result
        .as_ref()
        .and_then(|r| r.inner.x.keys().nth(index))
        .map_or(u64::MAX, |id| id.0)
}

/// Variable dimension of a node (0 when the node is unknown).
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_result_node_dim(result: *const NpResult, id: u64) -> usize {
    result
        .as_ref()
        .and_then(|r| r.inner.x.get(&id.into()))
        .map_or(0, Vec::len)
}

/// Copies a node's solved values into `out` (capacity must be at least the
/// node dimension).
///
/// # Safety
/// `result` must be a live handle; `out` must point to `cap` writable f64s.
#[no_mangle]
pub unsafe extern "C" fn np_result_node_value(
    result: *const NpResult,
    id: u64,
    out: *mut f64,
    cap: usize,
) -> NpStatus {
    let Some(r) = result.as_ref() else {
        return fail_null("result");
    };
    if out.is_null() {
        return fail_null("out");
    }
    let Some(values) = r.inner.x.get(&id.into()) else {
        return fail(Error::UnknownNode(id.into()));
    };
    if cap < values.len() {
        record_error(format!(
            "buffer holds {cap} values, node {id} has dimension {}",
            values.len()
        ));
        return NpStatus::InvalidArgument;
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    NpStatus::Ok
}

/// Final residual norms and thresholds (all zero when the solve converged
/// at iteration zero). Null output pointers are skipped.
///
/// # Safety
/// `result` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn np_result_final_residuals(
    result: *const NpResult,
    primal_norm: *mut f64,
    dual_norm: *mut f64,
    eps_pri: *mut f64,
    eps_dual: *mut f64,
) -> NpStatus {
    let Some(r) = result.as_ref() else {
        return fail_null("result");
    };
    let last = r.inner.history.last();
    let write = |ptr: *mut f64, v: f64| {
        if !ptr.is_null() {
            *ptr = v;
        }
    };
    write(primal_norm, last.map_or(0.0, |h| h.primal_norm));
    write(dual_norm, last.map_or(0.0, |h| h.dual_norm));
    write(eps_pri, last.map_or(0.0, |h| h.eps_pri));
    write(eps_dual, last.map_or(0.0, |h| h.eps_dual));
    NpStatus::Ok
}

/// Penalty parameter during the final iteration (NaN when no iterations
/// ran or the handle is null).
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn np_result_final_rho(result: *const NpResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| {
        r.inner.history.last().map_or(f64::NAN, |h| h.rho)
    })
}

/// Bulk copy of the full solution: node ids into `ids` and all values,
/// concatenated in ascending id order, into `values`. Returns the node
/// count; nothing is written unless both capacities suffice (query sizes
/// with null pointers, using [`np_graph_total_dim`] for the value count).
///
/// # Safety
/// `result` must be null or a live handle; non-null out pointers must be
/// writable for their stated capacities.
#[no_mangle]
pub unsafe extern "C" fn np_result_copy_all(
    result: *const NpResult,
    ids: *mut u64,
    ids_cap: usize,
    values: *mut f64,
    values_cap: usize,
) -> usize {
    let Some(r) = result.as_ref() else {
        return 0;
    };
    let total: usize = r.inner.x.values().map(Vec::len).sum();
    if !ids.is_null() && !values.is_null() && ids_cap >= r.inner.x.len() && values_cap >= total {
        let mut offset = 0usize;
        for (i, (id, x)) in r.inner.x.iter().enumerate() {
            *ids.add(i) = id.0;
            std::ptr::copy_nonoverlapping(x.as_ptr(), values.add(offset), x.len());
            offset += x.len();
        }
    }
    r.inner.x.len()
}
