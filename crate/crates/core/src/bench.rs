//! Seeded benchmark harness: random 3-regular instances with Huber node
//! penalties and network-lasso couplings, for measuring how solve time
//! scales with problem size.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dsl::{parse_edge_template, parse_node_template, ColumnValue};
use crate::error::{Error, Result};
use crate::graph::{EdgeSpec, NodeDataRow, NodeDataTable, NodeId, ProblemGraph};
use crate::solver::{solve, SolveOptions, SolveStatus};

/// Samples a uniform random 3-regular graph by the pairing model: three
/// stubs per node, a random perfect matching of stubs, resampled until it
/// has no self-loops or repeated pairs. Requires an even node count >= 4.
pub fn random_3_regular(nodes: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(NodeId, NodeId)>> {
    if nodes < 4 || nodes % 2 != 0 {
        return Err(Error::OddNodeCount(nodes));
    }
    'attempt: for _ in 0..1000 {
        let mut stubs: Vec<u64> = (0..nodes as u64).flat_map(|i| [i, i, i]).collect();
        stubs.shuffle(rng);
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(3 * nodes / 2);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b {
                continue 'attempt;
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                continue 'attempt;
            }
            edges.push((NodeId(key.0), NodeId(key.1)));
        }
        edges.sort();
        return Ok(edges);
    }
    // The acceptance probability of a pairing sample is bounded away from
    // zero (about e^-2 for degree 3), so 1000 attempts never fail in
    // practice.
    Err(Error::InvalidArgument(format!(
        "failed to sample a simple 3-regular graph on {nodes} nodes"
    )))
}

/// Builds the benchmark instance for a seed: a 3-regular graph, node data
/// a_i uniform in [-10, 10]^dim with objective `huber(x - a, 1.0)`, and
/// `netlasso(0.1)` on every edge.
pub fn benchmark_instance(nodes: usize, dim: usize, seed: u64) -> Result<ProblemGraph> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dim must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_3_regular(nodes, &mut rng)?;

    let node_template = parse_node_template("huber(x - a, 1.0)")?;
    let edge_template = parse_edge_template("netlasso(0.1)")?;

    let mut table = NodeDataTable::new();
    for i in 0..nodes as u64 {
        let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let mut bindings = std::collections::BTreeMap::new();
        bindings.insert("a".to_string(), ColumnValue::Vector(a));
        table.push(NodeDataRow {
            id: NodeId(i),
            bindings,
        })?;
    }

    let mut graph = ProblemGraph::new();
    graph.add_node_objectives(&node_template, &table)?;
    for (a, b) in edges {
        graph.add_edge(EdgeSpec::new(a, b, Vec::new()))?;
    }
    graph.add_edge_objectives(&edge_template, None)?;
    Ok(graph)
}

#[derive(Clone, Debug)]
pub struct BenchmarkReport {
    pub nodes: usize,
    pub dim: usize,
    pub unknowns: usize,
    pub edges: usize,
    pub status: SolveStatus,
    pub iters: usize,
    pub wall_seconds: f64,
    pub objective: f64,
}

impl fmt::Display for BenchmarkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes = {}", self.nodes)?;
        writeln!(f, "dim = {}", self.dim)?;
        writeln!(f, "unknowns = {}", self.unknowns)?;
        writeln!(f, "edges = {}", self.edges)?;
        writeln!(f, "status = {}", self.status)?;
        writeln!(f, "iters = {}", self.iters)?;
        writeln!(f, "wall_seconds = {:.3}", self.wall_seconds)?;
        write!(f, "objective = {:.6e}", self.objective)
    }
}

/// Generates the seeded instance, solves it at default tolerances, and
/// reports size, iterations, and wall time.
pub fn run_benchmark(
    nodes: usize,
    dim: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<BenchmarkReport> {
    let graph = benchmark_instance(nodes, dim, seed)?;
    let options = SolveOptions {
        threads,
        ..Default::default()
    };
    // Untimed warmup so pool spawning and first-touch page faults do not
    // pollute the scaling measurement.
    solve(&graph, &options)?;
    let start = Instant::now();
    let result = solve(&graph, &options)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    Ok(BenchmarkReport {
        nodes,
        dim,
        unknowns: nodes * dim,
        edges: graph.edge_count(),
        status: result.status,
        iters: result.iters,
        wall_seconds,
        objective: result.objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_regular_has_degree_three_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let edges = random_3_regular(20, &mut rng).unwrap();
        assert_eq!(edges.len(), 30);
        let mut degree = vec![0usize; 20];
        for (a, b) in &edges {
            degree[a.0 as usize] += 1;
            degree[b.0 as usize] += 1;
        }
        assert!(degree.iter().all(|&d| d == 3));
    }

    #[test]
    fn odd_or_tiny_node_counts_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            random_3_regular(5, &mut rng),
            Err(Error::OddNodeCount(5))
        ));
        assert!(matches!(
            random_3_regular(2, &mut rng),
            Err(Error::OddNodeCount(2))
        ));
    }

    #[test]
    fn smallest_instance_is_k4() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let edges = random_3_regular(4, &mut rng).unwrap();
        assert_eq!(edges.len(), 6);
    }

    #[test]
    fn same_seed_same_instance() {
        let a = benchmark_instance(16, 2, 123).unwrap();
        let b = benchmark_instance(16, 2, 123).unwrap();
        assert_eq!(a, b);
        let c = benchmark_instance(16, 2, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn small_benchmark_converges() {
        let report = run_benchmark(16, 2, 9, Some(2)).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert_eq!(report.unknowns, 32);
        assert_eq!(report.edges, 24);
        assert!(report.iters > 0);
    }
}
