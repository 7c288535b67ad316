//! netprox solves convex optimization problems defined on undirected graphs,
//! where every node and edge contributes a convex cost over shared node
//! variables:
//!
//! ```text
//! minimize  sum_i f_i(x_i)  +  sum_(j,k) g_jk(x_j, x_k)
//! ```
//!
//! Node objectives are sums of catalog atoms (quadratics, l1/l2 norms, Huber,
//! linear terms) with optional box constraints; edge objectives couple
//! neighboring variables through difference penalties (squared difference,
//! network lasso, absolute difference). The solver splits the problem with
//! ADMM: every node and every edge owns a small subproblem with a closed-form
//! prox, and small messages flow over the edges until the primal and dual
//! residual certificates pass.
//!
//! # Quick start
//!
//! ```
//! use netprox::{
//!     solve, BoxConstraint, EdgeAtom, EdgeSpec, NodeAtom, NodeSpec, ProblemGraph,
//!     SolveOptions,
//! };
//!
//! // min x1^2 (x1 <= 0)  +  |x2 + 3|  +  ||x1 - x2||^2
//! let mut g = ProblemGraph::new();
//! g.add_node(
//!     NodeSpec::new(1, 1)
//!         .with_objective(vec![NodeAtom::square()])
//!         .with_bound(BoxConstraint::scalar(f64::NEG_INFINITY, 0.0)),
//! )
//! .unwrap();
//! g.add_node(NodeSpec::new(2, 1).with_objective(vec![NodeAtom::abs(3.0)]))
//!     .unwrap();
//! g.add_edge(EdgeSpec::new(1, 2, vec![EdgeAtom::sq_diff(1.0)]))
//!     .unwrap();
//!
//! let result = solve(&g, &SolveOptions::default()).unwrap();
//! assert!((result.x[&1.into()][0] + 0.5).abs() < 1e-3);
//! assert!((result.x[&2.into()][0] + 1.0).abs() < 1e-3);
//! ```
//!
//! Bulk construction from objective templates plus data tables, the text
//! file formats, and the command-line front end live in [`dsl`] and [`io`];
//! brute-force reference solvers used by the test suite live in [`oracle`].

pub mod atom;
pub mod bench;
pub mod dsl;
pub mod error;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod solver;

pub use atom::{
    argmin_node, edge_prox, eval_edge_objective, eval_node_objective, prox_node, BoxConstraint,
    EdgeAtom, NodeAtom, ProxQuery,
};
pub use error::{Error, Result};
pub use graph::{
    EdgeDataRow, EdgeDataTable, EdgeSpec, NodeDataRow, NodeDataTable, NodeId, NodeSpec,
    ProblemGraph,
};
pub use solver::{
    solve, Engine, IterationStats, Residuals, RhoPolicy, SolveOptions, SolveResult, SolveStatus,
    StoppingCriteria,
};
