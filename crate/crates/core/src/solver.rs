//! The ADMM splitting loop over the problem graph.
//!
//! Each edge (j, k) gets two copies z_jk, z_kj of its endpoint variables
//! with consensus constraints x_j = z_jk and x_k = z_kj. One iteration runs
//! node proxes (x-update), edge proxes (z-update), dual ascent (u-update),
//! then the residual stopping test and the penalty policy.
//!
//! Node and edge updates write disjoint state slots and the residual norms
//! are accumulated serially in ascending (node id, neighbor id) order, so
//! results are bitwise identical for any worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::atom::{eval_edge_objective, eval_node_objective, EdgeProx, NodeProx};
use crate::error::{Error, Result};
use crate::graph::{NodeId, ProblemGraph};

/// Absolute/relative stopping tolerances and the iteration cap.
#[derive(Clone, Copy, Debug)]
pub struct StoppingCriteria {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iters: usize,
}

impl Default for StoppingCriteria {
    fn default() -> Self {
        StoppingCriteria {
            eps_abs: 1e-4,
            eps_rel: 1e-3,
            max_iters: 1000,
        }
    }
}

impl StoppingCriteria {
    fn validate(&self) -> Result<()> {
        if !(self.eps_abs > 0.0 && self.eps_abs.is_finite())
            || !(self.eps_rel > 0.0 && self.eps_rel.is_finite())
        {
            return Err(Error::InvalidArgument(
                "stopping tolerances must be positive finite reals".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// User hook deciding the next penalty value from
/// `(iter, rho, primal_norm, dual_norm)`.
pub type RhoCallback = Arc<dyn Fn(usize, f64, f64, f64) -> f64 + Send + Sync>;

/// Penalty-parameter adaptation applied after each iteration.
#[derive(Clone, Default)]
pub enum RhoPolicy {
    #[default]
    Fixed,
    /// Multiply rho by `tau_incr` when the primal residual dominates by
    /// factor `mu`, divide by `tau_decr` when the dual residual dominates.
    ResidualBalance {
        mu: f64,
        tau_incr: f64,
        tau_decr: f64,
    },
    Custom(RhoCallback),
}

impl RhoPolicy {
    /// Residual balancing with the standard settings (mu 10, tau 2).
    pub fn residual_balance() -> Self {
        RhoPolicy::ResidualBalance {
            mu: 10.0,
            tau_incr: 2.0,
            tau_decr: 2.0,
        }
    }
}

impl fmt::Debug for RhoPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoPolicy::Fixed => write!(f, "Fixed"),
            RhoPolicy::ResidualBalance {
                mu,
                tau_incr,
                tau_decr,
            } => write!(
                f,
                "ResidualBalance {{ mu: {mu}, tau_incr: {tau_incr}, tau_decr: {tau_decr} }}"
            ),
            RhoPolicy::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveStatus::Converged => write!(f, "CONVERGED"),
            SolveStatus::MaxIters => write!(f, "MAX_ITERS"),
        }
    }
}

/// Residual norms and the tolerances they were tested against.
#[derive(Clone, Copy, Debug)]
pub struct Residuals {
    pub primal_norm: f64,
    pub dual_norm: f64,
    pub eps_pri: f64,
    pub eps_dual: f64,
}

/// One history record per completed iteration.
#[derive(Clone, Copy, Debug)]
pub struct IterationStats {
    pub primal_norm: f64,
    pub dual_norm: f64,
    pub eps_pri: f64,
    pub eps_dual: f64,
    pub rho: f64,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    /// Final primal values per node.
    pub x: BTreeMap<NodeId, Vec<f64>>,
    /// Total objective (all node and edge atoms) at the final values.
    pub objective: f64,
    pub status: SolveStatus,
    pub iters: usize,
    pub history: Vec<IterationStats>,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub criteria: StoppingCriteria,
    /// Initial penalty parameter; defaults to 1.
    pub rho: f64,
    pub policy: RhoPolicy,
    /// Worker count; `None` uses all available cores.
    pub threads: Option<usize>,
    /// Print one residual trace line per iteration.
    pub verbose: bool,
    /// Initial primal values for some or all nodes (zeros otherwise).
    pub warm_start: Option<BTreeMap<NodeId, Vec<f64>>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            criteria: StoppingCriteria::default(),
            rho: 1.0,
            policy: RhoPolicy::Fixed,
            threads: None,
            verbose: false,
            warm_start: None,
        }
    }
}

struct EdgeRuntime {
    /// Dense node indices, smaller id first.
    a: usize,
    b: usize,
    prox: EdgeProx,
}

/// The solver state plus the compiled topology it operates on. Exposed so
/// tests and embedders can drive individual phases; `solve` is the loop
/// everyone else wants.
pub struct Engine {
    node_ids: Vec<NodeId>,
    dims: Vec<usize>,
    node_prox: Vec<NodeProx>,
    edges: Vec<EdgeRuntime>,
    /// Per node: directed-endpoint slots (i -> j), ascending by neighbor id.
    node_slots: Vec<Vec<usize>>,
    /// Per slot: the dense index of the node whose variable it copies.
    slot_owner: Vec<usize>,
    x: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
    prev_z: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
    rho: f64,
    iter: usize,
}

impl Engine {
    /// Compiles the graph and initializes the iterates: x from the warm
    /// start (zeros otherwise), every copy z_ij = x_i, duals at zero.
    /// Isolated nodes are solved exactly here and never iterated.
    ///
    /// Edges whose objective has no effective atom (empty, zero atoms, or
    /// all weights zero) impose no coupling and are excluded from the
    /// splitting entirely.
    pub fn new(
        graph: &ProblemGraph,
        rho: f64,
        warm_start: Option<&BTreeMap<NodeId, Vec<f64>>>,
    ) -> Result<Engine> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidRho(rho));
        }
        let node_ids: Vec<NodeId> = graph.nodes().map(|n| n.id).collect();
        let index: BTreeMap<NodeId, usize> = node_ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i))
            .collect();
        let dims: Vec<usize> = graph.nodes().map(|n| n.dim).collect();
        let mut node_prox = Vec::with_capacity(node_ids.len());
        for n in graph.nodes() {
            node_prox.push(NodeProx::compile(&n.objective, n.bound.as_ref(), n.dim)?);
        }

        let mut edges = Vec::new();
        let mut per_node: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); node_ids.len()];
        for (a_id, b_id, objective) in graph.edges() {
            let prox = EdgeProx::compile(objective)?;
            if prox.is_identity() {
                continue;
            }
            let (a, b) = (index[&a_id], index[&b_id]);
            let slot_a = 2 * edges.len();
            per_node[a].push((b_id, slot_a));
            per_node[b].push((a_id, slot_a + 1));
            edges.push(EdgeRuntime { a, b, prox });
        }
        let mut node_slots = Vec::with_capacity(node_ids.len());
        for mut slots in per_node {
            slots.sort_by_key(|&(neighbor, _)| neighbor);
            node_slots.push(slots.into_iter().map(|(_, s)| s).collect::<Vec<_>>());
        }
        let mut slot_owner = vec![0usize; 2 * edges.len()];
        for (e, edge) in edges.iter().enumerate() {
            slot_owner[2 * e] = edge.a;
            slot_owner[2 * e + 1] = edge.b;
        }

        let mut x: Vec<Vec<f64>> = dims.iter().map(|&d| vec![0.0; d]).collect();
        if let Some(warm) = warm_start {
            for (id, values) in warm {
                let Some(&i) = index.get(id) else {
                    return Err(Error::UnknownNode(*id));
                };
                if values.len() != dims[i] {
                    return Err(Error::WarmStartDimMismatch {
                        id: *id,
                        expected: dims[i],
                        got: values.len(),
                    });
                }
                x[i].copy_from_slice(values);
            }
        }
        for i in 0..node_ids.len() {
            if node_slots[i].is_empty() {
                x[i] = node_prox[i]
                    .argmin()
                    .ok_or(Error::UnboundedObjective(node_ids[i]))?;
            }
        }

        let z: Vec<Vec<f64>> = slot_owner.iter().map(|&i| x[i].clone()).collect();
        let u: Vec<Vec<f64>> = slot_owner.iter().map(|&i| vec![0.0; x[i].len()]).collect();
        Ok(Engine {
            node_ids,
            dims,
            node_prox,
            edges,
            node_slots,
            slot_owner,
            prev_z: z.clone(),
            z,
            u,
            x,
            rho,
            iter: 0,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn iter(&self) -> usize {
        self.iter
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.node_ids
    }

    /// Directed-endpoint count of the splitting (two per effective edge).
    pub fn endpoint_count(&self) -> usize {
        self.slot_owner.len()
    }

    pub fn x_vectors(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn z_vectors(&self) -> &[Vec<f64>] {
        &self.z
    }

    pub fn u_vectors(&self) -> &[Vec<f64>] {
        &self.u
    }

    pub fn x_of(&self, id: impl Into<NodeId>) -> Option<&[f64]> {
        let id = id.into();
        let i = self.node_ids.binary_search(&id).ok()?;
        Some(&self.x[i])
    }

    /// Node proxes: for node i with effective degree d,
    /// x_i = prox(f_i; center = mean of (z_ij - u_ij), sigma = rho * d).
    /// Isolated nodes keep their one-shot exact solution.
    pub fn x_update(&mut self) {
        let slots = &self.node_slots;
        let z = &self.z;
        let u = &self.u;
        let prox = &self.node_prox;
        let rho = self.rho;
        self.x.par_iter_mut().enumerate().for_each(|(i, xi)| {
            let deg = slots[i].len();
            if deg == 0 {
                return;
            }
            xi.iter_mut().for_each(|v| *v = 0.0);
            for &s in &slots[i] {
                for k in 0..xi.len() {
                    xi[k] += z[s][k] - u[s][k];
                }
            }
            let inv = 1.0 / deg as f64;
            xi.iter_mut().for_each(|v| *v *= inv);
            prox[i].prox_into(xi, rho * deg as f64);
        });
    }

    /// Edge proxes: (z_jk, z_kj) = edge prox about (x_j + u_jk, x_k + u_kj).
    /// The previous z is kept for the dual residual.
    pub fn z_update(&mut self) {
        std::mem::swap(&mut self.prev_z, &mut self.z);
        let x = &self.x;
        let u = &self.u;
        let rho = self.rho;
        let edges = &self.edges;
        self.z.par_chunks_mut(2).enumerate().for_each(|(e, pair)| {
            let (za, zb) = pair.split_at_mut(1);
            let (za, zb) = (&mut za[0], &mut zb[0]);
            let edge = &edges[e];
            for k in 0..za.len() {
                za[k] = x[edge.a][k] + u[2 * e][k];
                zb[k] = x[edge.b][k] + u[2 * e + 1][k];
            }
            edge.prox.prox_into(za, zb, rho);
        });
    }

    /// Scaled dual ascent: u_ij += x_i - z_ij.
    pub fn u_update(&mut self) {
        let x = &self.x;
        let z = &self.z;
        let owner = &self.slot_owner;
        self.u.par_iter_mut().enumerate().for_each(|(s, us)| {
            let xi = &x[owner[s]];
            for k in 0..us.len() {
                us[k] += xi[k] - z[s][k];
            }
        });
    }

    /// Residual norms over all directed endpoints, accumulated serially in
    /// ascending (node id, neighbor id) order for bitwise reproducibility.
    pub fn residuals(&self, criteria: &StoppingCriteria) -> Residuals {
        let mut r2 = 0.0;
        let mut s2 = 0.0;
        let mut x2 = 0.0;
        let mut z2 = 0.0;
        let mut u2 = 0.0;
        let mut p = 0usize;
        for i in 0..self.node_ids.len() {
            let xi = &self.x[i];
            for &s in &self.node_slots[i] {
                let (zs, ps, us) = (&self.z[s], &self.prev_z[s], &self.u[s]);
                for k in 0..self.dims[i] {
                    let r = xi[k] - zs[k];
                    r2 += r * r;
                    let d = zs[k] - ps[k];
                    s2 += d * d;
                    x2 += xi[k] * xi[k];
                    z2 += zs[k] * zs[k];
                    u2 += us[k] * us[k];
                }
                p += self.dims[i];
            }
        }
        let sqrt_p = (p as f64).sqrt();
        Residuals {
            primal_norm: r2.sqrt(),
            dual_norm: self.rho * s2.sqrt(),
            eps_pri: sqrt_p * criteria.eps_abs + criteria.eps_rel * x2.sqrt().max(z2.sqrt()),
            eps_dual: sqrt_p * criteria.eps_abs + criteria.eps_rel * self.rho * u2.sqrt(),
        }
    }

    /// Applies a penalty policy given the current residual norms. Whenever
    /// rho changes, the scaled duals are rescaled so the unscaled dual
    /// y = rho * u is invariant.
    pub fn apply_rho_policy(
        &mut self,
        policy: &RhoPolicy,
        primal_norm: f64,
        dual_norm: f64,
    ) -> Result<()> {
        let (new_rho, u_scale) = match policy {
            RhoPolicy::Fixed => return Ok(()),
            RhoPolicy::ResidualBalance {
                mu,
                tau_incr,
                tau_decr,
            } => {
                if primal_norm > mu * dual_norm {
                    (self.rho * tau_incr, UScale::Div(*tau_incr))
                } else if dual_norm > mu * primal_norm {
                    (self.rho / tau_decr, UScale::Mul(*tau_decr))
                } else {
                    return Ok(());
                }
            }
            RhoPolicy::Custom(cb) => {
                let new_rho = cb(self.iter, self.rho, primal_norm, dual_norm);
                if !(new_rho.is_finite() && new_rho > 0.0) {
                    return Err(Error::InvalidRho(new_rho));
                }
                if new_rho == self.rho {
                    return Ok(());
                }
                (new_rho, UScale::Mul(self.rho / new_rho))
            }
        };
        if !(new_rho.is_finite() && new_rho > 0.0) {
            return Err(Error::InvalidRho(new_rho));
        }
        self.u.par_iter_mut().for_each(|us| {
            for v in us.iter_mut() {
                match u_scale {
                    UScale::Mul(s) => *v *= s,
                    UScale::Div(s) => *v /= s,
                }
            }
        });
        self.rho = new_rho;
        Ok(())
    }

    fn run(&mut self, options: &SolveOptions) -> Result<(SolveStatus, Vec<IterationStats>)> {
        let mut history = Vec::new();
        if self.edges.is_empty() {
            // Nothing is coupled; the one-shot isolated solves are final and
            // the (vacuous) residual checks pass at iteration zero.
            return Ok((SolveStatus::Converged, history));
        }
        let mut status = SolveStatus::MaxIters;
        for k in 1..=options.criteria.max_iters {
            self.iter = k;
            let rho_used = self.rho;
            self.x_update();
            self.z_update();
            self.u_update();
            let res = self.residuals(&options.criteria);
            history.push(IterationStats {
                primal_norm: res.primal_norm,
                dual_norm: res.dual_norm,
                eps_pri: res.eps_pri,
                eps_dual: res.eps_dual,
                rho: rho_used,
            });
            if options.verbose {
                println!(
                    "iter={k} r={:.6e} s={:.6e} eps_pri={:.6e} eps_dual={:.6e} rho={:.6e}",
                    res.primal_norm, res.dual_norm, res.eps_pri, res.eps_dual, rho_used
                );
            }
            if res.primal_norm <= res.eps_pri && res.dual_norm <= res.eps_dual {
                status = SolveStatus::Converged;
                break;
            }
            self.apply_rho_policy(&options.policy, res.primal_norm, res.dual_norm)?;
        }
        // Terminal primal extraction: one more node solve against the final
        // messages, so every returned x_i is the exact minimizer of its
        // local subproblem at the certified consensus state.
        self.x_update();
        Ok((status, history))
    }
}

enum UScale {
    Mul(f64),
    Div(f64),
}

/// Runs ADMM on the graph until both residuals pass or the iteration cap is
/// hit. All construction and atom errors surface before the first iteration.
pub fn solve(graph: &ProblemGraph, options: &SolveOptions) -> Result<SolveResult> {
    options.criteria.validate()?;
    let mut engine = Engine::new(graph, options.rho, options.warm_start.as_ref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let (status, history) = pool.install(|| engine.run(options))?;

    let mut x = BTreeMap::new();
    for (i, &id) in engine.node_ids.iter().enumerate() {
        x.insert(id, engine.x[i].clone());
    }
    let mut objective = 0.0;
    for n in graph.nodes() {
        objective += eval_node_objective(&n.objective, &x[&n.id])?;
    }
    for (a, b, obj) in graph.edges() {
        objective += eval_edge_objective(obj, &x[&a], &x[&b])?;
    }
    Ok(SolveResult {
        x,
        objective,
        status,
        iters: history.len(),
        history,
    })
}
