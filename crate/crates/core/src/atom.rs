//! Convex objective atoms for nodes and edges, their evaluation, and their
//! closed-form proximal operators.
//!
//! Node atoms are functions of the node variable `x`; edge atoms are
//! functions of the difference of the two endpoint copies. Every atom has an
//! exact prox, so the solver never needs an inner iterative subproblem.

use crate::error::{Error, Result};

/// Soft-threshold (shrinkage) operator `sign(y) * max(|y| - t, 0)`.
pub fn soft_threshold(y: f64, t: f64) -> f64 {
    if y > t {
        y - t
    } else if y < -t {
        y + t
    } else {
        0.0
    }
}

/// Scalar Huber penalty: `t^2` for `|t| <= m`, `m*(2|t| - m)` beyond.
pub fn huber_value(t: f64, m: f64) -> f64 {
    if t.abs() <= m {
        t * t
    } else {
        m * (2.0 * t.abs() - m)
    }
}

/// Reads a parameter vector that is either full-length or a broadcast scalar.
#[inline]
fn bval(p: &[f64], i: usize) -> f64 {
    if p.len() == 1 {
        p[0]
    } else {
        p[i]
    }
}

fn check_param(name: &str, p: &[f64], dim: usize) -> Result<()> {
    if p.len() != dim && p.len() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "{name} has length {}, expected {dim} or 1",
            p.len()
        )));
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidAtom(format!("{name} must be finite")));
    }
    Ok(())
}

fn check_weight(w: f64, context: &str) -> Result<()> {
    if !w.is_finite() {
        return Err(Error::InvalidAtom(format!(
            "{context}: weight must be finite"
        )));
    }
    if w < 0.0 {
        return Err(Error::NegativeWeight {
            weight: w,
            context: context.to_string(),
        });
    }
    Ok(())
}

/// One convex term of a node objective. Parameter vectors may have length 1
/// (broadcast to the node dimension) or the full node dimension.
#[derive(Clone, Debug, PartialEq)]
pub enum NodeAtom {
    /// `w * ||x - a||_2^2`
    SumSquares { weight: f64, shift: Vec<f64> },
    /// `w * ||x - a||_1`
    Norm1 { weight: f64, shift: Vec<f64> },
    /// `w * ||x - a||_2`
    Norm2 { weight: f64, shift: Vec<f64> },
    /// `w * sum_i huber((x - a)_i; threshold)`
    Huber {
        weight: f64,
        shift: Vec<f64>,
        threshold: f64,
    },
    /// `w * c' x`
    Linear { weight: f64, slope: Vec<f64> },
    /// Identically zero.
    Zero,
}

impl NodeAtom {
    pub fn sum_squares(weight: f64, shift: Vec<f64>) -> Self {
        NodeAtom::SumSquares { weight, shift }
    }

    pub fn norm1(weight: f64, shift: Vec<f64>) -> Self {
        NodeAtom::Norm1 { weight, shift }
    }

    pub fn norm2(weight: f64, shift: Vec<f64>) -> Self {
        NodeAtom::Norm2 { weight, shift }
    }

    pub fn huber(weight: f64, shift: Vec<f64>, threshold: f64) -> Self {
        NodeAtom::Huber {
            weight,
            shift,
            threshold,
        }
    }

    pub fn linear(weight: f64, slope: Vec<f64>) -> Self {
        NodeAtom::Linear { weight, slope }
    }

    /// `||x||_2^2` — sugar for an unshifted unit-weight quadratic.
    pub fn square() -> Self {
        NodeAtom::sum_squares(1.0, vec![0.0])
    }

    /// `|x + offset|` elementwise — sugar for a shifted l1 norm.
    pub fn abs(offset: f64) -> Self {
        NodeAtom::norm1(1.0, vec![-offset])
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            NodeAtom::SumSquares { .. } => "sum_squares",
            NodeAtom::Norm1 { .. } => "norm1",
            NodeAtom::Norm2 { .. } => "norm2",
            NodeAtom::Huber { .. } => "huber",
            NodeAtom::Linear { .. } => "linear",
            NodeAtom::Zero => "zero",
        }
    }

    /// Whether the atom is a sum of per-coordinate terms. Box constraints
    /// are only valid alongside separable atoms.
    pub fn is_separable(&self) -> bool {
        !matches!(self, NodeAtom::Norm2 { .. })
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let ctx = self.kind_name();
        match self {
            NodeAtom::SumSquares { weight, shift }
            | NodeAtom::Norm1 { weight, shift }
            | NodeAtom::Norm2 { weight, shift } => {
                check_weight(*weight, ctx)?;
                check_param("shift", shift, dim)
            }
            NodeAtom::Huber {
                weight,
                shift,
                threshold,
            } => {
                check_weight(*weight, ctx)?;
                check_param("shift", shift, dim)?;
                if !(threshold.is_finite() && *threshold > 0.0) {
                    return Err(Error::InvalidAtom(
                        "huber threshold must be a positive finite real".into(),
                    ));
                }
                Ok(())
            }
            NodeAtom::Linear { weight, slope } => {
                check_weight(*weight, ctx)?;
                check_param("slope", slope, dim)
            }
            NodeAtom::Zero => Ok(()),
        }
    }

    /// Evaluates the atom at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.validate(x.len())?;
        let n = x.len();
        Ok(match self {
            NodeAtom::SumSquares { weight, shift } => {
                weight
                    * (0..n)
                        .map(|i| {
                            let d = x[i] - bval(shift, i);
                            d * d
                        })
                        .sum::<f64>()
            }
            NodeAtom::Norm1 { weight, shift } => {
                weight * (0..n).map(|i| (x[i] - bval(shift, i)).abs()).sum::<f64>()
            }
            NodeAtom::Norm2 { weight, shift } => {
                weight
                    * (0..n)
                        .map(|i| {
                            let d = x[i] - bval(shift, i);
                            d * d
                        })
                        .sum::<f64>()
                        .sqrt()
            }
            NodeAtom::Huber {
                weight,
                shift,
                threshold,
            } => {
                weight
                    * (0..n)
                        .map(|i| huber_value(x[i] - bval(shift, i), *threshold))
                        .sum::<f64>()
            }
            NodeAtom::Linear { weight, slope } => {
                weight * (0..n).map(|i| bval(slope, i) * x[i]).sum::<f64>()
            }
            NodeAtom::Zero => 0.0,
        })
    }
}

/// One convex coupling term of an edge objective, a function of the
/// difference of the two endpoint copies.
#[derive(Clone, Debug, PartialEq)]
pub enum EdgeAtom {
    Zero,
    /// `w * ||za - zb||_2^2`
    SqDiff {
        weight: f64,
    },
    /// `w * ||za - zb||_2` (network lasso)
    NetLasso {
        weight: f64,
    },
    /// `w * ||za - zb||_1`
    AbsDiff {
        weight: f64,
    },
}

impl EdgeAtom {
    pub fn sq_diff(weight: f64) -> Self {
        EdgeAtom::SqDiff { weight }
    }

    pub fn netlasso(weight: f64) -> Self {
        EdgeAtom::NetLasso { weight }
    }

    pub fn abs_diff(weight: f64) -> Self {
        EdgeAtom::AbsDiff { weight }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            EdgeAtom::Zero => "zero",
            EdgeAtom::SqDiff { .. } => "sq_diff",
            EdgeAtom::NetLasso { .. } => "netlasso",
            EdgeAtom::AbsDiff { .. } => "abs_diff",
        }
    }

    /// Whether this atom couples the two endpoints (requires equal dims).
    pub fn is_difference(&self) -> bool {
        !matches!(self, EdgeAtom::Zero)
    }

    pub fn weight(&self) -> f64 {
        match self {
            EdgeAtom::Zero => 0.0,
            EdgeAtom::SqDiff { weight }
            | EdgeAtom::NetLasso { weight }
            | EdgeAtom::AbsDiff { weight } => *weight,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EdgeAtom::Zero => Ok(()),
            _ => check_weight(self.weight(), self.kind_name()),
        }
    }

    /// Evaluates the atom at endpoint values `xa`, `xb`.
    pub fn eval(&self, xa: &[f64], xb: &[f64]) -> Result<f64> {
        self.validate()?;
        if xa.len() != xb.len() {
            return Err(Error::DimensionMismatch(format!(
                "edge endpoints have dims {} and {}",
                xa.len(),
                xb.len()
            )));
        }
        Ok(match self {
            EdgeAtom::Zero => 0.0,
            EdgeAtom::SqDiff { weight } => {
                weight
                    * xa.iter()
                        .zip(xb)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
            }
            EdgeAtom::NetLasso { weight } => {
                weight
                    * xa.iter()
                        .zip(xb)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
            }
            EdgeAtom::AbsDiff { weight } => {
                weight * xa.iter().zip(xb).map(|(a, b)| (a - b).abs()).sum::<f64>()
            }
        })
    }
}

/// Elementwise bounds on a node variable. Entries may be infinite. Bound
/// vectors may be scalars (broadcast) or full-length.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxConstraint {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxConstraint {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        BoxConstraint { lower, upper }
    }

    pub fn scalar(lower: f64, upper: f64) -> Self {
        BoxConstraint::new(vec![lower], vec![upper])
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        for (name, p) in [("lower", &self.lower), ("upper", &self.upper)] {
            if p.len() != dim && p.len() != 1 {
                return Err(Error::InvalidBox(format!(
                    "{name} bound has length {}, expected {dim} or 1",
                    p.len()
                )));
            }
            if p.iter().any(|v| v.is_nan()) {
                return Err(Error::InvalidBox(format!("{name} bound contains NaN")));
            }
        }
        for i in 0..dim {
            let (lo, hi) = self.bounds_at(i);
            if !(lo <= hi) {
                return Err(Error::InvalidBox(format!(
                    "lower {lo} exceeds upper {hi} at coordinate {i}"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn bounds_at(&self, i: usize) -> (f64, f64) {
        (bval(&self.lower, i), bval(&self.upper, i))
    }

    pub fn clamp_into(&self, x: &mut [f64]) {
        for i in 0..x.len() {
            let (lo, hi) = self.bounds_at(i);
            x[i] = x[i].clamp(lo, hi);
        }
    }
}

/// A proximal subproblem: `argmin_t f(t) + (sigma/2) ||t - center||^2`.
#[derive(Clone, Copy, Debug)]
pub struct ProxQuery<'a> {
    pub center: &'a [f64],
    pub sigma: f64,
}

/// The single non-linear atom a compiled node objective may carry, with
/// parameters expanded to the node dimension.
#[derive(Clone, Debug)]
pub(crate) enum MainAtom {
    SumSquares {
        weight: f64,
        shift: Vec<f64>,
    },
    Norm1 {
        weight: f64,
        shift: Vec<f64>,
    },
    Norm2 {
        weight: f64,
        shift: Vec<f64>,
    },
    Huber {
        weight: f64,
        shift: Vec<f64>,
        threshold: f64,
    },
}

/// A node objective reduced to prox-ready form: an accumulated linear slope,
/// at most one non-linear atom, and optional expanded bounds.
///
/// Zero atoms and atoms with zero weight contribute nothing and are dropped.
#[derive(Clone, Debug)]
pub(crate) struct NodeProx {
    pub dim: usize,
    linear: Option<Vec<f64>>,
    main: Option<MainAtom>,
    bounds: Option<(Vec<f64>, Vec<f64>)>,
}

fn expand(p: &[f64], dim: usize) -> Vec<f64> {
    if p.len() == dim {
        p.to_vec()
    } else {
        vec![p[0]; dim]
    }
}

impl NodeProx {
    pub fn compile(
        objective: &[NodeAtom],
        bound: Option<&BoxConstraint>,
        dim: usize,
    ) -> Result<Self> {
        let mut linear: Option<Vec<f64>> = None;
        let mut main: Option<MainAtom> = None;
        for atom in objective {
            atom.validate(dim)?;
            if let Some(b) = bound {
                if !atom.is_separable() {
                    return Err(Error::InvalidBox(format!(
                        "box constraint combined with non-separable atom {}",
                        atom.kind_name()
                    )));
                }
                b.validate(dim)?;
            }
            match atom {
                NodeAtom::Zero => {}
                NodeAtom::Linear { weight, slope } => {
                    let q = linear.get_or_insert_with(|| vec![0.0; dim]);
                    for i in 0..dim {
                        q[i] += weight * bval(slope, i);
                    }
                }
                _ if atom_weight(atom) == 0.0 => {}
                _ => {
                    if main.is_some() {
                        return Err(Error::UnsupportedComposite(format!(
                            "more than one non-linear atom with positive weight \
                             (second is {})",
                            atom.kind_name()
                        )));
                    }
                    main = Some(match atom {
                        NodeAtom::SumSquares { weight, shift } => MainAtom::SumSquares {
                            weight: *weight,
                            shift: expand(shift, dim),
                        },
                        NodeAtom::Norm1 { weight, shift } => MainAtom::Norm1 {
                            weight: *weight,
                            shift: expand(shift, dim),
                        },
                        NodeAtom::Norm2 { weight, shift } => MainAtom::Norm2 {
                            weight: *weight,
                            shift: expand(shift, dim),
                        },
                        NodeAtom::Huber {
                            weight,
                            shift,
                            threshold,
                        } => MainAtom::Huber {
                            weight: *weight,
                            shift: expand(shift, dim),
                            threshold: *threshold,
                        },
                        _ => unreachable!(),
                    });
                }
            }
        }
        let bounds = match bound {
            Some(b) => {
                b.validate(dim)?;
                Some((expand(&b.lower, dim), expand(&b.upper, dim)))
            }
            None => None,
        };
        Ok(NodeProx {
            dim,
            linear,
            main,
            bounds,
        })
    }

    /// In-place prox: on entry `x` holds the prox center, on exit the
    /// minimizer of `objective(t) + (sigma/2)||t - center||^2`, clamped.
    pub fn prox_into(&self, x: &mut [f64], sigma: f64) {
        debug_assert!(sigma > 0.0);
        if let Some(q) = &self.linear {
            for i in 0..x.len() {
                x[i] -= q[i] / sigma;
            }
        }
        match &self.main {
            None => {}
            Some(MainAtom::SumSquares { weight, shift }) => {
                let denom = sigma + 2.0 * weight;
                for i in 0..x.len() {
                    x[i] = (sigma * x[i] + 2.0 * weight * shift[i]) / denom;
                }
            }
            Some(MainAtom::Norm1 { weight, shift }) => {
                let t = weight / sigma;
                for i in 0..x.len() {
                    x[i] = shift[i] + soft_threshold(x[i] - shift[i], t);
                }
            }
            Some(MainAtom::Norm2 { weight, shift }) => {
                let nr = x
                    .iter()
                    .zip(shift)
                    .map(|(v, a)| (v - a) * (v - a))
                    .sum::<f64>()
                    .sqrt();
                if nr == 0.0 {
                    x.copy_from_slice(shift);
                } else {
                    let factor = (1.0 - (weight / sigma) / nr).max(0.0);
                    for i in 0..x.len() {
                        x[i] = shift[i] + factor * (x[i] - shift[i]);
                    }
                }
            }
            Some(MainAtom::Huber {
                weight,
                shift,
                threshold,
            }) => {
                let denom = sigma + 2.0 * weight;
                let lim = threshold * denom / sigma;
                let tail = 2.0 * weight * threshold / sigma;
                for i in 0..x.len() {
                    let d = x[i] - shift[i];
                    x[i] = shift[i]
                        + if d.abs() <= lim {
                            sigma * d / denom
                        } else {
                            d - d.signum() * tail
                        };
                }
            }
        }
        if let Some((lo, hi)) = &self.bounds {
            for i in 0..x.len() {
                x[i] = x[i].clamp(lo[i], hi[i]);
            }
        }
    }

    /// Exact unpenalized minimizer (the prox limit as sigma goes to zero).
    /// Returns `None` when the objective is unbounded below.
    pub fn argmin(&self) -> Option<Vec<f64>> {
        let dim = self.dim;
        let q_at = |i: usize| self.linear.as_ref().map_or(0.0, |q| q[i]);
        let bounds_at = |i: usize| {
            self.bounds
                .as_ref()
                .map_or((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi)| {
                    (lo[i], hi[i])
                })
        };
        // Per coordinate, send a pure descent direction to its (finite) bound.
        let to_bound = |i: usize, descending: bool| -> Option<f64> {
            let (lo, hi) = bounds_at(i);
            let b = if descending { lo } else { hi };
            b.is_finite().then_some(b)
        };
        let mut x = vec![0.0; dim];
        match &self.main {
            None => {
                for i in 0..dim {
                    let q = q_at(i);
                    let (lo, hi) = bounds_at(i);
                    x[i] = if q > 0.0 {
                        to_bound(i, true)?
                    } else if q < 0.0 {
                        to_bound(i, false)?
                    } else {
                        (0.0f64).clamp(lo, hi)
                    };
                }
            }
            Some(MainAtom::SumSquares { weight, shift }) => {
                for i in 0..dim {
                    let (lo, hi) = bounds_at(i);
                    x[i] = (shift[i] - q_at(i) / (2.0 * weight)).clamp(lo, hi);
                }
            }
            Some(MainAtom::Norm1 { weight, shift }) => {
                for i in 0..dim {
                    let q = q_at(i);
                    let (lo, hi) = bounds_at(i);
                    x[i] = if q.abs() <= *weight {
                        shift[i].clamp(lo, hi)
                    } else {
                        to_bound(i, q > 0.0)?
                    };
                }
            }
            Some(MainAtom::Huber {
                weight,
                shift,
                threshold,
            }) => {
                let cap = 2.0 * weight * threshold;
                for i in 0..dim {
                    let q = q_at(i);
                    let (lo, hi) = bounds_at(i);
                    x[i] = if q.abs() < cap {
                        (shift[i] - q / (2.0 * weight)).clamp(lo, hi)
                    } else if q.abs() == cap {
                        (shift[i] - q.signum() * threshold).clamp(lo, hi)
                    } else {
                        to_bound(i, q > 0.0)?
                    };
                }
            }
            Some(MainAtom::Norm2 { weight, shift }) => {
                let qn = (0..dim).map(|i| q_at(i) * q_at(i)).sum::<f64>().sqrt();
                if qn > *weight {
                    return None;
                }
                x.copy_from_slice(shift);
            }
        }
        Some(x)
    }
}

fn atom_weight(atom: &NodeAtom) -> f64 {
    match atom {
        NodeAtom::SumSquares { weight, .. }
        | NodeAtom::Norm1 { weight, .. }
        | NodeAtom::Norm2 { weight, .. }
        | NodeAtom::Huber { weight, .. }
        | NodeAtom::Linear { weight, .. } => *weight,
        NodeAtom::Zero => 0.0,
    }
}

/// Prox-ready form of an edge objective (at most one effective atom).
#[derive(Clone, Copy, Debug)]
pub(crate) enum EdgeProx {
    /// No effective coupling: both copies equal their centers.
    Identity,
    SqDiff(f64),
    NetLasso(f64),
    AbsDiff(f64),
}

impl EdgeProx {
    pub fn compile(objective: &[EdgeAtom]) -> Result<Self> {
        let mut compiled = EdgeProx::Identity;
        let mut seen = false;
        for atom in objective {
            atom.validate()?;
            if !atom.is_difference() || atom.weight() == 0.0 {
                continue;
            }
            if seen {
                return Err(Error::UnsupportedComposite(
                    "more than one edge atom with positive weight".into(),
                ));
            }
            seen = true;
            compiled = match atom {
                EdgeAtom::SqDiff { weight } => EdgeProx::SqDiff(*weight),
                EdgeAtom::NetLasso { weight } => EdgeProx::NetLasso(*weight),
                EdgeAtom::AbsDiff { weight } => EdgeProx::AbsDiff(*weight),
                EdgeAtom::Zero => unreachable!(),
            };
        }
        Ok(compiled)
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, EdgeProx::Identity)
    }

    /// Joint prox of the edge objective with penalty `rho` about centers
    /// `(c_a, c_b)`, written into `(z_a, z_b)`. The centers are read from the
    /// output slices, which must hold `c_a` and `c_b` on entry.
    pub fn prox_into(&self, z_a: &mut [f64], z_b: &mut [f64], rho: f64) {
        debug_assert!(rho > 0.0);
        debug_assert_eq!(z_a.len(), z_b.len());
        fn split(z_a: &mut [f64], z_b: &mut [f64], delta: impl Fn(f64) -> f64) {
            for i in 0..z_a.len() {
                let m = 0.5 * (z_a[i] + z_b[i]);
                let h = 0.5 * delta(z_a[i] - z_b[i]);
                z_a[i] = m + h;
                z_b[i] = m - h;
            }
        }
        match *self {
            EdgeProx::Identity => {}
            EdgeProx::SqDiff(w) => {
                let scale = rho / (rho + 4.0 * w);
                split(z_a, z_b, |d| scale * d);
            }
            EdgeProx::AbsDiff(w) => {
                let t = 2.0 * w / rho;
                split(z_a, z_b, |d| soft_threshold(d, t));
            }
            EdgeProx::NetLasso(w) => {
                let dn = z_a
                    .iter()
                    .zip(z_b.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let factor = if dn == 0.0 {
                    0.0
                } else {
                    (1.0 - (2.0 * w / rho) / dn).max(0.0)
                };
                split(z_a, z_b, |d| factor * d);
            }
        }
    }
}

/// Evaluates a full node objective (sum of atoms) at `x`.
pub fn eval_node_objective(objective: &[NodeAtom], x: &[f64]) -> Result<f64> {
    objective.iter().map(|a| a.eval(x)).sum()
}

/// Evaluates a full edge objective (sum of atoms) at endpoint values.
pub fn eval_edge_objective(objective: &[EdgeAtom], xa: &[f64], xb: &[f64]) -> Result<f64> {
    objective.iter().map(|a| a.eval(xa, xb)).sum()
}

/// Closed-form prox of a node objective: the minimizer of
/// `objective(t) + (sigma/2)||t - center||^2`, clamped into the box.
///
/// The objective may contain any number of linear and zero atoms plus at
/// most one other atom; richer composites are rejected.
pub fn prox_node(
    objective: &[NodeAtom],
    bound: Option<&BoxConstraint>,
    query: ProxQuery<'_>,
) -> Result<Vec<f64>> {
    if !(query.sigma.is_finite() && query.sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "prox sigma must be positive, got {}",
            query.sigma
        )));
    }
    let compiled = NodeProx::compile(objective, bound, query.center.len())?;
    let mut x = query.center.to_vec();
    compiled.prox_into(&mut x, query.sigma);
    Ok(x)
}

/// Exact minimizer of a node objective subject to its box, for nodes that
/// do not participate in any coupling.
pub fn argmin_node(
    objective: &[NodeAtom],
    bound: Option<&BoxConstraint>,
    dim: usize,
) -> Result<Vec<f64>> {
    let compiled = NodeProx::compile(objective, bound, dim)?;
    compiled
        .argmin()
        .ok_or_else(|| Error::InvalidArgument("objective is unbounded below".into()))
}

/// Joint prox of an edge objective about centers `(c_a, c_b)` with penalty
/// `rho`: the minimizer of
/// `g(z_a, z_b) + (rho/2)||z_a - c_a||^2 + (rho/2)||z_b - c_b||^2`.
pub fn edge_prox(
    objective: &[EdgeAtom],
    c_a: &[f64],
    c_b: &[f64],
    rho: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidRho(rho));
    }
    if c_a.len() != c_b.len() {
        return Err(Error::DimensionMismatch(format!(
            "edge prox centers have dims {} and {}",
            c_a.len(),
            c_b.len()
        )));
    }
    let compiled = EdgeProx::compile(objective)?;
    let mut z_a = c_a.to_vec();
    let mut z_b = c_b.to_vec();
    compiled.prox_into(&mut z_a, &mut z_b, rho);
    Ok((z_a, z_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{grid_refine_2d, prox_oracle_1d};

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol,
            "got {got}, want {want} (tol {tol})"
        );
    }

    #[test]
    fn eval_sum_squares() {
        let atom = NodeAtom::sum_squares(1.0, vec![0.0]);
        assert_eq!(atom.eval(&[3.0, 4.0]).unwrap(), 25.0);
    }

    #[test]
    fn eval_huber_both_branches() {
        let atom = NodeAtom::huber(1.0, vec![0.0], 1.0);
        assert_eq!(atom.eval(&[0.5]).unwrap(), 0.25);
        assert_eq!(atom.eval(&[2.0]).unwrap(), 3.0);
    }

    #[test]
    fn eval_norm2_shifted() {
        let atom = NodeAtom::norm2(2.0, vec![1.0, 1.0]);
        assert_eq!(atom.eval(&[4.0, 5.0]).unwrap(), 10.0);
    }

    #[test]
    fn eval_rejects_bad_dims() {
        let atom = NodeAtom::norm1(1.0, vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            atom.eval(&[0.0, 0.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn prox_quadratic_closed_form() {
        let obj = [NodeAtom::sum_squares(1.0, vec![0.0])];
        let x = prox_node(
            &obj,
            None,
            ProxQuery {
                center: &[3.0],
                sigma: 1.0,
            },
        )
        .unwrap();
        assert_eq!(x, vec![1.0]);
    }

    #[test]
    fn prox_norm1_dead_zone() {
        let obj = [NodeAtom::norm1(1.0, vec![0.0])];
        let x = prox_node(
            &obj,
            None,
            ProxQuery {
                center: &[0.4],
                sigma: 2.0,
            },
        )
        .unwrap();
        assert_eq!(x, vec![0.0]);
    }

    #[test]
    fn prox_huber_linear_branch_matches_oracle() {
        let obj = [NodeAtom::huber(1.0, vec![0.0], 1.0)];
        let x = prox_node(
            &obj,
            None,
            ProxQuery {
                center: &[5.0],
                sigma: 1.0,
            },
        )
        .unwrap();
        let want = prox_oracle_1d(|t| huber_value(t, 1.0), 5.0, 1.0, (-20.0, 20.0));
        assert_close(x[0], 3.0, 1e-12);
        assert_close(x[0], want, 1e-8);
    }

    #[test]
    fn prox_square_clamped_matches_constrained_oracle() {
        let obj = [NodeAtom::square()];
        let bound = BoxConstraint::scalar(f64::NEG_INFINITY, 0.0);
        let x = prox_node(
            &obj,
            Some(&bound),
            ProxQuery {
                center: &[2.0],
                sigma: 1.0,
            },
        )
        .unwrap();
        let want = prox_oracle_1d(|t| t * t, 2.0, 1.0, (-50.0, 0.0));
        assert_eq!(x, vec![0.0]);
        assert_close(x[0], want, 1e-8);
    }

    #[test]
    fn prox_norm2_at_singular_point_returns_shift() {
        let obj = [NodeAtom::norm2(1.0, vec![2.0, -1.0])];
        let x = prox_node(
            &obj,
            None,
            ProxQuery {
                center: &[2.0, -1.0],
                sigma: 1.0,
            },
        )
        .unwrap();
        assert_eq!(x, vec![2.0, -1.0]);
    }

    #[test]
    fn prox_linear_folds_into_center() {
        let obj = [
            NodeAtom::linear(2.0, vec![1.0, -1.0]),
            NodeAtom::sum_squares(1.0, vec![0.0]),
        ];
        // center' = center - (w/sigma) c = (1 - 2, 1 + 2) = (-1, 3);
        // quadratic prox then scales by sigma/(sigma + 2w) = 1/3.
        let x = prox_node(
            &obj,
            None,
            ProxQuery {
                center: &[1.0, 1.0],
                sigma: 1.0,
            },
        )
        .unwrap();
        assert_eq!(x, vec![-1.0 / 3.0, 1.0]);
    }

    #[test]
    fn prox_rejects_two_nonlinear_atoms() {
        let obj = [
            NodeAtom::norm1(1.0, vec![0.0]),
            NodeAtom::sum_squares(1.0, vec![0.0]),
        ];
        let r = prox_node(
            &obj,
            None,
            ProxQuery {
                center: &[0.0],
                sigma: 1.0,
            },
        );
        assert!(matches!(r, Err(Error::UnsupportedComposite(_))));
    }

    #[test]
    fn prox_zero_weight_atom_is_inert() {
        let obj = [
            NodeAtom::norm1(0.0, vec![0.0]),
            NodeAtom::sum_squares(1.0, vec![0.0]),
        ];
        let x = prox_node(
            &obj,
            None,
            ProxQuery {
                center: &[3.0],
                sigma: 1.0,
            },
        )
        .unwrap();
        assert_eq!(x, vec![1.0]);
    }

    #[test]
    fn prox_rejects_box_with_norm2() {
        let obj = [NodeAtom::norm2(1.0, vec![0.0])];
        let bound = BoxConstraint::scalar(0.0, 1.0);
        let r = prox_node(
            &obj,
            Some(&bound),
            ProxQuery {
                center: &[0.5],
                sigma: 1.0,
            },
        );
        assert!(matches!(r, Err(Error::InvalidBox(_))));
    }

    #[test]
    fn argmin_minimizer_at_shift() {
        let obj = [NodeAtom::sum_squares(1.0, vec![7.0, 7.0])];
        assert_eq!(argmin_node(&obj, None, 2).unwrap(), vec![7.0, 7.0]);
    }

    #[test]
    fn argmin_bare_linear_unbounded() {
        let obj = [NodeAtom::linear(1.0, vec![1.0])];
        assert!(argmin_node(&obj, None, 1).is_err());
    }

    #[test]
    fn argmin_norm1_clamped() {
        let obj = [NodeAtom::norm1(1.0, vec![2.0])];
        let bound = BoxConstraint::scalar(0.0, 1.0);
        assert_eq!(argmin_node(&obj, Some(&bound), 1).unwrap(), vec![1.0]);
    }

    #[test]
    fn argmin_linear_with_binding_box() {
        let obj = [NodeAtom::linear(1.0, vec![1.0, -1.0])];
        let bound = BoxConstraint::new(vec![-2.0, -2.0], vec![3.0, 3.0]);
        assert_eq!(argmin_node(&obj, Some(&bound), 2).unwrap(), vec![-2.0, 3.0]);
    }

    #[test]
    fn argmin_composite_quadratic_plus_linear() {
        // w||x-a||^2 + q'x with w=1, a=4, q=2: minimizer a - q/(2w) = 3.
        let obj = [
            NodeAtom::sum_squares(1.0, vec![4.0]),
            NodeAtom::linear(2.0, vec![1.0]),
        ];
        assert_eq!(argmin_node(&obj, None, 1).unwrap(), vec![3.0]);
        let oracle = prox_oracle_1d(
            |t| (t - 4.0) * (t - 4.0) + 2.0 * t,
            0.0,
            1e-9,
            (-50.0, 50.0),
        );
        assert_close(3.0, oracle, 1e-6);
    }

    #[test]
    fn argmin_norm1_plus_steep_linear_needs_bound() {
        // |x - 2| + 3x decreases without bound unless the lower bound binds.
        let obj = [
            NodeAtom::norm1(1.0, vec![2.0]),
            NodeAtom::linear(3.0, vec![1.0]),
        ];
        assert!(argmin_node(&obj, None, 1).is_err());
        let bound = BoxConstraint::scalar(-1.0, 10.0);
        assert_eq!(argmin_node(&obj, Some(&bound), 1).unwrap(), vec![-1.0]);
    }

    #[test]
    fn argmin_norm2_plus_weak_linear_stays_at_shift() {
        let obj = [
            NodeAtom::norm2(2.0, vec![1.0, 2.0]),
            NodeAtom::linear(1.0, vec![0.5, 0.5]),
        ];
        assert_eq!(argmin_node(&obj, None, 2).unwrap(), vec![1.0, 2.0]);
        let strong = [
            NodeAtom::norm2(0.1, vec![1.0, 2.0]),
            NodeAtom::linear(1.0, vec![0.5, 0.5]),
        ];
        assert!(argmin_node(&strong, None, 2).is_err());
    }

    #[test]
    fn edge_prox_zero_atom_is_identity() {
        let (za, zb) = edge_prox(&[EdgeAtom::Zero], &[1.0], &[5.0], 1.0).unwrap();
        assert_eq!(za, vec![1.0]);
        assert_eq!(zb, vec![5.0]);
    }

    #[test]
    fn edge_prox_sq_diff_matches_2d_oracle() {
        let (za, zb) = edge_prox(&[EdgeAtom::sq_diff(1.0)], &[1.0], &[5.0], 1.0).unwrap();
        assert_close(za[0], 2.6, 1e-12);
        assert_close(zb[0], 3.4, 1e-12);
        let f = |a: f64, b: f64| {
            (a - b) * (a - b) + 0.5 * (a - 1.0) * (a - 1.0) + 0.5 * (b - 5.0) * (b - 5.0)
        };
        let (oa, ob) = grid_refine_2d(f, (-10.0, 10.0), (-10.0, 10.0), &[33; 12]);
        assert_close(za[0], oa, 1e-5);
        assert_close(zb[0], ob, 1e-5);
    }

    #[test]
    fn edge_prox_netlasso_matches_2d_oracle() {
        let (za, zb) = edge_prox(&[EdgeAtom::netlasso(1.0)], &[1.0], &[5.0], 1.0).unwrap();
        assert_close(za[0], 2.0, 1e-12);
        assert_close(zb[0], 4.0, 1e-12);
        let f = |a: f64, b: f64| {
            (a - b).abs() + 0.5 * (a - 1.0) * (a - 1.0) + 0.5 * (b - 5.0) * (b - 5.0)
        };
        let (oa, ob) = grid_refine_2d(f, (-10.0, 10.0), (-10.0, 10.0), &[33; 12]);
        assert_close(za[0], oa, 1e-5);
        assert_close(zb[0], ob, 1e-5);
    }

    #[test]
    fn edge_prox_netlasso_fuses_below_threshold() {
        // ||d|| = 2 <= 2w/rho = 4: both copies collapse to the mean.
        let (za, zb) = edge_prox(&[EdgeAtom::netlasso(2.0)], &[2.0], &[4.0], 1.0).unwrap();
        assert_eq!(za, vec![3.0]);
        assert_eq!(zb, vec![3.0]);
    }

    #[test]
    fn edge_prox_netlasso_coincident_inputs() {
        let (za, zb) = edge_prox(&[EdgeAtom::netlasso(1.0)], &[2.5], &[2.5], 1.0).unwrap();
        assert_eq!(za, vec![2.5]);
        assert_eq!(zb, vec![2.5]);
    }

    #[test]
    fn edge_prox_abs_diff_soft_thresholds_difference() {
        // d = 3, threshold 2w/rho = 1, delta = 2, mean 2.5.
        let (za, zb) = edge_prox(&[EdgeAtom::abs_diff(0.5)], &[4.0], &[1.0], 1.0).unwrap();
        assert_eq!(za, vec![3.5]);
        assert_eq!(zb, vec![1.5]);
    }

    #[test]
    fn edge_prox_rejects_composites_and_bad_dims() {
        let comp = [EdgeAtom::sq_diff(1.0), EdgeAtom::netlasso(1.0)];
        assert!(matches!(
            edge_prox(&comp, &[0.0], &[0.0], 1.0),
            Err(Error::UnsupportedComposite(_))
        ));
        assert!(matches!(
            edge_prox(&[EdgeAtom::sq_diff(1.0)], &[0.0, 0.0], &[0.0], 1.0),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn negative_weight_rejected() {
        let atom = NodeAtom::sum_squares(-1.0, vec![0.0]);
        assert!(matches!(
            atom.validate(1),
            Err(Error::NegativeWeight { .. })
        ));
        assert!(matches!(
            EdgeAtom::netlasso(-0.5).validate(),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn huber_threshold_must_be_positive() {
        let atom = NodeAtom::huber(1.0, vec![0.0], 0.0);
        assert!(matches!(atom.validate(1), Err(Error::InvalidAtom(_))));
    }
}
