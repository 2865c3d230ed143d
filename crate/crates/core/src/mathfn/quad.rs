//! Gauss-Legendre quadrature and bracketing root search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Knobs shared by every quadrature-based engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes per outer integration dimension.
    pub nodes_per_dim: usize,
    /// Probability mass dropped from each tail when truncating a density.
    pub tail_mass: f64,
    /// Nodes for the innermost (conditional) integral.
    pub inner_nodes: usize,
    /// Absolute agreement required between the base and doubled rule.
    pub abs_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_dim: 96,
            tail_mass: 1e-8,
            inner_nodes: 96,
            abs_tol: 1e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_dim < 8 || self.inner_nodes < 8 {
            return Err(Error::InvalidConfig(format!(
                "need at least 8 nodes, got {} outer / {} inner",
                self.nodes_per_dim, self.inner_nodes
            )));
        }
        if !(self.tail_mass > 0.0 && self.tail_mass < 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "tail_mass must lie in (0, 1e-3), got {}",
                self.tail_mass
            )));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        Ok(())
    }

    /// The same spec with twice the nodes in every dimension.
    pub fn doubled(&self) -> Self {
        Self {
            nodes_per_dim: 2 * self.nodes_per_dim,
            inner_nodes: 2 * self.inner_nodes,
            ..*self
        }
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are roots of `P_n`, found by Newton from the Tricomi guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let c = 0.5 * (b + a);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (c + h * x, h * w))
            .collect()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).into_iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates with `spec.nodes_per_dim` nodes and again with twice as many;
/// returns the refined value when the two agree within `spec.abs_tol`.
pub fn integrate_checked<F: FnMut(f64) -> f64>(
    stage: &'static str,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    mut f: F,
) -> Result<f64> {
    let coarse = GaussLegendre::new(spec.nodes_per_dim).integrate(a, b, &mut f);
    let refined = GaussLegendre::new(2 * spec.nodes_per_dim).integrate(a, b, &mut f);
    check_refinement(stage, coarse, refined, spec)
}

pub(crate) fn check_refinement(
    stage: &'static str,
    coarse: f64,
    refined: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if (coarse - refined).abs() < spec.abs_tol && refined.is_finite() {
        Ok(refined)
    } else {
        Err(Error::Quadrature {
            stage,
            coarse,
            refined,
            nodes: 2 * spec.nodes_per_dim,
        })
    }
}

/// Bisection for a monotone predicate: returns the boundary between `lo`
/// (where `below(x)` holds) and `hi` (where it does not).
pub fn bisect<P: FnMut(f64) -> bool>(mut lo: f64, mut hi: f64, rel_tol: f64, mut below: P) -> f64 {
    for _ in 0..400 {
        if hi - lo <= rel_tol * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
