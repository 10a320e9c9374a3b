//! Gauss rules on finite intervals with optional inverse-square-root
//! endpoint weights absorbed into the quadrature weights.
//!
//! The singular rules are Gauss-Jacobi rules with exponents in {0, -1/2},
//! built by the Golub-Welsch algorithm. They integrate
//! `f(x) * (x-a)^(-1/2 or 0) * (b-x)^(-1/2 or 0)` exactly for polynomial `f`
//! up to the rule's degree, which is what every band integral with
//! square-root edge behavior needs.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Which endpoints of the interval carry a `|x - endpoint|^(-1/2)` weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SingularEnds {
    pub left: bool,
    pub right: bool,
}

impl SingularEnds {
    pub const NONE: Self = Self { left: false, right: false };
    pub const LEFT: Self = Self { left: true, right: false };
    pub const RIGHT: Self = Self { left: false, right: true };
    pub const BOTH: Self = Self { left: true, right: true };
}

/// A fixed quadrature rule on `(a, b)` with the endpoint weight absorbed.
///
/// `integrate(f)` approximates `∫_a^b f(x) ω(x) dx` where `ω` is the declared
/// endpoint weight; `f` is sampled at the interior nodes only.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interval: (f64, f64),
    singular_ends: SingularEnds,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn singular_ends(&self) -> SingularEnds {
        self.singular_ends
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Integrate a full integrand `h` that already contains the singular
    /// endpoint factors: approximates `∫ h(x) dx` via `Σ w_i h(x_i) / ω(x_i)`.
    pub fn integrate_singular<F: FnMut(f64) -> f64>(&self, mut h: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * self.strip_factor(x) * h(x))
            .sum()
    }

    /// `1/ω(x)`: multiply a full integrand value by this to recover the
    /// smooth part the rule weights expect.
    pub fn strip_factor(&self, x: f64) -> f64 {
        let (a, b) = self.interval;
        let mut s = 1.0;
        if self.singular_ends.left {
            s *= (x - a).sqrt();
        }
        if self.singular_ends.right {
            s *= (b - x).sqrt();
        }
        s
    }
}

/// Build an `n`-point Gauss rule on `(a, b)` whose weights absorb the declared
/// inverse-square-root endpoint factors.
pub fn gauss_band_rule(interval: (f64, f64), n: usize, singular_ends: SingularEnds) -> Result<QuadratureRule> {
    let (a, b) = interval;
    if !(a < b) {
        return Err(Error::DegenerateInterval(a));
    }
    if n < 2 {
        return Err(Error::QuadratureDegree(n));
    }
    // (1-x)^alpha (1+x)^beta on (-1,1); right endpoint maps to x=1.
    let alpha = if singular_ends.right { -0.5 } else { 0.0 };
    let beta = if singular_ends.left { -0.5 } else { 0.0 };
    let (xs, ws) = jacobi_nodes_weights(n, alpha, beta);

    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // ∫_a^b f(λ) (λ-a)^β (b-λ)^α dλ = half^(α+β+1) ∫_{-1}^1 f(x) (1-x)^α (1+x)^β dx
    let scale = half.powf(alpha + beta + 1.0);
    let nodes: Vec<f64> = xs.iter().map(|&x| mid + half * x).collect();
    let weights: Vec<f64> = ws.iter().map(|&w| w * scale).collect();
    Ok(QuadratureRule { nodes, weights, interval, singular_ends })
}

/// Golub-Welsch nodes and weights for the Jacobi weight (1-x)^α (1+x)^β
/// with α, β ∈ {0, -1/2}.
fn jacobi_nodes_weights(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    let mut diag = (beta - alpha) / (2.0 + alpha + beta);
    for i in 0..n - 1 {
        let k = (i + 1) as f64;
        let denom = 2.0 * k + alpha + beta;
        // At k=1 with α+β=-1 the generic formula is 0/0; the limit replaces
        // (k+α+β)/(denom-1) by 1/2.
        let off = if i == 0 && (alpha + beta + 1.0).abs() < 1e-14 {
            (2.0 / denom) * (k * (k + alpha) * (k + beta) * 0.5 / (denom + 1.0)).sqrt()
        } else {
            (2.0 / denom)
                * (k * (k + alpha) * (k + beta) * (k + alpha + beta)
                    / ((denom + 1.0) * (denom - 1.0)))
                    .sqrt()
        };
        jac[(i, i)] = diag;
        jac[(i, i + 1)] = off;
        jac[(i + 1, i)] = off;
        diag = (beta * beta - alpha * alpha) / (denom * (denom + 2.0));
    }
    jac[(n - 1, n - 1)] = diag;

    let eigen = jac.symmetric_eigen();
    let mu0 = moment_zero(alpha, beta);
    let mut pairs: Vec<(f64, f64)> = eigen
        .eigenvalues
        .iter()
        .copied()
        .zip(eigen.eigenvectors.row(0).iter().map(|v| v * v * mu0))
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    pairs.into_iter().unzip()
}

/// ∫_{-1}^1 (1-x)^α (1+x)^β dx for the four supported exponent pairs.
fn moment_zero(alpha: f64, beta: f64) -> f64 {
    let sing_a = alpha < -0.25;
    let sing_b = beta < -0.25;
    match (sing_a, sing_b) {
        (false, false) => 2.0,
        (true, true) => std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::SQRT_2,
    }
}
