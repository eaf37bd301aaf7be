//! Best approximation of a function in the orthonormal basis.
//!
//! `c_k = ⟨f, φ_k⟩` is evaluated with a Gauss-Legendre rule on `[0, 1]`;
//! orthonormality makes the truncated expansion the least-squares optimum.

use crate::basis::OrthonormalBasis;
use crate::error::{Error, Result};
use crate::exprparse::EvalError;
use crate::linalg::Vector;
use crate::poly::Polynomial;

/// Largest supported node count.
pub const MAX_NODES: usize = 128;

/// Minimum node count used by [`default_rule`].
pub const DEFAULT_MIN_NODES: usize = 32;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Quadrature rule on `[0, 1]` with increasing nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i g(x_i)` for an infallible integrand.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

/// Basis coefficients together with a Parseval estimate of the L2 error.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub coeffs: Vector,
    pub l2_error_estimate: f64,
}

/// `P_q(t)` and `P_q'(t)` on `[-1, 1]`.
fn legendre_with_derivative(q: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    for k in 1..q {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * t * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = q as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

/// `q`-point Gauss-Legendre rule mapped to `[0, 1]`, `1 ≤ q ≤ 128`.
pub fn gauss_legendre_rule(q: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_NODES).contains(&q) {
        return Err(Error::OutOfRange {
            what: "quadrature node count",
            value: q as i64,
            min: 1,
            max: MAX_NODES as i64,
        });
    }
    if q == 1 {
        return Ok(QuadratureRule {
            nodes: vec![0.5],
            weights: vec![1.0],
        });
    }
    let qf = q as f64;
    let mut nodes = Vec::with_capacity(q);
    let mut weights = Vec::with_capacity(q);
    for i in 0..q {
        // Chebyshev-like guess for the i-th largest root.
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_with_derivative(q, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Quadrature(format!(
                "Newton iteration for root {i} of P_{q} did not converge"
            )));
        }
        let (_, dp) = legendre_with_derivative(q, t);
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes.push(0.5 * (1.0 + t));
        weights.push(0.5 * w);
    }
    nodes.reverse();
    weights.reverse();
    Ok(QuadratureRule { nodes, weights })
}

/// Rule with `max(n + 1, 32)` nodes for a degree-`n` basis.
pub fn default_rule(n: usize) -> Result<QuadratureRule> {
    gauss_legendre_rule((n + 1).max(DEFAULT_MIN_NODES))
}

/// `c_k = Σ_i w_i f(x_i) φ_k(x_i)`.
pub fn project<F>(f: F, basis: &OrthonormalBasis, rule: &QuadratureRule) -> Result<ProjectionResult>
where
    F: Fn(f64) -> std::result::Result<f64, EvalError>,
{
    let n = basis.degree();
    let mut coeffs = vec![0.0; n + 1];
    let mut norm2 = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fx = f(x).map_err(|source| Error::Evaluation { x, source })?;
        if !fx.is_finite() {
            return Err(Error::Evaluation {
                x,
                source: EvalError::new("non-finite value", "f"),
            });
        }
        norm2 += w * fx * fx;
        for (c, phi) in coeffs.iter_mut().zip(basis.eval(x).iter()) {
            *c += w * fx * phi;
        }
    }
    let captured: f64 = coeffs.iter().map(|c| c * c).sum();
    Ok(ProjectionResult {
        coeffs: Vector::new(coeffs),
        l2_error_estimate: (norm2 - captured).max(0.0).sqrt(),
    })
}

/// `Σ c_k φ_k` in monomial form.
pub fn reconstruct(coeffs: &Vector, basis: &OrthonormalBasis) -> Result<Polynomial> {
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            op: "reconstruct",
            left_rows: coeffs.len(),
            left_cols: 1,
            right_rows: basis.len(),
            right_cols: 1,
        });
    }
    Ok(basis.combine(coeffs.as_slice()))
}

/// `max |f(x_i) - g(x_i)|` over `grid_points` uniform points on `[0, 1]`,
/// endpoints included.
pub fn max_abs_error<F, G>(f: F, g: G, grid_points: usize) -> Result<f64>
where
    F: Fn(f64) -> std::result::Result<f64, EvalError>,
    G: Fn(f64) -> std::result::Result<f64, EvalError>,
{
    if grid_points < 2 {
        return Err(Error::OutOfRange {
            what: "grid points",
            value: grid_points as i64,
            min: 2,
            max: i64::MAX,
        });
    }
    let mut worst: f64 = 0.0;
    for i in 0..grid_points {
        let x = i as f64 / (grid_points - 1) as f64;
        let fx = f(x).map_err(|source| Error::Evaluation { x, source })?;
        let gx = g(x).map_err(|source| Error::Evaluation { x, source })?;
        let d = (fx - gx).abs();
        if !d.is_finite() {
            return Err(Error::Evaluation {
                x,
                source: EvalError::new("non-finite difference", "f - g"),
            });
        }
        worst = worst.max(d);
    }
    Ok(worst)
}
