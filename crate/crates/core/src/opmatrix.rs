//! Operational matrix of integration `Θ` with `∫₀^ζ φ(η) dη ≈ Θ φ(ζ)`.
//!
//! Row `i` of `Θ` expresses the antiderivative of `φ_i` in the basis:
//!
//! ```text
//! ∫₀^ζ φ_0 = ½ φ_0 + 1/(2√3) φ_1
//! ∫₀^ζ φ_i = -1/(2√((2i-1)(2i+1))) φ_{i-1} + 1/(2√((2i+1)(2i+3))) φ_{i+1}
//! ```
//!
//! Row `n` drops its `φ_{n+1}` term, so the identity is exact for rows
//! `0..n` and truncated in the last row. [`spill_coefficient`] gives the
//! dropped weight.

use crate::error::{Error, Result};
use crate::linalg::{mat_mul, Matrix};

pub const MAX_DEGREE: usize = crate::basis::MAX_DEGREE;

/// `Θ` for the basis `φ_0..φ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationalMatrix {
    n: usize,
    theta: Matrix,
}

/// Upper off-diagonal entry `θ[i][i+1] = 1/(2√((2i+1)(2i+3)))`.
pub fn spill_coefficient(i: usize) -> f64 {
    let a = (2 * i + 1) as f64;
    0.5 / (a * (a + 2.0)).sqrt()
}

/// Builds `Θ` from its closed form, `1 ≤ n ≤ 30`.
pub fn build_theta(n: usize) -> Result<OperationalMatrix> {
    if !(1..=MAX_DEGREE).contains(&n) {
        return Err(Error::OutOfRange {
            what: "operational matrix degree",
            value: n as i64,
            min: 1,
            max: MAX_DEGREE as i64,
        });
    }
    let mut theta = Matrix::zeros(n + 1, n + 1);
    theta[(0, 0)] = 0.5;
    for i in 0..=n {
        if i < n {
            theta[(i, i + 1)] = spill_coefficient(i);
        }
        if i >= 1 {
            theta[(i, i - 1)] = -spill_coefficient(i - 1);
        }
    }
    Ok(OperationalMatrix { n, theta })
}

impl OperationalMatrix {
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.theta
    }

    /// `Θ^k` by repeated multiplication; `Θ^0 = I`.
    pub fn power(&self, k: usize) -> Matrix {
        theta_power(self, k)
    }
}

pub fn theta_power(m: &OperationalMatrix, k: usize) -> Matrix {
    let mut acc = Matrix::identity(m.n + 1);
    for _ in 0..k {
        acc = mat_mul(&acc, &m.theta).expect("square matrices of equal size");
    }
    acc
}
