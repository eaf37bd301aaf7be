//! Dense univariate polynomials and the classical Bernoulli polynomials.
//!
//! Coefficients are stored in ascending order: `coeffs[k]` multiplies `ζ^k`.
//! Printed formulas usually list the highest power first; reverse the slice
//! to get that layout.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, ExactPoly};

/// Largest index accepted by the Bernoulli generators.
pub const MAX_BERNOULLI_INDEX: usize = 30;

/// Real polynomial in monomial form.
///
/// Trailing zero coefficients are trimmed on construction, so the reported
/// degree always has a nonzero leading coefficient (the zero polynomial has
/// degree 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// `c · ζ^k`
    pub fn monomial(k: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Polynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `ζ^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Compensated Horner evaluation (Graillat, Langlois and Louvet).
    ///
    /// The rounding error of every multiply and add is captured exactly and
    /// folded back in, so the result is as accurate as plain Horner run in
    /// twice the working precision. Use this for high-degree polynomials
    /// with large alternating coefficients.
    pub fn eval_compensated(&self, x: f64) -> f64 {
        let mut s = 0.0f64;
        let mut c = 0.0f64;
        for &a in self.coeffs.iter().rev() {
            let p = s * x;
            let pi = s.mul_add(x, -p);
            let t = p + a;
            let bb = t - p;
            let sigma = (p - (t - bb)) + (a - bb);
            s = t;
            c = c.mul_add(x, pi + sigma);
        }
        s + c
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..len).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn multiply(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn differentiate(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, order: usize) -> Polynomial {
        (0..order).fold(self.clone(), |p, _| p.differentiate())
    }

    /// Antiderivative with zero constant term.
    pub fn integrate(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k as f64 + 1.0)),
        );
        Polynomial::new(out)
    }

    /// `p(scale · x + shift)` as a polynomial in `x`.
    pub fn compose_affine(&self, scale: f64, shift: f64) -> Polynomial {
        let inner = Polynomial::new(vec![shift, scale]);
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::zero(), |acc, &c| {
                acc.multiply(&inner).add(&Polynomial::constant(c))
            })
    }

    pub(crate) fn to_exact(&self) -> ExactPoly {
        ExactPoly::from_f64(&self.coeffs)
    }

    pub(crate) fn from_exact(p: &ExactPoly) -> Polynomial {
        Polynomial::new(p.to_f64_vec())
    }
}

fn check_bernoulli_index(n: usize) -> Result<()> {
    if n > MAX_BERNOULLI_INDEX {
        return Err(Error::OutOfRange {
            what: "Bernoulli index",
            value: n as i64,
            min: 0,
            max: MAX_BERNOULLI_INDEX as i64,
        });
    }
    Ok(())
}

/// Exact `B_n(0)` by Kronecker's alternating double sum.
///
/// Kronecker's sum yields the `B_1 = +1/2` convention (it equals `B_n(1)`);
/// the polynomial family needs `B_1(0) = -1/2`, so that single index is
/// negated. All other indices agree between the two conventions.
pub(crate) fn bernoulli_number_exact(n: usize) -> BigRational {
    let mut total = BigRational::zero();
    let mut power_sum = BigInt::zero();
    for j in 1..=n + 1 {
        power_sum += BigInt::from(j).pow(n as u32);
        let term = BigRational::new(
            rational::binomial(n as u64 + 1, j as u64) * &power_sum,
            BigInt::from(j),
        );
        if j % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    let b = -total;
    if n == 1 {
        -b
    } else {
        b
    }
}

/// Bernoulli number `B_n(0)` for `0 ≤ n ≤ 30`, with `B_1 = -1/2`.
pub fn bernoulli_number(n: usize) -> Result<f64> {
    check_bernoulli_index(n)?;
    Ok(rational::to_f64(&bernoulli_number_exact(n)))
}

pub(crate) fn bernoulli_polynomial_exact(n: usize) -> ExactPoly {
    let mut coeffs = vec![BigRational::zero(); n + 1];
    for j in 0..=n {
        let binom = BigRational::from_integer(rational::binomial(n as u64, j as u64));
        coeffs[n - j] = binom * bernoulli_number_exact(j);
    }
    debug_assert!(coeffs[n] == BigRational::one());
    ExactPoly(coeffs)
}

/// Classical Bernoulli polynomial `B_n(ζ) = Σ_j C(n,j) b_j ζ^(n-j)`.
pub fn bernoulli_polynomial(n: usize) -> Result<Polynomial> {
    check_bernoulli_index(n)?;
    Ok(Polynomial::from_exact(&bernoulli_polynomial_exact(n)))
}
