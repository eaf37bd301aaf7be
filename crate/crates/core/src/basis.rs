//! Orthonormal polynomial basis on `[0, 1]` obtained by Gram-Schmidt on the
//! Bernoulli polynomials.
//!
//! The resulting `φ_k` coincide with the normalized shifted Legendre
//! polynomials `√(2k+1)·P_k(2ζ-1)`, which gives an independent second
//! construction ([`legendre_basis`]) and a stable three-term recurrence for
//! pointwise evaluation ([`OrthonormalBasis::eval`]).
//!
//! Monomial coefficients of `φ_k` grow like `6^k`, so each basis function is
//! held exactly as `scale_k · q_k` with `q_k` a primitive integer polynomial.
//! The `f64` monomial view ([`OrthonormalBasis::phi`]) is rounded from that
//! form; orthonormality checks and monomial conversion go through the exact
//! form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::poly::{self, Polynomial};
use crate::rational::{self, ExactPoly};

/// Largest truncation degree supported by the basis constructors.
pub const MAX_DEGREE: usize = 30;

/// `⟨f, g⟩ = ∫₀¹ f g`, evaluated exactly on the given coefficients and
/// rounded once at the end.
pub fn inner_product(f: &Polynomial, g: &Polynomial) -> f64 {
    rational::to_f64(&rational::inner_product(&f.to_exact(), &g.to_exact()))
}

/// The orthonormal set `φ_0..φ_n` with monomial conversion data.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    n: usize,
    primitive: Vec<ExactPoly>,
    scales: Vec<f64>,
    phis: Vec<Polynomial>,
    mono_to_basis: Matrix,
    basis_to_mono: Matrix,
}

impl OrthonormalBasis {
    fn from_primitive(primitive: Vec<ExactPoly>, scales: Vec<f64>) -> Result<Self> {
        let n = primitive.len() - 1;
        let phis: Vec<Polynomial> = primitive
            .iter()
            .zip(&scales)
            .map(|(q, s)| Polynomial::new(q.to_f64_vec().into_iter().map(|c| c * s).collect()))
            .collect();

        let mut basis_to_mono = Matrix::zeros(n + 1, n + 1);
        for (k, phi) in phis.iter().enumerate() {
            for i in 0..=k {
                basis_to_mono[(k, i)] = phi.coeff(i);
            }
        }

        // Forward substitution on the exact lower-triangular coefficient
        // matrix: ζ^p = (q_p - Σ_{i<p} q_p[i] ζ^i) / q_p[p].
        let mut inverse: Vec<Vec<BigRational>> = Vec::with_capacity(n + 1);
        for p in 0..=n {
            let diag = primitive[p].coeff(p);
            if diag.is_zero() {
                return Err(Error::BasisConstruction {
                    index: p,
                    reason: "zero diagonal in monomial conversion".into(),
                });
            }
            let mut row = vec![BigRational::zero(); n + 1];
            row[p] = BigRational::one();
            for (i, prev) in inverse.iter().enumerate() {
                let c = primitive[p].coeff(i);
                if c.is_zero() {
                    continue;
                }
                for (r, v) in row.iter_mut().zip(prev) {
                    *r -= &c * v;
                }
            }
            for r in row.iter_mut() {
                *r /= &diag;
            }
            inverse.push(row);
        }
        let mut mono_to_basis = Matrix::zeros(n + 1, n + 1);
        for p in 0..=n {
            for k in 0..=p {
                mono_to_basis[(p, k)] = rational::to_f64(&inverse[p][k]) / scales[k];
            }
        }

        Ok(OrthonormalBasis {
            n,
            primitive,
            scales,
            phis,
            mono_to_basis,
            basis_to_mono,
        })
    }

    /// Truncation degree `n`; the basis has `n + 1` members.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `φ_k` in monomial form (rounded to `f64`).
    pub fn phi(&self, k: usize) -> &Polynomial {
        &self.phis[k]
    }

    pub fn phis(&self) -> &[Polynomial] {
        &self.phis
    }

    /// Normalising factor `s_k` with `φ_k = s_k · q_k`.
    pub fn scale(&self, k: usize) -> f64 {
        self.scales[k]
    }

    /// Primitive integer polynomial `q_k`, rounded to `f64`.
    pub fn primitive(&self, k: usize) -> Polynomial {
        Polynomial::from_exact(&self.primitive[k])
    }

    /// `T` with `ζ^p = Σ_k T[p][k] φ_k`, rows `p = 0..=n`.
    pub fn mono_to_basis(&self) -> &Matrix {
        &self.mono_to_basis
    }

    /// Inverse of [`Self::mono_to_basis`]: row `k` holds the monomial
    /// coefficients of `φ_k`.
    pub fn basis_to_mono(&self) -> &Matrix {
        &self.basis_to_mono
    }

    /// Basis coefficients `⟨ζ^p, φ_k⟩` for any power `p`.
    ///
    /// For `p ≤ n` this is row `p` of [`Self::mono_to_basis`]; above the
    /// degree it is the best approximation of `ζ^p` in the span.
    pub fn monomial_coefficients(&self, p: usize) -> Vector {
        if p <= self.n {
            return Vector::new(self.mono_to_basis.row(p).to_vec());
        }
        let mut mono = vec![BigRational::zero(); p + 1];
        mono[p] = BigRational::one();
        let mono = ExactPoly(mono);
        Vector::new(
            self.primitive
                .iter()
                .zip(&self.scales)
                .map(|(q, s)| rational::to_f64(&rational::inner_product(&mono, q)) * s)
                .collect(),
        )
    }

    /// `(J^t φ_k)(1)` for `k = 0..=n`, where `J f(ζ) = ∫₀^ζ f`.
    ///
    /// Uses `(J^t ζ^i)(1) = i! / (i+t)!` on the exact coefficients. For
    /// `t ≥ 1` this agrees with `(Θ^(t-1) e_0)_k` whenever `t - 1 ≤ n`.
    pub fn repeated_integral_at_one(&self, t: usize) -> Vector {
        Vector::new(
            self.primitive
                .iter()
                .zip(&self.scales)
                .map(|(q, s)| {
                    let mut acc = BigRational::zero();
                    for (i, c) in q.0.iter().enumerate() {
                        let falling =
                            (i + 1..=i + t).fold(BigInt::one(), |a, j| a * BigInt::from(j));
                        acc += c / BigRational::from_integer(falling);
                    }
                    rational::to_f64(&acc) * s
                })
                .collect(),
        )
    }

    /// Gram matrix `⟨φ_i, φ_j⟩` computed exactly from the `scale · q` form.
    pub fn gram_matrix(&self) -> Matrix {
        let mut g = Matrix::zeros(self.n + 1, self.n + 1);
        for i in 0..=self.n {
            for j in 0..=i {
                let ip = rational::inner_product(&self.primitive[i], &self.primitive[j]);
                let v = rational::to_f64(&ip) * self.scales[i] * self.scales[j];
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    /// Values `φ_0(x)..φ_n(x)` by the shifted Legendre three-term recurrence.
    pub fn eval(&self, x: f64) -> Vector {
        eval_basis(self.n, x)
    }

    /// Polynomial `Σ c_k φ_k` in monomial form.
    ///
    /// The sum is formed exactly from the `f64` values of `c_k` and `s_k`
    /// and rounded once per coefficient; the monomial terms cancel heavily
    /// for large `k`.
    pub fn combine(&self, coeffs: &[f64]) -> Polynomial {
        Polynomial::from_exact(&self.combine_exact(coeffs))
    }

    pub(crate) fn combine_exact(&self, coeffs: &[f64]) -> ExactPoly {
        let mut out = ExactPoly(vec![BigRational::zero(); self.n + 1]);
        for (k, &c) in coeffs.iter().enumerate().take(self.n + 1) {
            if c == 0.0 {
                continue;
            }
            let w = rational::from_f64(c) * rational::from_f64(self.scales[k]);
            out = out.axpy(&w, &self.primitive[k]);
        }
        out
    }
}

/// `φ_0(x)..φ_n(x)` for the orthonormal shifted Legendre family.
pub fn eval_basis(n: usize, x: f64) -> Vector {
    let t = 2.0 * x - 1.0;
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = t;
    }
    for k in 1..n {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * t * p[k] - kf * p[k - 1]) / (kf + 1.0);
    }
    Vector::new(
        p.into_iter()
            .enumerate()
            .map(|(k, v)| v * (2.0 * k as f64 + 1.0).sqrt())
            .collect(),
    )
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::OutOfRange {
            what: "basis degree",
            value: n as i64,
            min: 0,
            max: MAX_DEGREE as i64,
        });
    }
    Ok(())
}

/// Orthonormalises `B_0..B_n` under `⟨f, g⟩ = ∫₀¹ f g`.
///
/// Modified Gram-Schmidt runs in exact rational arithmetic, so no
/// re-orthogonalization is needed; orthogonality is checked exactly after
/// construction. Each `φ_k` has a positive leading coefficient.
pub fn gram_schmidt_basis(n: usize) -> Result<OrthonormalBasis> {
    check_degree(n)?;
    let inputs: Vec<ExactPoly> = (0..=n).map(poly::bernoulli_polynomial_exact).collect();
    let (primitive, norms) = gram_schmidt(&inputs)?;
    let scales = norms
        .iter()
        .map(|nsq| 1.0 / rational::to_f64(nsq).sqrt())
        .collect();
    OrthonormalBasis::from_primitive(primitive, scales)
}

/// Exact modified Gram-Schmidt. Returns primitive integer polynomials with
/// positive leading coefficient and their squared norms.
pub(crate) fn gram_schmidt(inputs: &[ExactPoly]) -> Result<(Vec<ExactPoly>, Vec<BigRational>)> {
    let mut out: Vec<ExactPoly> = Vec::with_capacity(inputs.len());
    let mut norms: Vec<BigRational> = Vec::with_capacity(inputs.len());
    for (k, v) in inputs.iter().enumerate() {
        let mut w = v.clone();
        for (q, nsq) in out.iter().zip(&norms) {
            let coef = rational::inner_product(&w, q) / nsq;
            if !coef.is_zero() {
                w = w.axpy(&-coef, q);
            }
        }
        if w.leading().is_none() {
            return Err(Error::BasisConstruction {
                index: k,
                reason: "input is linearly dependent on earlier members".into(),
            });
        }
        let w = w.primitive();
        for (j, q) in out.iter().enumerate() {
            if !rational::inner_product(&w, q).is_zero() {
                return Err(Error::BasisConstruction {
                    index: k,
                    reason: format!("lost orthogonality against member {j}"),
                });
            }
        }
        let nsq = rational::inner_product(&w, &w);
        if !nsq.is_positive() {
            return Err(Error::BasisConstruction {
                index: k,
                reason: "non-positive norm".into(),
            });
        }
        out.push(w);
        norms.push(nsq);
    }
    Ok((out, norms))
}

/// Normalized shifted Legendre polynomials `√(2k+1)·P_k(2ζ-1)` built from
/// `(k+1)P_{k+1} = (2k+1)(2ζ-1)P_k - k P_{k-1}`.
pub fn legendre_basis(n: usize) -> Result<OrthonormalBasis> {
    check_degree(n)?;
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let shift = ExactPoly(vec![int(-1), int(2)]);
    let mut polys = vec![ExactPoly(vec![int(1)])];
    if n >= 1 {
        polys.push(shift.clone());
    }
    for k in 1..n {
        let kk = k as i64;
        let prod = multiply(&shift, &polys[k]).scale(&int(2 * kk + 1));
        let next = prod
            .axpy(&-int(kk), &polys[k - 1])
            .scale(&BigRational::new(BigInt::one(), BigInt::from(kk + 1)));
        polys.push(next);
    }
    let scales = (0..=n).map(|k| (2.0 * k as f64 + 1.0).sqrt()).collect();
    OrthonormalBasis::from_primitive(polys, scales)
}

fn multiply(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.0.iter().enumerate() {
        for (j, y) in b.0.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    ExactPoly(out)
}
