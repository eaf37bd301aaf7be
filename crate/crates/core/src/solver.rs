//! Linear constant-coefficient boundary value problems
//!
//! ```text
//! a_m y^(m) + ... + a_1 y' + a_0 y = r(x),   x ∈ [x0, x1]
//! ```
//!
//! with `m` conditions `y^(d)(x0) = v` or `y^(d)(x1) = v`.
//!
//! After mapping to `[0, 1]` and normalizing `a_m = 1`, the highest
//! derivative is expanded as `ŷ^(m) = Cᵀφ` and lower derivatives follow by
//! integration:
//!
//! ```text
//! ŷ^(i)(ζ) = Cᵀ Θ^(m-i) φ(ζ) + Σ_{j=i}^{m-1} γ_j ζ^(j-i) / (j-i)!,   γ_j = ŷ^(j)(0).
//! ```
//!
//! Matching basis coefficients of the ODE gives `n + 1` equations; each
//! right-side condition adds one more, and each left-side condition fixes a
//! `γ` outright. The unknowns are `C` together with the `γ_j` not fixed on
//! the left.
//!
//! The returned polynomial integrates `Cᵀφ` exactly `m` times, so it has
//! degree `n + m` and meets left conditions exactly.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::approx::{default_rule, project};
use crate::basis::{gram_schmidt_basis, OrthonormalBasis};
use crate::error::{Error, Result};
use crate::exprparse::EvalError;
use crate::linalg::{solve_linear, Matrix, Vector};
use crate::opmatrix::{build_theta, OperationalMatrix};
use crate::poly::Polynomial;
use crate::rational;

/// Points used for [`BvpSolution::residual_max`].
pub const RESIDUAL_POINTS: usize = 201;

/// `residual_max` above `DIVERGENCE_FACTOR · (1 + max|r|)` flags divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e3;

/// Right-hand side `r(x)`.
pub type Rhs = Arc<dyn Fn(f64) -> std::result::Result<f64, EvalError> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// `y^(order)` at the left or right end of the domain equals `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    pub side: Side,
    pub order: usize,
    pub value: f64,
}

impl BoundaryCondition {
    pub fn new(side: Side, order: usize, value: f64) -> Self {
        BoundaryCondition { side, order, value }
    }
}

/// A validated problem.
#[derive(Clone)]
pub struct BvpProblem {
    coefficients: Vec<f64>,
    rhs: Rhs,
    domain: (f64, f64),
    bcs: Vec<BoundaryCondition>,
    n: usize,
}

impl fmt::Debug for BvpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BvpProblem")
            .field("coefficients", &self.coefficients)
            .field("domain", &self.domain)
            .field("bcs", &self.bcs)
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

impl BvpProblem {
    /// `coefficients` are `a_0..a_m` in ascending derivative order.
    pub fn new<F>(
        coefficients: Vec<f64>,
        rhs: F,
        domain: (f64, f64),
        bcs: Vec<BoundaryCondition>,
        n: usize,
    ) -> Result<Self>
    where
        F: Fn(f64) -> std::result::Result<f64, EvalError> + Send + Sync + 'static,
    {
        Self::with_rhs(coefficients, Arc::new(rhs), domain, bcs, n)
    }

    pub fn with_rhs(
        coefficients: Vec<f64>,
        rhs: Rhs,
        domain: (f64, f64),
        bcs: Vec<BoundaryCondition>,
        n: usize,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidProblem(msg));
        if coefficients.len() < 2 {
            return invalid("order must be at least 1".into());
        }
        let m = coefficients.len() - 1;
        if coefficients.iter().any(|a| !a.is_finite()) {
            return invalid("coefficients must be finite".into());
        }
        if coefficients[m] == 0.0 {
            return invalid(format!("leading coefficient a_{m} is zero"));
        }
        let (x0, x1) = domain;
        if !(x0.is_finite() && x1.is_finite() && x0 < x1) {
            return invalid(format!("domain [{x0}, {x1}] must be finite with x0 < x1"));
        }
        if bcs.len() != m {
            return invalid(format!(
                "order {m} needs {m} boundary conditions, got {}",
                bcs.len()
            ));
        }
        for (i, bc) in bcs.iter().enumerate() {
            if bc.order >= m {
                return invalid(format!(
                    "boundary condition on derivative {} is not below the order {m}",
                    bc.order
                ));
            }
            if !bc.value.is_finite() {
                return invalid("boundary values must be finite".into());
            }
            if bcs[..i]
                .iter()
                .any(|o| o.side == bc.side && o.order == bc.order)
            {
                return invalid(format!(
                    "duplicate boundary condition: {} derivative {}",
                    bc.side, bc.order
                ));
            }
        }
        if !(1..=crate::basis::MAX_DEGREE).contains(&n) {
            return Err(Error::OutOfRange {
                what: "truncation degree n",
                value: n as i64,
                min: 1,
                max: crate::basis::MAX_DEGREE as i64,
            });
        }
        Ok(BvpProblem {
            coefficients,
            rhs,
            domain,
            bcs,
            n,
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn bcs(&self) -> &[BoundaryCondition] {
        &self.bcs
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }

    pub fn eval_rhs(&self, x: f64) -> Result<f64> {
        let v = (self.rhs)(x).map_err(|source| Error::Evaluation { x, source })?;
        if !v.is_finite() {
            return Err(Error::Evaluation {
                x,
                source: EvalError::new("non-finite value", "rhs"),
            });
        }
        Ok(v)
    }

    /// Same problem with a different truncation degree.
    pub fn with_truncation(&self, n: usize) -> Result<Self> {
        Self::with_rhs(
            self.coefficients.clone(),
            self.rhs.clone(),
            self.domain,
            self.bcs.clone(),
            n,
        )
    }

    fn is_normalized(&self) -> bool {
        self.domain == (0.0, 1.0) && self.coefficients[self.order()] == 1.0
    }
}

/// Equivalent problem on `[0, 1]` with leading coefficient 1.
///
/// With `h = x1 - x0`, `a_k` becomes `a_k h^-k`, the right-hand side becomes
/// `r(x0 + hζ)`, and a condition on derivative `d` is scaled by `h^d`. The
/// equation is then divided by its leading coefficient.
pub fn map_domain(p: &BvpProblem) -> BvpProblem {
    if p.is_normalized() {
        return p.clone();
    }
    let (x0, x1) = p.domain;
    let h = x1 - x0;
    let m = p.order();
    let scaled: Vec<f64> = p
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, a)| a / h.powi(k as i32))
        .collect();
    let lead = scaled[m];
    let coefficients = scaled.iter().map(|a| a / lead).collect();
    let inner = p.rhs.clone();
    let rhs: Rhs = if (x0, h) == (0.0, 1.0) {
        Arc::new(move |z| inner(z).map(|v| v / lead))
    } else {
        Arc::new(move |z| inner(x0 + h * z).map(|v| v / lead))
    };
    let bcs = p
        .bcs
        .iter()
        .map(|bc| BoundaryCondition {
            value: bc.value * h.powi(bc.order as i32),
            ..*bc
        })
        .collect();
    BvpProblem {
        coefficients,
        rhs,
        domain: (0.0, 1.0),
        bcs,
        n: p.n,
    }
}

/// The joint linear system in `(C, γ_free)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: Matrix,
    pub rhs: Vector,
    /// Indices `j` of the `γ_j` that are unknowns, in column order after `C`.
    pub free_gammas: Vec<usize>,
    /// `γ_j` fixed by a left condition, `None` if free.
    pub fixed_gammas: Vec<Option<f64>>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Builds the joint system for a normalized problem (domain `[0, 1]`,
/// leading coefficient 1).
pub fn assemble(
    p: &BvpProblem,
    basis: &OrthonormalBasis,
    theta: &OperationalMatrix,
) -> Result<LinearSystem> {
    if !p.is_normalized() {
        return Err(Error::InvalidProblem(
            "assemble needs a problem on [0, 1] with leading coefficient 1".into(),
        ));
    }
    let n = p.n;
    if basis.degree() != n || theta.degree() != n {
        return Err(Error::InvalidProblem(format!(
            "basis degree {} and operational matrix degree {} must equal n = {n}",
            basis.degree(),
            theta.degree()
        )));
    }
    let m = p.order();
    let a = &p.coefficients;

    let mut fixed_gammas = vec![None; m];
    for bc in p.bcs.iter().filter(|bc| bc.side == Side::Left) {
        fixed_gammas[bc.order] = Some(bc.value);
    }
    let free_gammas: Vec<usize> = (0..m).filter(|&j| fixed_gammas[j].is_none()).collect();
    let size = n + 1 + free_gammas.len();
    if n + 1 + p.bcs.iter().filter(|bc| bc.side == Side::Right).count() != size {
        unreachable!("one equation per right condition, one unknown per free γ");
    }

    let mut matrix = Matrix::zeros(size, size);
    let mut rhs = vec![0.0; size];

    // Σ_i a_i (Θ^(m-i))ᵀ with a_m = 1 contributing the identity.
    let mut power = Matrix::identity(n + 1);
    for i in (0..=m).rev() {
        for r in 0..=n {
            for c in 0..=n {
                matrix[(r, c)] += a[i] * power[(c, r)];
            }
        }
        if i > 0 {
            power = crate::linalg::mat_mul(&power, theta.matrix())?;
        }
    }

    // γ_j multiplies Σ_{i≤j} a_i ζ^(j-i)/(j-i)!.
    let mono: Vec<Vector> = (0..m).map(|q| basis.monomial_coefficients(q)).collect();
    let gamma_column = |j: usize| -> Vec<f64> {
        let mut col = vec![0.0; n + 1];
        for i in 0..=j {
            let w = a[i] / factorial(j - i);
            if w != 0.0 {
                for (c, t) in col.iter_mut().zip(mono[j - i].iter()) {
                    *c += w * t;
                }
            }
        }
        col
    };

    let projected = project(|x| (p.rhs)(x), basis, &default_rule(n)?)?;
    rhs[..=n].copy_from_slice(projected.coeffs.as_slice());
    for (j, fixed) in fixed_gammas.iter().enumerate() {
        let col = gamma_column(j);
        match *fixed {
            Some(g) => {
                for (r, c) in rhs.iter_mut().zip(&col) {
                    *r -= g * c;
                }
            }
            None => {
                let k = n + 1 + free_gammas.iter().position(|&f| f == j).unwrap();
                for (r, c) in col.iter().enumerate() {
                    matrix[(r, k)] = *c;
                }
            }
        }
    }

    // y^(d)(1) = (J^(m-d) Cᵀφ)(1) + Σ_{j≥d} γ_j / (j-d)!.
    let rights = p.bcs.iter().filter(|bc| bc.side == Side::Right);
    for (row, bc) in (n + 1..).zip(rights) {
        let d = bc.order;
        let ends = basis.repeated_integral_at_one(m - d);
        for (c, v) in ends.iter().enumerate() {
            matrix[(row, c)] = *v;
        }
        rhs[row] = bc.value;
        for (j, fixed) in fixed_gammas.iter().enumerate().skip(d) {
            let w = 1.0 / factorial(j - d);
            match *fixed {
                Some(g) => rhs[row] -= g * w,
                None => {
                    let k = n + 1 + free_gammas.iter().position(|&f| f == j).unwrap();
                    matrix[(row, k)] = w;
                }
            }
        }
    }

    Ok(LinearSystem {
        matrix,
        rhs: Vector::new(rhs),
        free_gammas,
        fixed_gammas,
    })
}

/// Result of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct BvpSolution {
    /// Coefficients of `ŷ^(m) = Cᵀφ`.
    pub c: Vector,
    /// `γ_j = ŷ^(j)(0)` in mapped coordinates, `j = 0..m-1`.
    pub gammas: Vector,
    /// Approximation in the original variable `x`.
    pub solution_poly: Polynomial,
    /// Approximation in `ζ = (x - x0)/h`.
    pub mapped_poly: Polynomial,
    /// `max |Σ a_i ŷ^(i) - r|` on the mapped, normalized equation.
    pub residual_max: f64,
    /// Largest boundary condition violation in the original variable.
    pub bc_residual_max: f64,
    /// Set when `residual_max` exceeds `1e3 · (1 + max|r|)`.
    pub diverged: bool,
}

/// `J^m(Cᵀφ) + Σ γ_j ζ^j / j!`, accumulated exactly and rounded once.
fn reconstruct_mapped(c: &Vector, gammas: &[f64], basis: &OrthonormalBasis) -> Polynomial {
    let m = gammas.len();
    let inner = basis.combine_exact(c.as_slice());
    let mut out = vec![BigRational::zero(); inner.len() + m];
    for (i, v) in inner.0.iter().enumerate() {
        let falling = (i + 1..=i + m).fold(BigInt::one(), |a, j| a * BigInt::from(j));
        out[i + m] = v / BigRational::from_integer(falling);
    }
    for (j, g) in gammas.iter().enumerate() {
        let fact = (1..=j).fold(BigInt::one(), |a, i| a * BigInt::from(i));
        out[j] += rational::from_f64(*g) / BigRational::from_integer(fact);
    }
    Polynomial::new(out.iter().map(rational::to_f64).collect())
}

fn finish(
    original: &BvpProblem,
    mapped: &BvpProblem,
    c: Vector,
    gammas: Vec<f64>,
    basis: &OrthonormalBasis,
) -> Result<BvpSolution> {
    let mapped_poly = reconstruct_mapped(&c, &gammas, basis);
    let (x0, x1) = original.domain;
    let h = x1 - x0;
    let solution_poly = if (x0, h) == (0.0, 1.0) {
        mapped_poly.clone()
    } else {
        mapped_poly.compose_affine(1.0 / h, -x0 / h)
    };

    let m = mapped.order();
    let derivs: Vec<Polynomial> = (0..=m).map(|i| mapped_poly.nth_derivative(i)).collect();
    let mut residual_max: f64 = 0.0;
    let mut rhs_max: f64 = 0.0;
    for k in 0..RESIDUAL_POINTS {
        let z = k as f64 / (RESIDUAL_POINTS - 1) as f64;
        let r = mapped.eval_rhs(z)?;
        let lhs: f64 = mapped
            .coefficients
            .iter()
            .zip(&derivs)
            .map(|(a, d)| a * d.eval(z))
            .sum();
        residual_max = residual_max.max((lhs - r).abs());
        rhs_max = rhs_max.max(r.abs());
    }

    let bc_residual_max = original
        .bcs
        .iter()
        .map(|bc| {
            let x = match bc.side {
                Side::Left => x0,
                Side::Right => x1,
            };
            (solution_poly.nth_derivative(bc.order).eval(x) - bc.value).abs()
        })
        .fold(0.0, f64::max);

    Ok(BvpSolution {
        c,
        gammas: Vector::new(gammas),
        solution_poly,
        mapped_poly,
        residual_max,
        bc_residual_max,
        diverged: residual_max.is_nan() || residual_max > DIVERGENCE_FACTOR * (1.0 + rhs_max),
    })
}

fn ill_posed(e: Error) -> Error {
    match e {
        Error::SingularMatrix { column } => Error::IllPosed { column },
        other => other,
    }
}

/// Solves `p` by the joint `(C, γ)` system.
pub fn solve(p: &BvpProblem) -> Result<BvpSolution> {
    let mapped = map_domain(p);
    let basis = gram_schmidt_basis(p.n)?;
    let theta = build_theta(p.n)?;
    let sys = assemble(&mapped, &basis, &theta)?;
    let x = solve_linear(&sys.matrix, &sys.rhs).map_err(ill_posed)?;
    let n = p.n;
    let c = Vector::new(x.as_slice()[..=n].to_vec());
    let mut gammas: Vec<f64> = sys.fixed_gammas.iter().map(|g| g.unwrap_or(0.0)).collect();
    for (k, &j) in sys.free_gammas.iter().enumerate() {
        gammas[j] = x[n + 1 + k];
    }
    finish(p, &mapped, c, gammas, &basis)
}

/// `𝕃 = Θ²φ(1) wᵀ` where `w` holds the basis coefficients of `a_0 ζ + a_1`.
///
/// `Θ²φ(1)` is taken as `Θ e_0 = (1/2, -1/(2√3), 0, ...)`, the exact value
/// of `∫₀¹∫₀^ζ φ`.
pub fn l_matrix(a0: f64, a1: f64, basis: &OrthonormalBasis, theta: &OperationalMatrix) -> Matrix {
    let v = theta.matrix().column(0);
    let one = basis.monomial_coefficients(0);
    let zeta = basis.monomial_coefficients(1);
    let w = Vector::new(
        one.iter()
            .zip(zeta.iter())
            .map(|(o, z)| a1 * o + a0 * z)
            .collect(),
    );
    Matrix::outer(&v, &w)
}

/// Second-order Dirichlet problems by eliminating `γ_1` in closed form:
///
/// ```text
/// (I + a_1 Θ + a_0 Θ² - 𝕃)ᵀ C = R,   Rᵀφ ≈ r - (β-α)(a_0 ζ + a_1) - a_0 α
/// y = α + (β - α - Cᵀ Θ²φ(1)) ζ + J²(Cᵀφ)
/// ```
pub fn solve_paper_second_order(p: &BvpProblem) -> Result<BvpSolution> {
    if p.order() != 2 {
        return Err(Error::Unsupported(format!(
            "closed-form path needs a second-order problem, got order {}",
            p.order()
        )));
    }
    let dirichlet = |side| {
        p.bcs
            .iter()
            .find(|bc| bc.side == side && bc.order == 0)
            .map(|bc| bc.value)
    };
    let (Some(_), Some(_)) = (dirichlet(Side::Left), dirichlet(Side::Right)) else {
        return Err(Error::Unsupported(
            "closed-form path needs y(x0) and y(x1) conditions".into(),
        ));
    };
    let mapped = map_domain(p);
    let alpha = mapped
        .bcs
        .iter()
        .find(|bc| bc.side == Side::Left)
        .unwrap()
        .value;
    let beta = mapped
        .bcs
        .iter()
        .find(|bc| bc.side == Side::Right)
        .unwrap()
        .value;
    let (a0, a1) = (mapped.coefficients[0], mapped.coefficients[1]);
    let n = p.n;
    let basis = gram_schmidt_basis(n)?;
    let theta = build_theta(n)?;
    let t = theta.matrix();
    let t2 = theta.power(2);
    let l = l_matrix(a0, a1, &basis, &theta);
    let system = Matrix::identity(n + 1)
        .add(&t.scale(a1))?
        .add(&t2.scale(a0))?
        .sub(&l)?
        .transpose();
    let rhs_fn = mapped.rhs.clone();
    let r = project(
        move |z| rhs_fn(z).map(|v| v - (beta - alpha) * (a0 * z + a1) - a0 * alpha),
        &basis,
        &default_rule(n)?,
    )?;
    let c = solve_linear(&system, &r.coeffs).map_err(ill_posed)?;
    let v = t.column(0);
    let slope = beta - alpha - c.dot(&v);
    finish(p, &mapped, c, vec![alpha, slope], &basis)
}
