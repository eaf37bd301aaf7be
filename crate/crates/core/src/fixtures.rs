//! The four worked problems with their truncation degrees and error bounds.
//!
//! Right-hand sides and exact solutions are kept as expression strings so
//! the same data can be written out as problem files.

use std::sync::Arc;

use crate::approx::max_abs_error;
use crate::error::{Error, Result};
use crate::exprparse::{parse, Expr};
use crate::refode::reference_solution;
use crate::solver::{solve, BoundaryCondition, BvpProblem, BvpSolution, Side};

/// Grid used for reported errors.
pub const ERROR_GRID: usize = 1001;

/// One problem with its two truncation degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub id: usize,
    pub title: &'static str,
    /// `a_0..a_m`.
    pub coefficients: Vec<f64>,
    pub domain: (f64, f64),
    pub rhs: &'static str,
    pub bcs: Vec<BoundaryCondition>,
    /// Closed-form solution; `None` means the RK4 reference is used.
    pub exact: Option<&'static str>,
    pub ns: [usize; 2],
    /// Acceptance bound on the max-abs error for each `n`.
    pub thresholds: [f64; 2],
    /// Order of magnitude reported for each `n` in the original study.
    pub reported_orders: [f64; 2],
}

/// Outcome of solving a fixture at one `n`.
#[derive(Debug, Clone)]
pub struct FixtureRun {
    pub id: usize,
    pub n: usize,
    pub solution: BvpSolution,
    pub max_error: f64,
    pub threshold: f64,
    pub reported_order: f64,
}

impl FixtureRun {
    pub fn passed(&self) -> bool {
        self.max_error <= self.threshold
    }
}

fn compile(src: &str) -> Result<Expr> {
    parse(src).map_err(|e| Error::InvalidProblem(format!("fixture expression {src:?}: {e}")))
}

impl Fixture {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn problem(&self, n: usize) -> Result<BvpProblem> {
        let rhs = compile(self.rhs)?;
        BvpProblem::with_rhs(
            self.coefficients.clone(),
            Arc::new(move |x| rhs.eval(x)),
            self.domain,
            self.bcs.clone(),
            n,
        )
    }

    /// Exact solution, or the verified RK4 reference when there is none.
    pub fn reference(&self) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        match self.exact {
            Some(src) => {
                let e = compile(src)?;
                e.eval(self.domain.0).map_err(|source| Error::Evaluation {
                    x: self.domain.0,
                    source,
                })?;
                Ok(Box::new(move |x| e.eval(x).unwrap_or(f64::NAN)))
            }
            None => Ok(Box::new(reference_solution(&self.problem(self.ns[0])?)?)),
        }
    }

    /// Solves at `n` and measures the error against [`Self::reference`] on
    /// the mapped 1001-point grid.
    pub fn run(
        &self,
        n: usize,
        reference: &(dyn Fn(f64) -> f64 + Send + Sync),
    ) -> Result<FixtureRun> {
        let slot = self.ns.iter().position(|&k| k == n);
        let solution = solve(&self.problem(n)?)?;
        let (x0, x1) = self.domain;
        let h = x1 - x0;
        let poly = &solution.solution_poly;
        let max_error = max_abs_error(
            |z| Ok(reference(x0 + h * z)),
            |z| Ok(poly.eval(x0 + h * z)),
            ERROR_GRID,
        )?;
        Ok(FixtureRun {
            id: self.id,
            n,
            solution,
            max_error,
            threshold: slot.map_or(f64::NAN, |i| self.thresholds[i]),
            reported_order: slot.map_or(f64::NAN, |i| self.reported_orders[i]),
        })
    }

    /// Runs both truncation degrees.
    pub fn run_all(&self) -> Result<Vec<FixtureRun>> {
        let reference = self.reference()?;
        self.ns
            .iter()
            .map(|&n| self.run(n, reference.as_ref()))
            .collect()
    }
}

fn left(order: usize, value: f64) -> BoundaryCondition {
    BoundaryCondition::new(Side::Left, order, value)
}

fn right(order: usize, value: f64) -> BoundaryCondition {
    BoundaryCondition::new(Side::Right, order, value)
}

/// `y'' - 5y' + 6y = e^-x`, `y(0) = 0`, `y(1) = 5`.
pub fn example1() -> Fixture {
    Fixture {
        id: 1,
        title: "y'' - 5y' + 6y = exp(-x), y(0) = 0, y(1) = 5",
        coefficients: vec![6.0, -5.0, 1.0],
        domain: (0.0, 1.0),
        rhs: "exp(-x)",
        bcs: vec![left(0, 0.0), right(0, 5.0)],
        exact: Some(
            "(exp(-x) - (e^4 + 60*e - 1)/(e^3*(e - 1))*exp(2*x) \
             + (e^3 + 60*e - 1)/(e^3*(e - 1))*exp(3*x))/12",
        ),
        ns: [7, 10],
        thresholds: [5e-5, 5e-6],
        reported_orders: [1e-5, 1e-7],
    }
}

/// `y⁽⁹⁾ - y = -9eˣ` with `y^(k)(0) = 1 - k` (k ≤ 4) and `y^(k)(1) = -k e`
/// (k ≤ 3); exact solution `(1 - x)eˣ`.
pub fn example2() -> Fixture {
    let e = std::f64::consts::E;
    let mut bcs: Vec<_> = (0..=4).map(|k| left(k, 1.0 - k as f64)).collect();
    bcs.extend((0..=3).map(|k| right(k, -(k as f64) * e)));
    let mut coefficients = vec![0.0; 10];
    coefficients[0] = -1.0;
    coefficients[9] = 1.0;
    Fixture {
        id: 2,
        title: "y^(9) - y = -9 exp(x), five left and four right conditions",
        coefficients,
        domain: (0.0, 1.0),
        rhs: "-9*exp(x)",
        bcs,
        exact: Some("(1 - x)*exp(x)"),
        ns: [7, 12],
        thresholds: [1e-7, 1e-10],
        reported_orders: [1e-8, 1e-12],
    }
}

/// `y'' - 5y' + 2y = tan x`, `y(0) = y'(0) = 0`.
pub fn example3() -> Fixture {
    Fixture {
        id: 3,
        title: "y'' - 5y' + 2y = tan(x), y(0) = y'(0) = 0",
        coefficients: vec![2.0, -5.0, 1.0],
        domain: (0.0, 1.0),
        rhs: "tan(x)",
        bcs: vec![left(0, 0.0), left(1, 0.0)],
        exact: None,
        ns: [9, 11],
        thresholds: [5e-4, 5e-5],
        reported_orders: [1e-4, 1e-5],
    }
}

/// `y⁗ - y'' - y = (x - 3)eˣ`, `y(0) = 1`, `y'(0) = 0`, `y(1) = 0`,
/// `y'(1) = -e`; exact solution `(1 - x)eˣ`.
pub fn example4() -> Fixture {
    let e = std::f64::consts::E;
    Fixture {
        id: 4,
        title: "y'''' - y'' - y = (x - 3) exp(x), y(0) = 1, y'(0) = 0, y(1) = 0, y'(1) = -e",
        coefficients: vec![-1.0, 0.0, -1.0, 0.0, 1.0],
        domain: (0.0, 1.0),
        rhs: "(x - 3)*exp(x)",
        bcs: vec![left(0, 1.0), left(1, 0.0), right(0, 0.0), right(1, -e)],
        exact: Some("(1 - x)*exp(x)"),
        ns: [7, 10],
        thresholds: [5e-5, 5e-7],
        reported_orders: [1e-5, 1e-8],
    }
}

pub fn all() -> Vec<Fixture> {
    vec![example1(), example2(), example3(), example4()]
}

/// Fixture by number, `1..=4`.
pub fn by_id(id: usize) -> Option<Fixture> {
    all().into_iter().find(|f| f.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn derivative(f: &dyn Fn(f64) -> f64, x: f64, k: usize) -> f64 {
        // Central differences on the closed form; adequate for a sanity check.
        if k == 0 {
            return f(x);
        }
        let h = 1e-3;
        (derivative(f, x + h, k - 1) - derivative(f, x - h, k - 1)) / (2.0 * h)
    }

    #[test]
    fn exact_solutions_satisfy_their_conditions() {
        for fx in all().into_iter().filter(|f| f.exact.is_some()) {
            let y = fx.reference().unwrap();
            for bc in &fx.bcs {
                let x = if bc.side == Side::Left {
                    fx.domain.0
                } else {
                    fx.domain.1
                };
                let tol = 1e-12 + 1e-5 * 10f64.powi(bc.order as i32);
                let got = derivative(y.as_ref(), x, bc.order);
                assert!(
                    (got - bc.value).abs() < tol,
                    "example {} {:?}: {got}",
                    fx.id,
                    bc
                );
            }
        }
    }

    #[test]
    fn exact_solutions_satisfy_the_equation() {
        for fx in [example1(), example4()] {
            let y = fx.reference().unwrap();
            let rhs = compile(fx.rhs).unwrap();
            for x in [0.2, 0.5, 0.8] {
                let lhs: f64 = fx
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * derivative(y.as_ref(), x, k))
                    .sum();
                assert!(
                    (lhs - rhs.eval(x).unwrap()).abs() < 1e-3,
                    "example {}",
                    fx.id
                );
            }
        }
    }

    #[test]
    fn lookup() {
        assert_eq!(by_id(3).unwrap().ns, [9, 11]);
        assert!(by_id(5).is_none());
        for f in all() {
            assert_eq!(f.bcs.len(), f.order());
            assert!(f.problem(f.ns[0]).is_ok());
        }
    }

    #[test]
    fn example1_small_runs() {
        let fx = example1();
        let runs = fx.run_all().unwrap();
        assert!(
            runs.iter().all(FixtureRun::passed),
            "{:?}",
            runs.iter().map(|r| r.max_error).collect::<Vec<_>>()
        );
        assert!((runs[0].solution.solution_poly.eval(1.0) - 5.0).abs() < 1e-9);
    }
}
