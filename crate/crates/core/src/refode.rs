//! Fixed-step classical Runge-Kutta reference for initial value problems.
//!
//! Used as an independent check on problems whose conditions all sit at the
//! left end, where no closed form is available.

use std::fmt;

use crate::error::{Error, Result};
use crate::solver::{map_domain, BvpProblem, Side};

/// Right-hand side `f(x, y)` of a first-order system.
pub type Field = Box<dyn Fn(f64, &[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// `y' = f(x, y)`, `y(x0) = y0`.
pub struct IvpSystem {
    pub f: Field,
    pub x0: f64,
    pub y0: Vec<f64>,
}

impl fmt::Debug for IvpSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IvpSystem")
            .field("x0", &self.x0)
            .field("y0", &self.y0)
            .finish_non_exhaustive()
    }
}

impl IvpSystem {
    pub fn new(f: Field, x0: f64, y0: Vec<f64>) -> Result<Self> {
        if y0.is_empty() {
            return Err(Error::InvalidProblem(
                "system dimension must be at least 1".into(),
            ));
        }
        Ok(IvpSystem { f, x0, y0 })
    }

    pub fn dimension(&self) -> usize {
        self.y0.len()
    }

    fn eval(&self, x: f64, y: &[f64]) -> Result<Vec<f64>> {
        let d = (self.f)(x, y)?;
        if d.len() != y.len() {
            return Err(Error::DimensionMismatch {
                op: "ivp field",
                left_rows: d.len(),
                left_cols: 1,
                right_rows: y.len(),
                right_cols: 1,
            });
        }
        Ok(d)
    }
}

/// One trajectory sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub y: Vec<f64>,
    /// `f(x, y)` at this sample.
    pub dy: Vec<f64>,
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// Classical RK4 from `x0` to `x_end` in `steps` equal steps. The result
/// holds `steps + 1` samples including both ends.
pub fn integrate_rk4(sys: &IvpSystem, x_end: f64, steps: usize) -> Result<Vec<Sample>> {
    if steps == 0 {
        return Err(Error::InvalidProblem("steps must be at least 1".into()));
    }
    let h = (x_end - sys.x0) / steps as f64;
    let mut y = sys.y0.clone();
    let mut dy = sys.eval(sys.x0, &y)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(Sample {
        x: sys.x0,
        y: y.clone(),
        dy: dy.clone(),
    });
    for step in 1..=steps {
        let x = sys.x0 + (step - 1) as f64 * h;
        let k1 = dy;
        let k2 = sys.eval(x + 0.5 * h, &axpy(&y, 0.5 * h, &k1))?;
        let k3 = sys.eval(x + 0.5 * h, &axpy(&y, 0.5 * h, &k2))?;
        let k4 = sys.eval(x + h, &axpy(&y, h, &k3))?;
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step });
        }
        let x_next = if step == steps {
            x_end
        } else {
            sys.x0 + step as f64 * h
        };
        dy = sys.eval(x_next, &y)?;
        out.push(Sample {
            x: x_next,
            y: y.clone(),
            dy: dy.clone(),
        });
    }
    Ok(out)
}

/// Piecewise cubic Hermite interpolant of the first state component.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolution {
    xs: Vec<f64>,
    ys: Vec<f64>,
    dys: Vec<f64>,
}

impl DenseSolution {
    pub fn from_trajectory(samples: &[Sample]) -> Self {
        DenseSolution {
            xs: samples.iter().map(|s| s.x).collect(),
            ys: samples.iter().map(|s| s.y[0]).collect(),
            dys: samples.iter().map(|s| s.dy[0]).collect(),
        }
    }

    /// Interpolated value; `x` is clamped to the trajectory span.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        if last == 0 {
            return self.ys[0];
        }
        let (a, b) = (self.xs[0], self.xs[last]);
        let x = x.clamp(a, b);
        let h = (b - a) / last as f64;
        let i = (((x - a) / h).floor() as usize).min(last - 1);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let w = x1 - x0;
        let t = (x - x0) / w;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * w * self.dys[i] + h01 * self.ys[i + 1] + h11 * w * self.dys[i + 1]
    }

    pub fn end_value(&self) -> f64 {
        *self.ys.last().unwrap()
    }
}

/// Starting step count for [`reference_solution`].
pub const REFERENCE_STEPS: usize = 20_000;
/// Step-halving acceptance threshold at the right end.
pub const REFERENCE_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 6;

/// Reference for a problem whose conditions are `y^(k)(x0)` for
/// `k = 0..m-1`: RK4 on the companion system in mapped coordinates, with
/// steps doubled until the right-end value changes by at most `1e-10`.
pub fn reference_solution(p: &BvpProblem) -> Result<impl Fn(f64) -> f64> {
    let m = p.order();
    if p.bcs().iter().any(|bc| bc.side == Side::Right) {
        return Err(Error::Unsupported(
            "reference solutions need every condition at the left end".into(),
        ));
    }
    let mapped = map_domain(p);
    let mut y0 = vec![0.0; m];
    for bc in mapped.bcs() {
        y0[bc.order] = bc.value;
    }
    let a = mapped.coefficients().to_vec();
    let rhs = mapped.rhs().clone();
    let field: Field = Box::new(move |x, y| {
        let r = rhs(x).map_err(|source| Error::Evaluation { x, source })?;
        let mut d = y[1..].to_vec();
        d.push(r - a[..m].iter().zip(y).map(|(ai, yi)| ai * yi).sum::<f64>());
        Ok(d)
    });
    let sys = IvpSystem::new(field, 0.0, y0)?;

    let mut steps = REFERENCE_STEPS;
    let mut coarse = DenseSolution::from_trajectory(&integrate_rk4(&sys, 1.0, steps)?);
    let mut verified = None;
    for _ in 0..MAX_HALVINGS {
        steps *= 2;
        let fine = DenseSolution::from_trajectory(&integrate_rk4(&sys, 1.0, steps)?);
        if (fine.end_value() - coarse.end_value()).abs() <= REFERENCE_TOL {
            verified = Some(fine);
            break;
        }
        coarse = fine;
    }
    let dense = verified.ok_or_else(|| {
        Error::Unsupported("reference integration did not settle under step halving".into())
    })?;
    let (x0, x1) = p.domain();
    let h = x1 - x0;
    Ok(move |x: f64| dense.eval((x - x0) / h))
}
