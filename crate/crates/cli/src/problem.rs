//! Line-oriented problem files.
//!
//! ```text
//! # y'' - 5y' + 6y = exp(-x), y(0) = 0, y(1) = 5
//! order    = 2
//! interval = 0 1
//! coeff[0] = 6
//! coeff[1] = -5
//! rhs      = exp(-x)
//! bc       = left 0 0
//! bc       = right 0 5
//! n        = 7
//! exact    = ...
//! ```
//!
//! Blank lines and `#` comments are ignored. `coeff[order]` defaults to 1 and
//! every other coefficient to 0. `bc` repeats once per condition; every other
//! key may appear at most once.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use opbvp::exprparse::{parse, Expr};
use opbvp::solver::{BoundaryCondition, BvpProblem, Side};

/// Error in a problem file, tied to a 1-based line when there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ProblemError {}

fn at(line: usize, message: impl Into<String>) -> ProblemError {
    ProblemError {
        line: Some(line),
        message: message.into(),
    }
}

/// A parsed problem file.
#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub order: usize,
    pub interval: (f64, f64),
    /// `a_0..a_order`.
    pub coefficients: Vec<f64>,
    pub rhs_src: String,
    pub rhs: Expr,
    pub bcs: Vec<BoundaryCondition>,
    pub n: usize,
    pub exact: Option<(String, Expr)>,
}

impl ProblemFile {
    pub fn read(path: &Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|e| ProblemError {
            line: None,
            message: format!("cannot read file: {e}"),
        })?;
        text.parse()
    }

    pub fn to_problem(&self) -> opbvp::Result<BvpProblem> {
        let rhs = self.rhs.clone();
        BvpProblem::with_rhs(
            self.coefficients.clone(),
            Arc::new(move |x| rhs.eval(x)),
            self.interval,
            self.bcs.clone(),
            self.n,
        )
    }
}

fn real(line: usize, key: &str, s: &str) -> Result<f64, ProblemError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(at(
            line,
            format!("`{key}` expects a finite real, got `{s}`"),
        )),
    }
}

fn integer(line: usize, key: &str, s: &str) -> Result<usize, ProblemError> {
    s.parse::<usize>().map_err(|_| {
        at(
            line,
            format!("`{key}` expects a non-negative integer, got `{s}`"),
        )
    })
}

fn expression(line: usize, key: &str, s: &str) -> Result<Expr, ProblemError> {
    parse(s).map_err(|e| {
        at(
            line,
            format!("`{key}` at offset {}: {}", e.offset, e.message),
        )
    })
}

fn set_once<T>(slot: &mut Option<T>, value: T, line: usize, key: &str) -> Result<(), ProblemError> {
    if slot.is_some() {
        return Err(at(line, format!("duplicate key `{key}`")));
    }
    *slot = Some(value);
    Ok(())
}

impl std::str::FromStr for ProblemFile {
    type Err = ProblemError;

    fn from_str(text: &str) -> Result<Self, ProblemError> {
        let mut order = None;
        let mut interval = None;
        let mut coeffs: Vec<(usize, usize, f64)> = Vec::new();
        let mut rhs = None;
        let mut bcs: Vec<(usize, BoundaryCondition)> = Vec::new();
        let mut n = None;
        let mut exact = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| at(line, "expected `key = value`"))?;
            if value.is_empty() {
                return Err(at(line, format!("`{key}` has no value")));
            }
            match key {
                "order" => set_once(&mut order, integer(line, key, value)?, line, key)?,
                "n" => set_once(&mut n, integer(line, key, value)?, line, key)?,
                "interval" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(at(line, "`interval` expects two reals"));
                    }
                    let v = (real(line, key, parts[0])?, real(line, key, parts[1])?);
                    set_once(&mut interval, v, line, key)?;
                }
                "rhs" => {
                    let e = expression(line, key, value)?;
                    set_once(&mut rhs, (value.to_string(), e), line, key)?;
                }
                "exact" => {
                    let e = expression(line, key, value)?;
                    set_once(&mut exact, (value.to_string(), e), line, key)?;
                }
                "bc" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(at(line, "`bc` expects `left|right <order> <value>`"));
                    }
                    let side = match parts[0] {
                        "left" => Side::Left,
                        "right" => Side::Right,
                        s => {
                            return Err(at(
                                line,
                                format!("bc side must be left or right, got `{s}`"),
                            ))
                        }
                    };
                    let d = integer(line, key, parts[1])?;
                    let v = real(line, key, parts[2])?;
                    bcs.push((line, BoundaryCondition::new(side, d, v)));
                }
                _ => {
                    let k = key
                        .strip_prefix("coeff[")
                        .and_then(|s| s.strip_suffix(']'))
                        .ok_or_else(|| at(line, format!("unknown key `{key}`")))?;
                    let k = integer(line, key, k.trim())?;
                    if coeffs.iter().any(|&(_, j, _)| j == k) {
                        return Err(at(line, format!("duplicate key `{key}`")));
                    }
                    coeffs.push((line, k, real(line, key, value)?));
                }
            }
        }

        let missing = |key: &str| ProblemError {
            line: None,
            message: format!("missing required key `{key}`"),
        };
        let order = order.ok_or_else(|| missing("order"))?;
        let interval = interval.ok_or_else(|| missing("interval"))?;
        let (rhs_src, rhs) = rhs.ok_or_else(|| missing("rhs"))?;
        let n = n.ok_or_else(|| missing("n"))?;
        if order == 0 {
            return Err(ProblemError {
                line: None,
                message: "`order` must be at least 1".into(),
            });
        }

        let mut coefficients = vec![0.0; order + 1];
        coefficients[order] = 1.0;
        for (line, k, v) in coeffs {
            if k > order {
                return Err(at(line, format!("coeff[{k}] exceeds order {order}")));
            }
            coefficients[k] = v;
        }
        for &(line, bc) in &bcs {
            if bc.order >= order {
                return Err(at(
                    line,
                    format!("bc derivative order {} must be below {order}", bc.order),
                ));
            }
        }
        if bcs.len() != order {
            return Err(ProblemError {
                line: None,
                message: format!("expected {order} bc lines, found {}", bcs.len()),
            });
        }

        Ok(ProblemFile {
            order,
            interval,
            coefficients,
            rhs_src,
            rhs,
            bcs: bcs.into_iter().map(|(_, bc)| bc).collect(),
            n,
            exact,
        })
    }
}
