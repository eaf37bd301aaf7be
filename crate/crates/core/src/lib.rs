//! Operational-matrix solver for linear constant-coefficient boundary value
//! problems.
//!
//! The highest derivative of the unknown is expanded in an orthonormal
//! polynomial basis on `[0, 1]` (Gram-Schmidt applied to the Bernoulli
//! polynomials), lower derivatives follow from the basis's operational
//! matrix of integration, and the boundary conditions close a small dense
//! linear system. The answer comes back as an explicit polynomial.
//!
//! ```
//! use opbvp::solver::{BoundaryCondition, BvpProblem, Side};
//!
//! // y'' = 0, y(0) = 0, y(1) = 1
//! let problem = BvpProblem::new(
//!     vec![0.0, 0.0, 1.0],
//!     |_| Ok(0.0),
//!     (0.0, 1.0),
//!     vec![
//!         BoundaryCondition::new(Side::Left, 0, 0.0),
//!         BoundaryCondition::new(Side::Right, 0, 1.0),
//!     ],
//!     6,
//! )
//! .unwrap();
//! let sol = opbvp::solver::solve(&problem).unwrap();
//! assert!((sol.solution_poly.eval(0.5) - 0.5).abs() < 1e-12);
//! ```

pub mod approx;
pub mod basis;
mod error;
pub mod exprparse;
pub mod fixtures;
pub mod linalg;
pub mod opmatrix;
pub mod poly;
mod rational;
pub mod refode;
pub mod solver;

pub use error::{Error, Result};
