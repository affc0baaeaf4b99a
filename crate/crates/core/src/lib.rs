//! Moment relaxations for polynomial optimization and the generalized
//! moment problem over the standard simplex and the unit sphere.

pub mod applications;
pub mod error;
pub mod lp_hierarchy;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod sdp_hierarchy;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{Domain, DomainKind, GmpInstance, MomentConstraint, MomentVector};
pub use poly::{Monomial, Polynomial};
pub use report::{LevelReport, Status};
pub use scalar::{Rational, Scalar};

/// Polynomial with exact rational coefficients.
pub type QPolynomial = Polynomial<Rational>;
/// Polynomial with `f64` coefficients.
pub type FPolynomial = Polynomial<f64>;
/// Exact linear program.
pub type QLinearProgram = solvers::LinearProgram<Rational>;
/// Floating point linear program.
pub type FLinearProgram = solvers::LinearProgram<f64>;
