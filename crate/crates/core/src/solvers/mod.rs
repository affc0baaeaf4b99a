//! Numerical back ends: an exact-capable simplex method and a primal-dual
//! interior point method for semidefinite programs.

pub mod lp;
pub mod sdp;

pub use lp::{
    farkas_violation, lp_solve, ray_violation, LinearConstraint, LinearProgram, LpCertificate, LpOptions,
    LpResiduals, LpSolution, LpStatus,
};
pub use sdp::{
    conic_solve, lambda_min, sdp_solve, ConicProblem, ConicSolution, RowSense, SdpCertificate, SdpOptions,
    SdpResiduals, SdpRow, SdpSolution, SdpStatus, SemidefiniteProgram,
};
