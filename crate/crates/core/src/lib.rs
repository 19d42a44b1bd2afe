//! Matrix-free finite-difference Poisson solver on the unit interval, square
//! and cube, with the finite-element mass matrix used as a multiply-only
//! preconditioner for conjugate gradients.
//!
//! - [`operators`]: stencil application of the Laplacian `A_d` and scaled mass
//!   operator `M_d`, and their product `T_d = M_d A_d`.
//! - [`spectrum`]: closed-form eigenvalues, condition numbers and the
//!   predicted iteration ratio `√(κ/κ_p)`.
//! - [`krylov`]: CG / mass-preconditioned CG with residual histories.
//! - [`oracle`]: dense assembly and sine-mode Rayleigh quotients for small
//!   grids, used to check everything above.

pub mod error;
pub mod grid;
pub mod krylov;
pub mod operators;
pub mod oracle;
pub mod rhs;
pub mod spectrum;

pub use error::{Error, Result};
pub use grid::{GridSpec, GridVector};
pub use krylov::{
    cg_solve, predicted_vs_observed, IterationComparison, Preconditioner, SolveConfig, SolveReport,
    StoppingRule,
};
pub use operators::{apply_laplacian, apply_mass, apply_preconditioned, OperatorKind};
pub use rhs::RightHandSide;
pub use spectrum::{eigenvalue, full_spectrum, ratio_report, spectrum_report, RatioReport, SpectrumReport};
