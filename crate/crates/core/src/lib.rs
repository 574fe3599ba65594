//! A-Laplacian operators for general Young functions.
//!
//! The crate covers the whole pipeline for quasilinear Dirichlet problems
//! `-div(A'(|∇u|) ∇u/|∇u|) = f(x, u, ∇u)` with `u = 0` on the boundary:
//!
//! - [`youngfn`]: Young functions, their indices, doubling constants,
//!   numeric conjugates and Luxemburg norms.
//! - [`operator`]: flux and Hessian of `Φ(ξ) = A(|ξ|)` together with the
//!   ellipticity/growth structure constants.
//! - [`discretize`]: structured P1 meshes, nodal fields and assembly of the
//!   frozen-convection energy.
//! - [`solver`]: gradient truncation, bracketed Picard iteration with a damped
//!   Newton inner solver, mirrored problems and auxiliary supersolutions.
//! - [`analysis`]: discrete verifiers for the growth hypotheses, weak sub- and
//!   supersolution inequalities, sign conclusions and positivity certificates.
//! - [`scenario`]: JSON scenario configs, the built-in example corpus and the
//!   end-to-end run pipeline used by the CLI.

pub mod analysis;
pub mod discretize;
pub mod error;
pub mod operator;
pub mod quad;
pub mod scenario;
pub mod solver;
pub mod youngfn;

pub use error::{Error, Result};
