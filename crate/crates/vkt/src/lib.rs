//! Pseudo-spectral simulation of 2D isentropic compressible Navier-Stokes
//! flow with density-dependent bulk viscosity on the periodic unit torus.
//!
//! The model is the barotropic system
//!
//! ```text
//! rho_t + div(rho u) = 0
//! (rho u)_t + div(rho u (x) u) + grad P(rho) = mu lap u + grad((mu + lam(rho)) div u)
//! ```
//!
//! with pressure `P(rho) = A rho^gamma` and bulk viscosity `lam(rho) = rho^beta`.
//! The crate provides the spectral grid toolbox ([`grid`]), periodic elliptic
//! solves including the variable-coefficient momentum operator ([`elliptic`]),
//! the constitutive laws and semi-discrete right-hand side ([`model`]),
//! explicit RK4 time stepping ([`dynamics`]), well-prepared initial data
//! construction ([`initdata`]), particle-path tracing with the material
//! log-density balance ([`lagrangian`]), the a-priori diagnostic functionals
//! and interpolation-inequality checks ([`analysis`]), and run configuration
//! plus binary/CSV/PGM output ([`config`], [`io`]).
//!
//! Start from the `examples/` directory for end-to-end usage; the thin `vkt`
//! binary wraps the same library entry points.

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod elliptic;
mod error;
pub mod grid;
pub mod initdata;
pub mod io;
pub mod lagrangian;
pub mod model;
pub mod parallel;

pub use error::{Error, Result};
pub use grid::{Axis, Field, Spectrum, VecField};
pub use model::{Params, State, VacuumPolicy};
