//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An elliptic solve was handed a right-hand side whose mean is not
    /// negligible; on the torus such problems have no periodic solution.
    #[error("right-hand side has non-zero mean {mean:.3e} (tolerance {tol:.3e} relative)")]
    NonZeroMean { mean: f64, tol: f64 },

    /// The variable-coefficient momentum operator requires strictly positive
    /// density for its solve.
    #[error("density must be strictly positive for this operation (min = {min:.3e})")]
    NonPositiveDensity { min: f64 },

    /// An iterative solve ran out of iterations before reaching its residual
    /// target.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e}, target {target:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        target: f64,
    },

    /// Compatibility forcing must have zero mean in each component; otherwise
    /// no periodic velocity matches the requested mean.
    #[error("forcing mean {mean:.3e} in component {component} exceeds tolerance {tol:.3e}")]
    MeanIncompatible {
        component: usize,
        mean: f64,
        tol: f64,
    },

    /// Unknown initial-data preset name.
    #[error("unknown preset '{0}' (expected uniform | acoustic | vacuum-bump | rotating-bump)")]
    UnknownPreset(String),

    /// The time integration produced a non-finite field or a density below
    /// the admissible negative-overshoot threshold.
    #[error("blow-up detected at step {step} (t = {time:.6e}): {reason}")]
    BlowUp {
        step: usize,
        time: f64,
        reason: String,
    },

    /// The stored velocity history does not cover the requested time span.
    #[error("velocity history does not cover t = {t:.6e} (span [{t0:.6e}, {t1:.6e}])")]
    HistoryGap { t: f64, t0: f64, t1: f64 },

    /// A traced particle path entered the vacuum region, where the material
    /// log-density identity is not evaluated.
    #[error("particle path reached vacuum density {rho:.3e} at tau = {tau:.6e}")]
    VacuumOnPath { tau: f64, rho: f64 },

    /// An inequality check was called with exponents outside the admissible
    /// range of the corresponding estimate.
    #[error("exponent out of range for {check}: {detail}")]
    ExponentOutOfRange { check: &'static str, detail: String },

    /// Invalid physical or numerical parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Configuration file could not be parsed or failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// Binary snapshot or CSV file is malformed.
    #[error("bad file format: {0}")]
    BadFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
