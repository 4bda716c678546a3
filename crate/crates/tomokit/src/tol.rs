//! Numerical tolerances used across the toolkit.
//!
//! All values assume normalized inputs (unit-trace states, unit-norm purified
//! blocks) in double precision with dimensions up to a few thousand, where
//! accumulated roundoff stays well below these thresholds.

/// Hermiticity residual allowed when validating a matrix.
pub const TAU_HERM: f64 = 1e-8;

/// Allowed deviation of a trace from its nominal value.
pub const TAU_TRACE: f64 = 1e-8;

/// Allowed trace-preservation residual ‖Σ E†E − I‖.
pub const TAU_TP: f64 = 1e-8;

/// Allowed unitarity residual ‖U†U − I‖.
pub const TAU_UNIT: f64 = 1e-8;

/// Eigenvalues above −TAU_PSD count as nonnegative.
pub const TAU_PSD: f64 = 1e-10;

/// Relative eigenvalue threshold defining the numerical rank of a state.
pub const TAU_RANK: f64 = 1e-10;

/// Relative singular-value threshold defining the rank of a protocol matrix.
pub const TAU_B: f64 = 1e-10;

/// Relative information-eigenvalue threshold separating measurable from
/// unmeasurable directions.
pub const TAU_MEAS: f64 = 1e-8;

/// Purified-block norm tolerance.
pub const TAU_NORM: f64 = 1e-8;

/// Fixed-point convergence threshold for the ML reconstructor.
pub const TAU_CONV: f64 = 1e-9;

/// Smallest predicted intensity treated as nonzero.
pub const LAMBDA_FLOOR: f64 = 1e-12;
