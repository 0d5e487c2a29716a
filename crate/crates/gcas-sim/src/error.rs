//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A polynomial table produced a non-finite value.
    #[error("non-finite aerodynamic coefficient from the `{table}` polynomial")]
    NonFiniteCoefficient { table: &'static str },

    /// Pitch angle at the Euler kinematic singularity.
    #[error("kinematic singularity: pitch angle {theta_rad} rad is at ±π/2")]
    KinematicSingularity { theta_rad: f64 },

    /// Integration produced a non-finite state.
    #[error("state diverged (non-finite) at integration step {step}")]
    Diverged { step: usize },

    /// Dynamic pressure was zero or negative where an inversion needs it.
    #[error("degenerate dynamic pressure: {qbar} Pa")]
    DegenerateDynamicPressure { qbar: f64 },

    /// Sideslip at ±π/2 makes the angle-of-attack channel singular.
    #[error("degenerate sideslip: {beta_rad} rad is at ±π/2")]
    DegenerateSideslip { beta_rad: f64 },

    /// Gain pair failed the critical-damping eigenvalue check.
    #[error("gain verification failed for k1={k1}, k2={k2}: {reason}")]
    GainVerification { k1: f64, k2: f64, reason: String },

    /// A schedule, terrain, or grid file did not parse.
    #[error("{kind} format error at line {line}: {msg}")]
    FileFormat {
        kind: &'static str,
        line: usize,
        msg: String,
    },

    /// Scenario/config/schedule combination cannot run.
    #[error("setup error: {0}")]
    Setup(String),

    /// A simulation aborted mid-run; the partial log is preserved.
    #[error("run aborted at step {step}: {source}")]
    AbortedRun {
        step: usize,
        #[source]
        source: Box<Error>,
        partial: Box<crate::harness::SimLog>,
    },

    /// Objective evaluation needs a non-empty log.
    #[error("objective evaluation error: {0}")]
    ObjectiveEvaluation(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
