use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("operator has non-finite entries")]
    InvalidOperator,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mode index {mode} out of range for a {modes}-mode state")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("state has zero norm")]
    ZeroState,

    #[error("conditioning outcome is impossible (probability {probability:e})")]
    ImpossibleOutcome { probability: f64 },

    #[error("state must be normalized (squared norm {norm_sqr})")]
    RequiresNormalized { norm_sqr: f64 },

    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("truncation did not converge: tail mass {tail:e} at dimension {dim}")]
    Convergence { dim: usize, tail: f64 },

    #[error("quadrature integration did not converge (residual {residual:e})")]
    Integration { residual: f64 },

    #[error("micro mode leaks outside {{|0>, |1>}} (population {leakage:e})")]
    Leakage { leakage: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("empty mode set")]
    EmptyModeSet,

    #[error("numeric policy: {0}")]
    Policy(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_param(
    name: &'static str,
    value: f64,
    ok: bool,
    reason: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
