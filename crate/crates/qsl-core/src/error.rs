use thiserror::Error;

pub type Result<T> = std::result::Result<T, QslError>;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QslError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix deviates from Hermitian by {deviation:.3e} (tolerance {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("vectors and matrices must have at least one entry")]
    Empty,

    #[error("state norm {norm} differs from 1 beyond tolerance {tolerance:.3e}")]
    NotNormalized { norm: f64, tolerance: f64 },

    #[error("cannot normalize a vector with vanishing norm")]
    ZeroNorm,

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error(
        "expectation value carries imaginary residue {residue:.3e} (tolerance {tolerance:.3e})"
    )]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("variance radicand {radicand:.3e} is negative beyond roundoff")]
    NegativeVariance { radicand: f64 },

    #[error("stationary state: zero energy uncertainty admits no transition")]
    StationaryState,

    #[error("probability {value} outside [0, 1]")]
    InvalidProbability { value: f64 },

    #[error("angle {value} outside [0, {max}]")]
    AngleOutOfRange { value: f64, max: f64 },

    #[error("time {t} outside the envelope validity window [0, {t_max}]")]
    OutsideEnvelopeWindow { t: f64, t_max: f64 },

    #[error("propagator lost unitarity: max |U\u{2020}U - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl QslError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        QslError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
