use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `|γ' ∧ γ''|` fell below the biregularity threshold.
    #[error("degenerate curve at u = {u}: |γ'∧γ''|/|γ'|³ = {ratio:e}")]
    DegenerateCurve { u: f64, ratio: f64 },

    #[error("degenerate Frenet frame at s = {s}: curvature {curvature:e} below threshold")]
    DegenerateFrame { s: f64, curvature: f64 },

    #[error("curve is not simple: minimum self-distance {min_distance:e}")]
    NotSimple { min_distance: f64 },

    #[error("tolerance not met: value {value}, achieved error {achieved:e}, requested {requested:e}")]
    ToleranceNotMet { value: f64, achieved: f64, requested: f64 },

    #[error("fit failure ({reason}), condition number {condition:e}")]
    FitFailure { condition: f64, reason: String },

    #[error("calibration failure: {0}")]
    CalibrationFailure(String),

    #[error("tube too wide: eps = {eps} exceeds admissible radius {limit}")]
    TubeTooWide { eps: f64, limit: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::DegenerateCurve { .. }
                | Error::NotSimple { .. }
                | Error::TubeTooWide { .. }
                | Error::Parse { .. }
                | Error::Io(_)
        )
    }
}
