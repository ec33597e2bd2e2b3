use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unknown variable: {0}")]
    Name(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("sigmas[{index}] is invalid: {reason}")]
    Sigma { index: usize, reason: String },

    #[error("connection is not integrable: {0}")]
    Integrability(String),

    #[error("connection has nonzero p-curvature along {variable}")]
    Flatness { variable: String },

    #[error("matrix is not invertible over the polynomial ring: determinant {determinant}")]
    Invertibility { determinant: String },

    #[error("no unit-determinant frame within degree bound {bound}")]
    DegreeBoundExceeded { bound: usize },

    #[error("operator order {order} is not below p^level = {limit}")]
    LevelExceeded { order: usize, limit: usize },

    #[error("stratification obstruction at level {level}: {reason}")]
    StratificationObstruction { level: usize, reason: String },

    #[error("image of the base action leaves the truncated module (level {level}, degree cap {degree})")]
    TruncationClosure { level: usize, degree: usize },

    #[error("mode mismatch: {0}")]
    Mode(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    /// Short machine-readable tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Name(_) => "name",
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Sigma { .. } => "validation",
            Error::Integrability(_) => "integrability",
            Error::Flatness { .. } => "flatness",
            Error::Invertibility { .. } => "invertibility",
            Error::DegreeBoundExceeded { .. } => "degree-bound-exceeded",
            Error::LevelExceeded { .. } => "level-exceeded",
            Error::StratificationObstruction { .. } => "stratification-obstruction",
            Error::TruncationClosure { .. } => "truncation-closure",
            Error::Mode(_) => "mode",
            Error::Precondition(_) => "precondition",
        }
    }

    /// Errors that mean "a degree or level cap was hit", as opposed to a
    /// mathematical failure.
    pub fn is_inconclusive(&self) -> bool {
        matches!(
            self,
            Error::DegreeBoundExceeded { .. } | Error::TruncationClosure { .. } | Error::LevelExceeded { .. }
        )
    }
}
