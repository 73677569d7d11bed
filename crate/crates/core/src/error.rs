use thiserror::Error;

use crate::extend::InfeasibilityCertificate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not in {space} (deviation {deviation:.3e})")]
    NotInSpace { space: String, deviation: f64 },

    #[error("{what} is singular or ill-conditioned (condition number {condition:.3e})")]
    Singular { what: String, condition: f64 },

    #[error("incompatible space: {0}")]
    IncompatibleSpace(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("precondition failed: {reason} (residual {residual:.3e})")]
    Precondition { reason: String, residual: f64 },

    #[error("theorem violated: {0}")]
    TheoremViolated(String),

    #[error("samples span a space of dimension {rank}, need {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("no linear map fits the samples: sample {sample} deviates by {residual:.3e}")]
    Inconsistent { sample: usize, residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("no linear preserving maps exist from M_{} to M_{}", .0.n, .0.k)]
    Infeasible(Box<InfeasibilityCertificate>),
}

impl Error {
    /// Stable machine-readable name, used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::NotInSpace { .. } => "not_in_space",
            Error::Singular { .. } => "singular",
            Error::IncompatibleSpace(_) => "incompatible_space",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotApplicable(_) => "not_applicable",
            Error::Precondition { .. } => "precondition",
            Error::TheoremViolated(_) => "theorem_violated",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::Inconsistent { .. } => "inconsistent",
            Error::Domain(_) => "domain",
            Error::Parse(_) => "parse",
            Error::Infeasible(_) => "infeasible",
        }
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
