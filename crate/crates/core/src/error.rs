use thiserror::Error;

/// Errors raised across the lab.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular point: |grad u| = {grad_norm:e} below eps_grad = {eps:e} ({context})")]
    Singular {
        grad_norm: f64,
        eps: f64,
        context: &'static str,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("numerical failure: {message} (achieved {achieved:e})")]
    Numerical { message: String, achieved: f64 },

    #[error("capability error: {0}")]
    Capability(String),

    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        LabError::Precondition(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        LabError::Input(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, achieved: f64) -> Self {
        LabError::Numerical {
            message: msg.into(),
            achieved,
        }
    }
}

impl LabError {
    /// Short machine-readable category, used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Domain(_) => "domain",
            LabError::Singular { .. } => "singular",
            LabError::Precondition(_) => "precondition",
            LabError::Input(_) => "input",
            LabError::Numerical { .. } => "numerical",
            LabError::Capability(_) => "capability",
            LabError::Usage(_) => "usage",
        }
    }

    /// Whether the error means the request itself was malformed.
    pub fn is_usage(&self) -> bool {
        matches!(self, LabError::Input(_) | LabError::Usage(_))
    }
}
