use engine::EngineError;
use epistemic_core::EpistemicError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("scenario does not parse: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Validation { path: String, message: String },
    #[error("muddy children needs 1 <= |muddy| <= n <= 10, got n={n}, |muddy|={muddy}")]
    InvalidCounts { n: usize, muddy: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Epistemic(#[from] EpistemicError),
}

impl ScenarioError {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Validation { path: path.into(), message: message.into() }
    }
}

pub type Result<T, E = ScenarioError> = std::result::Result<T, E>;
