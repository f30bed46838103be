use thiserror::Error;

/// A configuration value violates a documented invariant.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("[{section}] {message}")]
pub struct ConfigError {
    pub section: String,
    pub message: String,
}

impl ConfigError {
    pub fn invariant(section: &str, message: impl Into<String>) -> Self {
        ConfigError {
            section: section.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("mask is empty")]
    EmptyMask,

    #[error("mask is disconnected ({components} components)")]
    DisconnectedMask { components: usize },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("shooting bracket [{lo}, {hi}] does not straddle the target radius")]
    Bracketing { lo: f64, hi: f64 },

    #[error("contradictory predictions: {0}")]
    Contradiction(String),

    #[error("ratio undefined: solution vanishes at interior node {node} after the delay")]
    VanishingRatio { node: usize },

    #[error(transparent)]
    Parse(#[from] crate::io::ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
