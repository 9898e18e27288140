use thiserror::Error;

use crate::reduction::SrpWitness;

pub type Result<T, E = GameError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid strategy grid: {0}")]
    InvalidGrid(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid coalition: {0}")]
    InvalidCoalition(String),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("{what} ({requested}) exceeds the configured limit of {limit}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("strong reduction property violated: {0}")]
    SrpViolation(Box<SrpWitness>),

    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("linear feasibility solve failed: {0}")]
    Solver(String),
}

impl GameError {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, GameError::CapExceeded { .. })
    }
}
