use thiserror::Error;

/// Errors produced by the estimators, tests and generators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value {value} at row {row} of column `{column}`")]
    NonFinite {
        column: String,
        row: usize,
        value: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value {value} of column `{column}` falls outside every bin")]
    Labeling { column: String, value: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("column `{0}` has fewer than two distinct continuous values")]
    DegenerateColumn(String),

    #[error("regret table limit exceeded: K = {k} > {limit}")]
    RegretLimit { k: u64, limit: u64 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("CI test {x} vs {y} given {given:?} failed: {message}")]
    CiQuery {
        x: String,
        y: String,
        given: Vec<String>,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
