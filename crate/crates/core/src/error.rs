//! Error taxonomy shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Structural problem in an input file (ragged rows, missing header).
    #[error("format error at row {row}: {detail}")]
    Format { row: usize, detail: String },

    /// A token failed to parse. Locations are 1-based.
    #[error("parse error at line {line}, field {field}: {detail}")]
    Parse {
        line: usize,
        field: usize,
        detail: String,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Two inputs that must describe the same samples disagree.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// Operation applied to an object in the wrong state.
    #[error("state error: {0}")]
    State(String),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// All-zero feature mask: nothing would be left to train on.
    #[error("degenerate mask: at least one feature must be selected")]
    DegenerateMask,

    #[error("config error: {0}")]
    Config(String),

    /// The fitness function produced NaN for the named chromosome.
    #[error("fitness returned NaN for chromosome {chromosome}")]
    Fitness { chromosome: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
