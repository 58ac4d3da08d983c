//! Error type shared across the crate.

/// Errors produced while loading data or validating configuration.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A line of an input file could not be parsed. Lines are 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An edge list yielded no nodes.
    #[error("graph is empty")]
    EmptyGraph,

    /// A dataset contained no usable rows or items.
    #[error("dataset is empty: {0}")]
    EmptyData(String),

    /// θ must lie in [0, 1); the domination ratio (1+θ)/(1−θ) diverges at 1.
    #[error("theta must lie in [0, 1), got {0}")]
    InvalidTheta(f64),

    /// ε must lie in [0, 1).
    #[error("epsilon must lie in [0, 1), got {0}")]
    InvalidEpsilon(f64),

    /// Exhaustive enumeration was requested on an instance beyond desk scale.
    #[error("instance too large for exhaustive enumeration: {0}")]
    InstanceTooLarge(String),

    /// The regression target has (numerically) zero variance.
    #[error("target variable is constant; nothing to regress on")]
    ConstantTarget,

    /// An item or element index fell outside its declared universe.
    #[error("index {index} out of range for universe of size {universe}")]
    IndexOutOfRange { index: usize, universe: usize },

    /// A parameter combination that the library refuses to run with.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
