use thiserror::Error;

/// Errors produced by the simulator core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A schedule or lattice parameter violates a required inequality.
    #[error("configuration rejected: {0}")]
    Config(String),

    #[error("site ({i}, {j}) is outside the {n}x{n} lattice")]
    OutOfBounds { i: usize, j: usize, n: usize },

    #[error("gate `{0}` is not supported by the frame simulator")]
    UnsupportedGate(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no feasible parameters within cap M <= {cap}")]
    Infeasible { cap: u32 },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
