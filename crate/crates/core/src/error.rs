//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The anisotropy makes `q^2 = 1`, so q-numbers are undefined.
    #[error("degenerate anisotropy: sin(gamma) vanishes (q^2 = 1)")]
    DegenerateAnisotropy,

    /// A site representation would be reducible at this anisotropy.
    #[error("reducible representation: q^(2k) = 1 for k = {k} within spin range 2l = {two_ell}")]
    ReducibleRepresentation { k: i64, two_ell: i64 },

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("chain dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    /// A mathematical precondition of the requested operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code for this error: 2 for config/precondition problems,
    /// 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::Precondition(_)
            | Error::InvalidChain(_)
            | Error::DegenerateAnisotropy
            | Error::ReducibleRepresentation { .. }
            | Error::DimensionCap { .. } => 2,
            _ => 1,
        }
    }
}
