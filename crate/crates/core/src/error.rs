//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Returned when tensor extents do not match for the requested operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Returned when an index list is invalid (out of range or repeated).
    #[error("invalid axes: {0}")]
    Axes(String),

    /// Returned when a tensor contains NaN or infinite entries.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Returned when a state has zero norm.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// Returned when a site index falls outside the chain.
    #[error("site {site} out of range for chain of length {len}")]
    SiteOutOfRange { site: usize, len: usize },

    /// Returned when a site appears twice in a set that must be duplicate-free.
    #[error("duplicate site {0}")]
    DuplicateSite(usize),

    /// Returned when an operation is incompatible with the local dimension.
    #[error("local dimension mismatch: {0}")]
    LocalDim(String),

    /// Returned when a computation would exceed a configured size limit.
    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: String },

    /// Returned when the chain length is incompatible with a geometry or model.
    #[error("invalid chain length {len}: {reason}")]
    ChainLength { len: usize, reason: String },

    /// Returned when model or solver parameters are invalid.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Returned when an internal consistency check fails.
    #[error("construction check failed: {0}")]
    Construction(String),

    /// Returned when a factorization fails to converge.
    #[error("decomposition failed: {0}")]
    Decomposition(String),

    /// Returned when parsing a text representation fails.
    #[error("parse error: {0}")]
    Parse(String),

    /// Returned when reading or writing a checkpoint fails.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// Returned when a checkpoint file is malformed.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
