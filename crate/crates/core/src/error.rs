use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index must be 1, 2 or 3, got {0}")]
    InvalidMode(usize),

    #[error("slice index {index} out of range for mode {mode} of length {len}")]
    IndexOutOfRange {
        mode: usize,
        index: usize,
        len: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("ranks ({r1}, {r2}) exceed bounds ({max_r1}, {max_r2}) for mode {mode}")]
    RankBounds {
        mode: usize,
        r1: usize,
        r2: usize,
        max_r1: usize,
        max_r2: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value in iterate at iteration {iteration} ({block})")]
    NonFinite {
        iteration: usize,
        block: &'static str,
    },

    #[error("observation mask has no observed entries")]
    EmptyObservedSet,

    #[error("region {index} lies outside the {rows}x{cols} image")]
    RegionOutOfBounds {
        index: usize,
        rows: usize,
        cols: usize,
    },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic {
        expected: &'static str,
        found: Vec<u8>,
    },

    #[error("truncated input: {missing} more bytes needed ({context})")]
    Truncated {
        missing: usize,
        context: &'static str,
    },

    #[error("dimensions {0:?} overflow the addressable size")]
    DimOverflow([u64; 3]),

    #[error("unexpected payload kind {found} (expected {expected})")]
    PayloadKind { expected: u8, found: u8 },

    #[error("trailing bytes after payload: {0}")]
    TrailingBytes(usize),

    #[error("invalid mask payload byte {0} (must be 0 or 1)")]
    MaskByte(u8),

    #[error("image format: {0}")]
    Image(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dims(expected: impl std::fmt::Debug, found: impl std::fmt::Debug) -> Self {
        Error::DimensionMismatch {
            expected: format!("{expected:?}"),
            found: format!("{found:?}"),
        }
    }
}
