use alloc::string::String;

use crate::convops::OperatorKind;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("image data length {len} does not match {width}x{height}")]
    DataLength { width: usize, height: usize, len: usize },
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },
    #[error("non-finite pixel value at ({x}, {y})")]
    NonFinite { x: usize, y: usize },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("reference image is identically zero")]
    ZeroReference,
    #[error("invalid PSF: {0}")]
    InvalidPsf(String),
    #[error("sparse PSF parse error on line {line}: {message}")]
    PsfParse { line: usize, message: String },
    #[error("operator {kind} cannot handle PSF: {psf}")]
    IncompatibleOperator { kind: OperatorKind, psf: String },
    #[error("operator {0} does not support masked evaluation")]
    MaskUnsupported(OperatorKind),
    #[error("mask length {0} does not match pixel count {1}")]
    MaskLength(usize, usize),
    #[error("unknown operator name {0:?}")]
    UnknownOperator(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("observed image must be nonnegative, found {value} at ({x}, {y})")]
    NegativeInput { x: usize, y: usize, value: f64 },
    #[error("NaN encountered in iterate {0}")]
    NanIterate(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
