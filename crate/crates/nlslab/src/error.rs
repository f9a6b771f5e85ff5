use thiserror::Error;

/// Crate-wide error type.
///
/// Variants mirror the failure modes of the pipeline: bad configuration,
/// out-of-domain arguments, runtime guards tripping during evolution,
/// cross-check diagnostics, and file-format problems.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration; the message names the offending field.
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Relative mass in the boundary guard zone exceeded the tolerance.
    /// The box truncation is no longer trustworthy past this time.
    #[error(
        "boundary guard violated at t={time}: guard-zone mass fraction {fraction:.3e} > tolerance {tolerance:.3e}"
    )]
    GuardViolation {
        time: f64,
        fraction: f64,
        tolerance: f64,
    },

    /// A non-finite sample appeared during evolution.
    #[error("non-finite field values detected at t={time}")]
    NonFinite { time: f64 },

    /// An internal cross-check disagreed beyond tolerance. Usually signals
    /// an unresolved or boundary-corrupted field.
    #[error("diagnostic cross-check failed: {0}")]
    Diagnostic(String),

    /// Scattering-state extraction could not proceed.
    #[error("extraction error: {0}")]
    Extraction(String),

    /// Snapshot file format violation, with the byte offset of the problem.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
