//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed its documented precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam {
        name: &'static str,
        reason: String,
    },

    /// Wavelet frequency at or above the Nyquist limit of the sampling.
    #[error("peak frequency {freq} Hz is at or above Nyquist {nyquist} Hz")]
    FrequencyAboveNyquist { freq: f64, nyquist: f64 },

    /// Section too small for the requested migration.
    #[error("section {nt}x{nx} too small to migrate (need at least {min_nt} samples and {min_nx} traces)")]
    SectionTooSmall {
        nt: usize,
        nx: usize,
        min_nt: usize,
        min_nx: usize,
    },

    /// Section failed its own invariants.
    #[error("invalid section: {0}")]
    InvalidSection(String),

    /// Binarization threshold is undefined on an all-zero section.
    #[error("section has zero peak amplitude; relative threshold undefined")]
    ZeroAmplitude,

    /// The reference image of a relative-error check carries no energy.
    #[error("reference migration has zero energy; relative error undefined")]
    ZeroReference,

    /// Cascade velocities below the sanity floor are ill-posed.
    #[error("velocity {v} m/s below the {min} m/s cascade floor")]
    VelocityTooSmall { v: f64, min: f64 },

    /// The exact GF(2) homology oracle is capped at desk scale.
    #[error("image has {pixels} pixels, exceeding the oracle cap of {cap}")]
    OracleSizeCap { pixels: usize, cap: usize },

    /// The dense semigroup check is capped at desk scale.
    #[error("operator has {nodes} nodes, exceeding the dense-check cap of {cap}")]
    DenseCheckCap { nodes: usize, cap: usize },

    /// Spike interpolation needs at least one unflagged sample.
    #[error("all {0} samples flagged; nothing to anchor interpolation")]
    AllSamplesFlagged(usize),

    /// Diffusion kernel bandwidth is undefined when every patch is identical.
    #[error("all patch distances are zero; kernel bandwidth undefined")]
    DegeneratePatches,

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Grid file did not start with the expected magic bytes.
    #[error("bad grid magic {found:?}, expected \"SGRD\"")]
    BadMagic { found: [u8; 4] },

    /// Grid file version not understood by this reader.
    #[error("unsupported grid version {found}, expected {expected}")]
    UnsupportedVersion { found: u16, expected: u16 },

    /// Grid payload shorter than the header promised.
    #[error("truncated grid payload: expected {expected} bytes of samples, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    /// A stored sample decoded to NaN or infinity.
    #[error("non-finite sample at flat index {index}")]
    NonFiniteSample { index: usize },

    /// SEG-Y sample format code outside the supported set.
    #[error("unsupported SEG-Y sample format code {code} (supported: 1 = IBM float, 5 = IEEE float)")]
    SegyUnsupportedFormat { code: i16 },

    /// SEG-Y structural problem (varying trace lengths, truncation, ...).
    #[error("malformed SEG-Y file: {0}")]
    SegyMalformed(String),

    /// Pipeline configuration failed to parse or validate.
    #[error("bad pipeline config: {0}")]
    BadConfig(String),

    /// A pipeline stage failed; carries the stage name for diagnostics.
    #[error("pipeline stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
