use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid wav file {path}: {message}")]
    Wav { path: PathBuf, message: String },
    #[error("unsupported audio encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("audio contains no samples")]
    EmptyAudio,
    #[error("signal entirely silent after trimming")]
    SilentSignal,
    #[error("signal of {len} samples is shorter than one hop ({hop})")]
    SignalTooShort { len: usize, hop: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate frame: no cepstral energy above DC")]
    DegenerateFrame,
    #[error("all {0} frames are degenerate")]
    AllFramesDegenerate(usize),
    #[error("feature dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid pitch contour: {0}")]
    InvalidPitch(String),
    #[error("invalid feature blob: {0}")]
    InvalidBlob(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
