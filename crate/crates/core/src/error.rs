use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid crowd model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight scheme {0} has no per-word weight")]
    UnsupportedScheme(&'static str),

    #[error("reliability {value} of worker {worker} on bit {bit} gives infinite log-odds")]
    DegenerateReliability { worker: usize, bit: usize, value: f64 },

    #[error("x is undefined at m = {m}: no worker ever skips")]
    LimitUndefined { m: f64 },

    #[error("enumeration needs {required} terms, cap is {cap}")]
    EnumerationTooLarge { required: u128, cap: u128 },

    #[error("length mismatch: expected {expected}, found {found}")]
    Misaligned { expected: usize, found: usize },

    #[error("no answers to fuse")]
    EmptyAnswers,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: u64, column: usize, message: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EnumerationTooLarge { .. } => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
