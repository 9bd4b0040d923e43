use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("inconsistent GF(2) system: a row reduced to 0 = 1")]
    InconsistentSystem,

    #[error("QBER sample is empty (sifted length {sifted})")]
    EmptySample { sifted: usize },

    #[error("estimated QBER is zero and no initial block size was given")]
    ZeroQber,

    #[error("binary search started on a block with an even number of errors")]
    EvenErrorBlock,

    #[error("schedule has {passes} passes but {permutations} permutations were supplied")]
    ScheduleMismatch { passes: usize, permutations: usize },

    #[error("block width {width} exceeds the codebook limit of {max}")]
    WidthTooLarge { width: usize, max: usize },

    #[error("key length {n} exceeds the packed candidate limit of {max} bits")]
    KeyTooLong { n: usize, max: usize },

    #[error("search space of 2^{log2:.2} candidates exceeds the cap of {cap}")]
    SearchSpaceExceeded { log2: f64, cap: u64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
