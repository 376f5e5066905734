use thiserror::Error;

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Unsynthesizable,
    ResourceLimit,
    Corruption,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("width {0} is outside the supported range 1..=16")]
    WidthOutOfRange(usize),
    #[error("index {index} does not fit on {width} wires")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("index {0} appears more than once")]
    RepeatedIndex(usize),
    #[error("image vector is not a bijection")]
    NotBijective,
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("permutation is odd")]
    OddPermutation,
    #[error("permutation is not linear over GF(2)")]
    NotLinear,
    #[error("matrix is singular over GF(2)")]
    SingularMatrix,
    #[error("permutation is not an XOR-mask permutation")]
    NotNConstructible,
    #[error("permutation is not T-constructible: {0}")]
    NotTConstructible(&'static str),
    #[error("permutation cannot be synthesized: {0}")]
    NotConstructible(String),
    #[error("{0} spare indices required, width too small")]
    NoSpareIndices(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("circuit contains a gate outside the CNT library")]
    NonCntGate,
    #[error("no circuit found within cost ceiling {0}")]
    Unreachable(usize),

    #[error("memory budget exceeded after completing size {reached}")]
    BudgetExceeded { reached: usize },
    #[error("time limit exceeded")]
    TimeLimit,

    #[error("corrupt library file: {0}")]
    CorruptLibrary(String),
    #[error("library version {0} is not supported")]
    VersionMismatch(u16),
    #[error("library mismatch: {0}")]
    LibraryMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            WidthOutOfRange(_)
            | IndexOutOfRange { .. }
            | RepeatedIndex(_)
            | NotBijective
            | WidthMismatch(..)
            | Parse { .. }
            | InvalidGate(_)
            | Precondition(_)
            | LibraryMismatch(_)
            | Io(_) => ErrorCategory::Usage,
            OddPermutation | NotLinear | SingularMatrix | NotNConstructible
            | NotTConstructible(_) | NotConstructible(_) | NoSpareIndices(_) | NonCntGate
            | Unreachable(_) => ErrorCategory::Unsynthesizable,
            BudgetExceeded { .. } | TimeLimit => ErrorCategory::ResourceLimit,
            CorruptLibrary(_) | VersionMismatch(_) => ErrorCategory::Corruption,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
