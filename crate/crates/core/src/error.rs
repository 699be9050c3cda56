use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid qudit target {0}")]
    Target(usize),
    #[error("duplicate qudit target {0}")]
    DuplicateTarget(usize),
    #[error("register too large: {0} amplitudes exceeds budget")]
    Budget(usize),
    #[error("product channel would need {0} Kraus operators")]
    KrausBudget(usize),
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("channel is not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),
    #[error("all branch probabilities vanish")]
    ZeroBranch,
    #[error("shape mismatch between Pauli words")]
    Shape,
    #[error("too many generators for enumeration: {0} > 8")]
    TooManyGenerators(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid gate: {0}")]
    Gate(String),
    #[error("circuit depth {depth} exceeds maximum {max}")]
    DepthOverflow { depth: usize, max: usize },
    #[error("wrong parameter length: expected {expected}, got {got}")]
    ParamLength { expected: usize, got: usize },
    #[error("invalid value: {0}")]
    Invalid(String),
    #[error("derived stabilizers do not commute (deviation {0:e})")]
    NonCommuting(f64),
    #[error("no recovery for syndrome {0:?}")]
    MissingRecovery(Vec<u32>),
    #[error("unknown code '{0}'")]
    UnknownCode(String),
    #[error("budget exhausted: {0}")]
    Exhausted(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("overlapping activations: {0}")]
    Overlap(String),
    #[error("config: {0}")]
    Config(String),
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    ConfigList(Vec<String>),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
