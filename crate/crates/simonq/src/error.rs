use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variant `{0}`")]
    UnknownVariant(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("master key wider than {0} bits")]
    KeyTooWide(u32),
    #[error("{0} rounds requested, cipher has {1}")]
    RoundsOutOfRange(usize, u32),
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("qubit {0} used twice in one gate")]
    DuplicateQubit(usize),
    #[error("MCX needs at least one control")]
    EmptyControls,
    #[error("unlowered multi-controlled gate at index {0}")]
    Unlowered(usize),
    #[error("need {needed} ancillas, {available} available")]
    InsufficientAncillas { needed: usize, available: usize },
    #[error("ancilla {0} overlaps gate operands")]
    AncillaOverlap(usize),
    #[error("qubit map collision on {0}")]
    MapCollision(usize),
    #[error("register `{0}` already defined")]
    DuplicateRegister(String),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("gate not allowed in basis simulation: {0}")]
    NonClassicalGate(String),
    #[error("statevector width {0} exceeds limit {1}")]
    TooWide(usize, usize),
    #[error("probability {0} out of range (0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("unknown differential index {0}")]
    UnknownDifferential(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown table {0}")]
    UnknownTable(u32),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("catalog: {0}")]
    Catalog(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
