use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..=8")]
    QubitCount(usize),

    #[error("qubit index {index} out of range for {num_qubits}-qubit register")]
    QubitIndex { index: usize, num_qubits: usize },

    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    RepeatedQubit(usize),

    #[error("input component {value} at position {index} lies outside [0, 1]")]
    InputRange { index: usize, value: f64 },

    #[error("expected {expected} values, got {actual}")]
    Length { expected: usize, actual: usize },

    #[error("invalid Pauli string `{0}`")]
    PauliParse(String),

    #[error("Hamiltonian has no terms")]
    EmptyHamiltonian,

    #[error("operator pool needs at least 2 qubits, got {0}")]
    PoolSize(usize),

    #[error("spline argument {0} outside [0, 1]")]
    SplineDomain(f64),

    #[error("basis index {index} out of range ({count} basis functions)")]
    BasisIndex { index: usize, count: usize },

    #[error("refinement must grow the basis: {from} -> {to} splines")]
    Shrink { from: usize, to: usize },

    #[error("objective is not finite at the starting point ({0})")]
    NonFiniteStart(f64),

    #[error("finite-difference step {0} too small")]
    StepTooSmall(f64),

    #[error("{0} is empty")]
    Empty(&'static str),

    #[error("heat solution evaluated outside its domain at x = {x}, t = {t}")]
    HeatDomain { x: f64, t: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("records describe different problems: {0} vs {1}")]
    ProblemMismatch(String, String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
