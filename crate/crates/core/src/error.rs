use thiserror::Error;

/// Everything that can go wrong across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown parameter set `{name}` (valid: {valid})")]
    UnknownParamSet { name: String, valid: String },

    #[error("no NTT-friendly modulus below 2^{bits} for ring dimension {ring_dim}")]
    NoNttModulus { bits: u32, ring_dim: usize },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("Montgomery requires odd modulus (got {0})")]
    EvenModulus(u64),

    #[error("domain mismatch: expected {expected} domain")]
    Domain { expected: &'static str },

    #[error("ring mismatch: ({0}, {1}) vs ({2}, {3})")]
    RingMismatch(usize, u64, usize, u64),

    #[error("dimension/modulus mismatch: {0}")]
    Shape(String),

    #[error("invalid gate window: {0}")]
    Window(String),

    #[error("unsupported secret distribution: {0}")]
    SecretDist(String),

    #[error("netlist line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("unbound wire `{0}`")]
    UnboundWire(String),

    #[error("insufficient memory: budget {budget_gb:.2} GB is below the key footprint {floor_gb:.2} GB")]
    InsufficientMemory { budget_gb: f64, floor_gb: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for command-line use: 2 for bad requests, 3 for
    /// bad or mismatched data, 4 when the model runs out of memory budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownParamSet { .. } | Error::Param(_) | Error::SecretDist(_) | Error::Window(_) => 2,
            Error::InsufficientMemory { .. } => 4,
            _ => 3,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownParamSet { .. } => "unknown_param_set",
            Error::NoNttModulus { .. } => "no_ntt_modulus",
            Error::Param(_) => "invalid_parameter",
            Error::EvenModulus(_) => "even_modulus",
            Error::Domain { .. } => "domain_mismatch",
            Error::RingMismatch(..) => "ring_mismatch",
            Error::Shape(_) => "shape_mismatch",
            Error::Window(_) => "invalid_window",
            Error::SecretDist(_) => "secret_distribution",
            Error::Parse { .. } => "parse",
            Error::Circuit(_) => "circuit",
            Error::UnboundWire(_) => "unbound_wire",
            Error::InsufficientMemory { .. } => "insufficient_memory",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
        }
    }
}
