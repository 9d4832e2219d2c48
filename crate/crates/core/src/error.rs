use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown polymer id {0}")]
    UnknownPolymer(usize),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("enumeration over {count} polymers exceeds the cap of {cap}")]
    EnumerationCap { count: usize, cap: usize },

    #[error("invalid polymer family: {0}")]
    InvalidFamily(String),

    #[error("clique index {index} out of range for a cover of size {m}")]
    CliqueIndex { index: usize, m: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("{condition} condition fails at polymer {worst_polymer} (slack {slack:e})")]
    Precondition {
        condition: String,
        worst_polymer: usize,
        slack: f64,
    },

    #[error("ratio estimate for clique {clique} is zero after {samples} samples; raise the sample count")]
    DegenerateRatio { clique: usize, samples: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph error: {0}")]
    Graph(String),
}
