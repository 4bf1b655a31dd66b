use qsim::SimError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("oracle acts on {got} qubits but the registers hold {expected}")]
    OracleWidth { expected: usize, got: usize },
    #[error("eigenstate preparations must be resolved to amplitudes before running the protocol")]
    UnresolvedEigenstate,
    #[error("invalid preparation: {0}")]
    InvalidPreparation(String),
    #[error("outcome {m} is out of range for {k} ancilla qubits")]
    OutcomeOutOfRange { m: usize, k: usize },
    #[error("spectral spread bound must be positive and finite, got {0}")]
    InvalidSpreadBound(f64),
    #[error("histogram holds no shots")]
    ZeroShots,
    #[error("sampled runs need at least one shot")]
    NoShotsRequested,
    #[error("density has no mass")]
    EmptyDensity,
    #[error("density is not binned on a phase grid")]
    NotBinned,
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),
    #[error("histograms cannot be merged: {0}")]
    IncompatibleHistograms(&'static str),
    #[error("unitary of dimension {0} is not a qubit operator")]
    NotQubitDimension(usize),
}
