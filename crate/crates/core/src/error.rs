use qpe_protocol::ProtocolError;
use qsim::SimError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("dimension {0} is not a power of two")]
    NotQubitDimension(usize),
    #[error("dense matrices are limited to {max} qubits, got {got}")]
    TooManyQubits { got: usize, max: usize },
    #[error("spectrum has {got} phases, expected {expected}")]
    SpectrumLength { got: usize, expected: usize },
    #[error("phase {0} is not finite")]
    NonFinitePhase(f64),
    #[error("evolution time must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("eigendecomposition residual {0:e} exceeds tolerance")]
    Decomposition(f64),
    #[error("matrices have different shapes ({0} vs {1})")]
    ShapeMismatch(usize, usize),
    #[error("brute-force assembly needs {got} qubits, limit is {max}")]
    AssemblyTooLarge { got: usize, max: usize },
}
