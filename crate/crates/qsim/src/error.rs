use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("layout needs {required} qubits but the cap is {cap}")]
    QubitCapExceeded { required: usize, cap: usize },
    #[error("register widths must be at least 1 (ancilla {ancilla}, width {width})")]
    EmptyRegister { ancilla: usize, width: usize },
    #[error("qubit {qubit} is out of range for a {total}-qubit state")]
    QubitOutOfRange { qubit: usize, total: usize },
    #[error("qubit {0} is listed more than once")]
    DuplicateQubit(usize),
    #[error("matrix of dimension {rows}x{cols} does not act on {qubits} qubits")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        qubits: usize,
    },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("registers have different lengths ({left} vs {right})")]
    RegisterLengthMismatch { left: usize, right: usize },
    #[error("registers overlap")]
    OverlappingRegisters,
    #[error("control qubit {0} lies inside a swapped register")]
    ControlInsideRegister(usize),
    #[error("amplitude vector has length {got}, expected {expected}")]
    AmplitudeLength { got: usize, expected: usize },
    #[error("amplitude vector is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("projection onto outcome {outcome} has negligible weight {weight:e}")]
    DegenerateProjection { outcome: usize, weight: f64 },
    #[error("layout has no register for this operation: {0}")]
    MissingRegister(&'static str),
}
