use qsim::{SimError, StateVector};

/// The only access the protocol has to the unitary `U`.
///
/// Implementations apply `U^power` to the layout's oracle register (the
/// target register `H`, or `R1` in compressed layouts) and nothing else.
/// Every call counts as one query, whatever the power.
pub trait PowerOracle: Sync {
    /// Number of qubits `U` acts on.
    fn qubits(&self) -> usize;

    fn apply_power(&self, state: &mut StateVector, power: u64) -> Result<(), SimError>;
}

impl<T: PowerOracle + ?Sized> PowerOracle for &T {
    fn qubits(&self) -> usize {
        (**self).qubits()
    }

    fn apply_power(&self, state: &mut StateVector, power: u64) -> Result<(), SimError> {
        (**self).apply_power(state, power)
    }
}
