use std::ops::Range;

use crate::SimError;

/// Largest total qubit count accepted unless a custom cap is given.
pub const DEFAULT_QUBIT_CAP: usize = 26;

/// Which registers a layout carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayoutKind {
    /// `Ra | R1 | R2 | H`; the oracle acts on `H`.
    FullSwap,
    /// `Ra | R1 | R2`; the oracle acts on `R1` directly.
    Compressed,
    /// `Ra | T`; a single target register for textbook phase estimation.
    Single,
}

/// Partition of qubit indices into the ancilla register and the
/// `n`-qubit system registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    ancilla: usize,
    width: usize,
    kind: LayoutKind,
}

impl RegisterLayout {
    /// Faithful layout with the oracle register `H`, capped at [`DEFAULT_QUBIT_CAP`].
    pub fn new(ancilla: usize, width: usize) -> Result<Self, SimError> {
        Self::with_kind(ancilla, width, LayoutKind::FullSwap, DEFAULT_QUBIT_CAP)
    }

    pub fn compressed(ancilla: usize, width: usize) -> Result<Self, SimError> {
        Self::with_kind(ancilla, width, LayoutKind::Compressed, DEFAULT_QUBIT_CAP)
    }

    pub fn single(ancilla: usize, width: usize) -> Result<Self, SimError> {
        Self::with_kind(ancilla, width, LayoutKind::Single, DEFAULT_QUBIT_CAP)
    }

    pub fn with_kind(
        ancilla: usize,
        width: usize,
        kind: LayoutKind,
        cap: usize,
    ) -> Result<Self, SimError> {
        if ancilla == 0 || width == 0 {
            return Err(SimError::EmptyRegister { ancilla, width });
        }
        let layout = Self {
            ancilla,
            width,
            kind,
        };
        let required = layout.total_qubits();
        if required > cap {
            return Err(SimError::QubitCapExceeded { required, cap });
        }
        Ok(layout)
    }

    /// Ancilla qubit count `k`.
    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla
    }

    /// Per-register qubit count `n`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn kind(&self) -> LayoutKind {
        self.kind
    }

    pub fn total_qubits(&self) -> usize {
        let registers = match self.kind {
            LayoutKind::FullSwap => 3,
            LayoutKind::Compressed => 2,
            LayoutKind::Single => 1,
        };
        self.ancilla + registers * self.width
    }

    pub fn dimension(&self) -> usize {
        1usize << self.total_qubits()
    }

    pub fn ancilla(&self) -> Range<usize> {
        0..self.ancilla
    }

    pub fn r1(&self) -> Range<usize> {
        self.ancilla..self.ancilla + self.width
    }

    /// Second system register; empty for [`LayoutKind::Single`].
    pub fn r2(&self) -> Range<usize> {
        let start = self.ancilla + self.width;
        match self.kind {
            LayoutKind::Single => start..start,
            _ => start..start + self.width,
        }
    }

    /// The target register `H`, present only in the full-swap layout.
    pub fn target(&self) -> Option<Range<usize>> {
        match self.kind {
            LayoutKind::FullSwap => {
                let start = self.ancilla + 2 * self.width;
                Some(start..start + self.width)
            }
            _ => None,
        }
    }

    /// Register the black-box oracle acts on.
    pub fn oracle_register(&self) -> Range<usize> {
        self.target().unwrap_or_else(|| self.r1())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_partition_all_qubits() {
        for kind in [
            LayoutKind::FullSwap,
            LayoutKind::Compressed,
            LayoutKind::Single,
        ] {
            let layout = RegisterLayout::with_kind(3, 2, kind, DEFAULT_QUBIT_CAP).unwrap();
            let mut seen = vec![0u8; layout.total_qubits()];
            let mut ranges = vec![layout.ancilla(), layout.r1(), layout.r2()];
            ranges.extend(layout.target());
            for q in ranges.into_iter().flatten() {
                seen[q] += 1;
            }
            assert!(seen.iter().all(|&c| c == 1), "{kind:?}: {seen:?}");
        }
    }

    #[test]
    fn full_layout_ranges() {
        let layout = RegisterLayout::new(2, 3).unwrap();
        assert_eq!(layout.total_qubits(), 11);
        assert_eq!(layout.r1(), 2..5);
        assert_eq!(layout.r2(), 5..8);
        assert_eq!(layout.target(), Some(8..11));
        assert_eq!(layout.oracle_register(), 8..11);
        let compressed = RegisterLayout::compressed(2, 3).unwrap();
        assert_eq!(compressed.oracle_register(), 2..5);
    }

    #[test]
    fn cap_and_empty_guards() {
        assert_eq!(
            RegisterLayout::new(20, 10),
            Err(SimError::QubitCapExceeded {
                required: 50,
                cap: 26
            })
        );
        assert!(RegisterLayout::new(0, 1).is_err());
        assert!(RegisterLayout::new(1, 0).is_err());
    }
}
