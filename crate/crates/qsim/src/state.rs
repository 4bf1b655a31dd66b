use std::f64::consts::PI;
use std::ops::Range;

use crate::kernel::{apply_matrix, permute_pairs, phase_on_mask};
use crate::{
    gates, sample_index, unitarity_residual, CMatrix, RegisterLayout, RngStream, SimError, C64,
    DEGENERATE_NORM, UNITARY_TOL,
};

/// Normalized amplitudes over a [`RegisterLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    layout: RegisterLayout,
}

impl StateVector {
    /// All-zeros computational basis state.
    pub fn new(layout: RegisterLayout) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); layout.dimension()];
        amps[0] = C64::new(1.0, 0.0);
        Self { amps, layout }
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<C64>) -> Result<Self, SimError> {
        if amps.len() != layout.dimension() {
            return Err(SimError::AmplitudeLength {
                got: amps.len(),
                expected: layout.dimension(),
            });
        }
        let state = Self { amps, layout };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > UNITARY_TOL {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Product state with the given register contents; unlisted registers are |0…0⟩.
    ///
    /// Each entry is `(register, amplitudes)` with `2^len(register)` normalized amplitudes.
    pub fn product(
        layout: RegisterLayout,
        registers: &[(Range<usize>, &[C64])],
    ) -> Result<Self, SimError> {
        let mut amps = vec![C64::new(1.0, 0.0)];
        let mut covered = 0usize;
        let mut sorted: Vec<_> = registers.iter().collect();
        sorted.sort_by_key(|(r, _)| r.start);
        for (range, local) in sorted {
            if range.start < covered {
                return Err(SimError::OverlappingRegisters);
            }
            if range.end > layout.total_qubits() {
                return Err(SimError::QubitOutOfRange {
                    qubit: range.end - 1,
                    total: layout.total_qubits(),
                });
            }
            let expected = 1usize << range.len();
            if local.len() != expected {
                return Err(SimError::AmplitudeLength {
                    got: local.len(),
                    expected,
                });
            }
            let norm: f64 = local.iter().map(|a| a.norm_sqr()).sum();
            if (norm - 1.0).abs() > UNITARY_TOL {
                return Err(SimError::NotNormalized(norm));
            }
            // Pad the gap below this register with |0⟩ qubits, then extend.
            let gap = 1usize << (range.start - covered);
            let mut padded = vec![C64::new(0.0, 0.0); amps.len() * gap];
            padded[..amps.len()].copy_from_slice(&amps);
            amps = local
                .iter()
                .flat_map(|&hi| padded.iter().map(move |&lo| hi * lo))
                .collect();
            covered = range.end;
        }
        let tail = 1usize << (layout.total_qubits() - covered);
        let mut full = vec![C64::new(0.0, 0.0); amps.len() * tail];
        full[..amps.len()].copy_from_slice(&amps);
        Ok(Self { amps: full, layout })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn total_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<(), SimError> {
        let total = self.total_qubits();
        let mut seen = 0usize;
        for &q in qubits {
            if q >= total {
                return Err(SimError::QubitOutOfRange { qubit: q, total });
            }
            if seen >> q & 1 == 1 {
                return Err(SimError::DuplicateQubit(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    /// Applies `matrix` to `qubits`; matrix bit `t` is `qubits[t]`.
    pub fn apply_unitary(&mut self, matrix: &CMatrix, qubits: &[usize]) -> Result<(), SimError> {
        self.check_qubits(qubits)?;
        let dim = 1usize << qubits.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(SimError::DimensionMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                qubits: qubits.len(),
            });
        }
        let residual = unitarity_residual(matrix);
        if residual >= UNITARY_TOL {
            return Err(SimError::NotUnitary { residual });
        }
        if qubits.is_empty() {
            let phase = matrix[(0, 0)];
            self.amps.iter_mut().for_each(|a| *a *= phase);
            return Ok(());
        }
        apply_matrix(&mut self.amps, matrix, qubits);
        Ok(())
    }

    pub fn hadamard_layer(&mut self, qubits: &[usize]) -> Result<(), SimError> {
        self.check_qubits(qubits)?;
        let h = gates::hadamard();
        for &q in qubits {
            apply_matrix(&mut self.amps, &h, &[q]);
        }
        Ok(())
    }

    pub fn pauli_x(&mut self, qubit: usize) -> Result<(), SimError> {
        self.check_qubits(&[qubit])?;
        apply_matrix(&mut self.amps, &gates::pauli_x(), &[qubit]);
        Ok(())
    }

    fn swap_pairs(
        &self,
        a: &Range<usize>,
        b: &Range<usize>,
    ) -> Result<Vec<(usize, usize)>, SimError> {
        if a.len() != b.len() {
            return Err(SimError::RegisterLengthMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        if a.start < b.end && b.start < a.end {
            return Err(SimError::OverlappingRegisters);
        }
        let qubits: Vec<usize> = a.clone().chain(b.clone()).collect();
        self.check_qubits(&qubits)?;
        Ok(a.clone().zip(b.clone()).collect())
    }

    /// Exchanges the contents of two equal-length, disjoint registers.
    pub fn swap_registers(&mut self, a: Range<usize>, b: Range<usize>) -> Result<(), SimError> {
        let pairs = self.swap_pairs(&a, &b)?;
        permute_pairs(&mut self.amps, &pairs, 0);
        Ok(())
    }

    /// Exchanges two registers on the branch where `control` is |1⟩.
    pub fn conditional_swap(
        &mut self,
        control: usize,
        a: Range<usize>,
        b: Range<usize>,
    ) -> Result<(), SimError> {
        let pairs = self.swap_pairs(&a, &b)?;
        self.check_qubits(&[control])?;
        if a.contains(&control) || b.contains(&control) {
            return Err(SimError::ControlInsideRegister(control));
        }
        permute_pairs(&mut self.amps, &pairs, 1 << control);
        Ok(())
    }

    fn controlled_phase(&mut self, a: usize, b: usize, angle: f64) {
        phase_on_mask(&mut self.amps, 1 << a | 1 << b, C64::from_polar(1.0, angle));
    }

    /// Fourier readout on `qubits` (qubit `qubits[t]` is bit `t` of `l`):
    /// `|l⟩ ↦ 2^{-k/2} Σ_m e^{−2πi l m / 2^k} |m⟩`.
    pub fn inverse_qft(&mut self, qubits: &[usize]) -> Result<(), SimError> {
        self.fourier(qubits, -1.0)
    }

    /// Adjoint of [`StateVector::inverse_qft`].
    pub fn qft(&mut self, qubits: &[usize]) -> Result<(), SimError> {
        self.fourier(qubits, 1.0)
    }

    // Textbook decomposition: Hadamards with controlled phases from the most
    // significant bit down, followed by a bit reversal.
    fn fourier(&mut self, qubits: &[usize], sign: f64) -> Result<(), SimError> {
        self.check_qubits(qubits)?;
        let k = qubits.len();
        let h = gates::hadamard();
        for i in (0..k).rev() {
            apply_matrix(&mut self.amps, &h, &[qubits[i]]);
            for j in (0..i).rev() {
                let angle = sign * PI / (1u64 << (i - j)) as f64;
                self.controlled_phase(qubits[i], qubits[j], angle);
            }
        }
        let reversal: Vec<(usize, usize)> =
            (0..k / 2).map(|i| (qubits[i], qubits[k - 1 - i])).collect();
        permute_pairs(&mut self.amps, &reversal, 0);
        Ok(())
    }

    /// Exact marginal distribution of the ancilla register.
    pub fn ancilla_distribution(&self) -> Vec<f64> {
        let k = self.layout.ancilla_qubits();
        let mask = (1usize << k) - 1;
        let mut dist = vec![0.0; 1 << k];
        for (i, a) in self.amps.iter().enumerate() {
            dist[i & mask] += a.norm_sqr();
        }
        dist
    }

    /// Samples the ancilla register, collapses the state, and returns the outcome.
    pub fn measure_ancilla(&mut self, rng: &mut RngStream) -> Result<usize, SimError> {
        let dist = self.ancilla_distribution();
        let outcome = sample_index(&dist, rng);
        let weight = dist[outcome];
        if weight < DEGENERATE_NORM {
            return Err(SimError::DegenerateProjection { outcome, weight });
        }
        let mask = (1usize << self.layout.ancilla_qubits()) - 1;
        let scale = 1.0 / weight.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == outcome {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        Ok(outcome)
    }
}
