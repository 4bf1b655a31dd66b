//! Brute-force ground truth. Functions here read the hidden matrix of a
//! [`BlackBoxUnitary`]; protocol code has no path to them.

use std::f64::consts::{PI, TAU};
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use qpe_protocol::{
    controlled_stage, execute, InitialPreparation, ProtocolConfig, RegisterPrep, SpectralDensity,
};
use qsim::{CMatrix, StateVector, C64};

use crate::{BlackBoxUnitary, OracleError};

/// Residual above which a decomposition is rejected.
pub const DECOMPOSITION_TOL: f64 = 1e-8;

/// Phases closer than this form one degenerate eigenspace.
pub const CLUSTER_GAP: f64 = 1e-8;

/// Default residual bound for [`circuit_equivalence`].
pub const EQUIVALENCE_TOL: f64 = 1e-9;

/// Largest qubit count for [`assemble_protocol_unitary`].
pub const MAX_ASSEMBLY_QUBITS: usize = 12;

/// Spectral decomposition of a unitary, sorted by ascending phase.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Eigenphases in `[0, 2π)`.
    pub phases: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `phases`.
    pub vectors: CMatrix,
    /// Index ranges of (numerically) degenerate eigenspaces.
    pub clusters: Vec<Range<usize>>,
}

impl EigenDecomposition {
    /// `V diag(e^{iφ}) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = DVector::from_iterator(
            self.phases.len(),
            self.phases.iter().map(|&p| C64::from_polar(1.0, p)),
        );
        &self.vectors * CMatrix::from_diagonal(&d) * self.vectors.adjoint()
    }

    pub fn eigenvector(&self, rank: usize) -> Vec<C64> {
        self.vectors.column(rank).iter().copied().collect()
    }

    /// Weight of a pure state on each eigenspace.
    fn cluster_weights(&self, state: &[C64]) -> Vec<f64> {
        let psi = DVector::from_column_slice(state);
        self.clusters
            .iter()
            .map(|range| {
                range
                    .clone()
                    .map(|a| self.vectors.column(a).dotc(&psi).norm_sqr())
                    .sum()
            })
            .collect()
    }

    fn cluster_phase(&self, range: &Range<usize>) -> f64 {
        range.clone().map(|a| self.phases[a]).sum::<f64>() / range.len() as f64
    }
}

/// Wraps a phase into `(−π, π]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Hidden matrix of the box. For white-box reference runs and `--reveal` only.
pub fn reveal_matrix(oracle: &BlackBoxUnitary) -> CMatrix {
    oracle.hidden().clone()
}

fn orthonormalize(columns: &mut CMatrix, range: Range<usize>) {
    for a in range.clone() {
        for b in range.start..a {
            let proj = columns.column(b).dotc(&columns.column(a));
            let prev = columns.column(b).clone_owned();
            columns.column_mut(a).axpy(-proj, &prev, C64::new(1.0, 0.0));
        }
        let norm = columns.column(a).norm();
        columns.column_mut(a).unscale_mut(norm);
    }
}

/// Eigendecomposition of an explicit unitary through its complex Schur form.
pub fn unitary_eigendecomposition(matrix: &CMatrix) -> Result<EigenDecomposition, OracleError> {
    let dim = matrix.nrows();
    let (q, t) = matrix.clone().schur().unpack();
    let mut order: Vec<(f64, usize)> = (0..dim)
        .map(|i| {
            let mut phase = t[(i, i)].arg().rem_euclid(TAU);
            if TAU - phase < CLUSTER_GAP {
                phase = 0.0;
            }
            (phase, i)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let phases: Vec<f64> = order.iter().map(|&(p, _)| p).collect();
    let mut vectors = DMatrix::from_fn(dim, dim, |r, c| q[(r, order[c].1)]);

    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=dim {
        if i == dim || phases[i] - phases[i - 1] >= CLUSTER_GAP {
            clusters.push(start..i);
            start = i;
        }
    }
    for range in &clusters {
        if range.len() > 1 {
            orthonormalize(&mut vectors, range.clone());
        }
    }

    let mut residual = 0.0f64;
    for (a, &phase) in phases.iter().enumerate() {
        let v = vectors.column(a);
        let diff = matrix * v - v * C64::from_polar(1.0, phase);
        residual = residual.max(diff.norm());
    }
    let gram = vectors.adjoint() * &vectors - CMatrix::identity(dim, dim);
    residual = residual.max(gram.iter().map(|z| z.norm()).fold(0.0, f64::max));
    if residual > DECOMPOSITION_TOL {
        return Err(OracleError::Decomposition(residual));
    }
    Ok(EigenDecomposition {
        phases,
        vectors,
        clusters,
    })
}

pub fn exact_eigenphases(oracle: &BlackBoxUnitary) -> Result<EigenDecomposition, OracleError> {
    unitary_eigendecomposition(oracle.hidden())
}

fn resolve_register(prep: &RegisterPrep, eig: &EigenDecomposition) -> RegisterPrep {
    match prep {
        RegisterPrep::Eigenstate(rank) => RegisterPrep::Amplitudes(eig.eigenvector(*rank)),
        other => other.clone(),
    }
}

/// Replaces eigenstate preparations by explicit amplitudes.
pub fn resolve_preparation(
    oracle: &BlackBoxUnitary,
    prep: &InitialPreparation,
) -> Result<InitialPreparation, OracleError> {
    prep.validate(oracle.qubits())?;
    if !prep.has_eigenstate() {
        return Ok(prep.clone());
    }
    let eig = exact_eigenphases(oracle)?;
    Ok(InitialPreparation::new(
        resolve_register(&prep.r1, &eig),
        resolve_register(&prep.r2, &eig),
    ))
}

fn eigenspace_weights(
    prep: &RegisterPrep,
    eig: &EigenDecomposition,
    width: usize,
) -> Result<Vec<f64>, OracleError> {
    let dim = 1usize << width;
    Ok(match resolve_register(prep, eig) {
        RegisterPrep::MaximallyMixed => eig
            .clusters
            .iter()
            .map(|r| r.len() as f64 / dim as f64)
            .collect(),
        pure => {
            let components = pure.components(width)?;
            eig.cluster_weights(&components[0].amplitudes)
        }
    })
}

/// Distribution of eigenphase differences `φ_a − φ_b` (wrapped to `(−π, π]`)
/// weighted by `p1(a) p2(b)`, with `p` the weight of each register's
/// preparation on the eigenspaces of `U`.
pub fn exact_difference_distribution(
    oracle: &BlackBoxUnitary,
    prep: &InitialPreparation,
) -> Result<SpectralDensity, OracleError> {
    let width = oracle.qubits();
    prep.validate(width)?;
    let eig = exact_eigenphases(oracle)?;
    let p1 = eigenspace_weights(&prep.r1, &eig, width)?;
    let p2 = eigenspace_weights(&prep.r2, &eig, width)?;
    let mut support = Vec::new();
    let mut weights = Vec::new();
    for (a, ra) in eig.clusters.iter().enumerate() {
        for (b, rb) in eig.clusters.iter().enumerate() {
            support.push(wrap_phase(eig.cluster_phase(ra) - eig.cluster_phase(rb)));
            weights.push(p1[a] * p2[b]);
        }
    }
    Ok(SpectralDensity::new(support, weights)?)
}

/// How [`circuit_equivalence`] compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceMode {
    /// `A = e^{iθ} B` for one θ.
    GlobalPhase,
    /// Block-diagonal in the low `ancilla_qubits` bits, with a phase per block.
    Branchwise { ancilla_qubits: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    pub residual: f64,
}

fn aligned_residual(a: &CMatrix, b: &CMatrix, entries: &[(usize, usize)]) -> f64 {
    let anchor = entries
        .iter()
        .copied()
        .max_by(|x, y| b[*x].norm().total_cmp(&b[*y].norm()));
    let phase = match anchor {
        Some(idx) if b[idx].norm() > 0.0 && a[idx].norm() > 0.0 => {
            let ratio = a[idx] / b[idx];
            ratio / ratio.norm()
        }
        _ => C64::new(1.0, 0.0),
    };
    entries
        .iter()
        .map(|&idx| (a[idx] - phase * b[idx]).norm())
        .fold(0.0, f64::max)
}

/// Compares two explicit unitaries up to global or per-branch phases.
pub fn circuit_equivalence(
    a: &CMatrix,
    b: &CMatrix,
    mode: EquivalenceMode,
) -> Result<Equivalence, OracleError> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(OracleError::ShapeMismatch(a.nrows(), b.nrows()));
    }
    let dim = a.nrows();
    if dim > 1 << MAX_ASSEMBLY_QUBITS {
        return Err(OracleError::AssemblyTooLarge {
            got: dim.trailing_zeros() as usize,
            max: MAX_ASSEMBLY_QUBITS,
        });
    }
    let residual = match mode {
        EquivalenceMode::GlobalPhase => {
            let all: Vec<(usize, usize)> = (0..dim)
                .flat_map(|r| (0..dim).map(move |c| (r, c)))
                .collect();
            aligned_residual(a, b, &all)
        }
        EquivalenceMode::Branchwise { ancilla_qubits } => {
            let mask = (1usize << ancilla_qubits) - 1;
            let mut blocks = vec![Vec::new(); 1 << ancilla_qubits];
            let mut off_block = 0.0f64;
            for r in 0..dim {
                for c in 0..dim {
                    if r & mask == c & mask {
                        blocks[r & mask].push((r, c));
                    } else {
                        off_block = off_block.max((a[(r, c)] - b[(r, c)]).norm());
                    }
                }
            }
            blocks
                .iter()
                .map(|entries| aligned_residual(a, b, entries))
                .fold(off_block, f64::max)
        }
    };
    Ok(Equivalence {
        equivalent: residual < EQUIVALENCE_TOL,
        residual,
    })
}

/// Matrix of the protocol's controlled stage (`∏_j V'_j` as built from
/// swaps and oracle calls), one column per computational basis input.
pub fn assemble_protocol_unitary(
    oracle: &BlackBoxUnitary,
    config: &ProtocolConfig,
) -> Result<CMatrix, OracleError> {
    let layout = config.layout;
    let qubits = layout.total_qubits();
    if qubits > MAX_ASSEMBLY_QUBITS {
        return Err(OracleError::AssemblyTooLarge {
            got: qubits,
            max: MAX_ASSEMBLY_QUBITS,
        });
    }
    let dim = layout.dimension();
    let ops = controlled_stage(config);
    let mut matrix = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[col] = C64::new(1.0, 0.0);
        let mut state = StateVector::from_amplitudes(layout, amps)?;
        execute(&ops, oracle, &mut state)?;
        matrix.column_mut(col).copy_from_slice(state.amplitudes());
    }
    Ok(matrix)
}

/// `∏_j V'_j` on `Ra ⊗ R1 ⊗ R2` from Kronecker products of the hidden
/// matrix, independent of the simulator.
///
/// Index order is little-endian: ancilla bits lowest, then `R1`, then `R2`.
pub fn reference_controlled_stage(oracle: &BlackBoxUnitary, ancilla: usize) -> CMatrix {
    let u = oracle.hidden();
    let d = u.nrows();
    let eye = CMatrix::identity(d, d);
    let ancilla_eye = |bits: usize| CMatrix::identity(1 << bits, 1 << bits);
    let projector = |bit: usize| {
        let mut p = CMatrix::zeros(2, 2);
        p[(bit, bit)] = C64::new(1.0, 0.0);
        p
    };
    let total = (1usize << ancilla) * d * d;
    let mut product = CMatrix::identity(total, total);
    let mut power = u.clone();
    for j in 0..ancilla {
        if j > 0 {
            power = &power * &power;
        }
        // Ancilla operator for qubit j: kron(I_high, P, I_low).
        let anc = |bit| {
            ancilla_eye(ancilla - j - 1)
                .kronecker(&projector(bit))
                .kronecker(&ancilla_eye(j))
        };
        // kron(R2, R1, Ra) in matrix order.
        let on_r1 = eye.kronecker(&power).kronecker(&anc(1));
        let on_r2 = power.kronecker(&eye).kronecker(&anc(0));
        product = (on_r1 + on_r2) * product;
    }
    product
}

/// Extends an operator on the low qubits by the identity on `extra` high qubits.
pub fn extend_identity(op: &CMatrix, extra: usize) -> CMatrix {
    CMatrix::identity(1 << extra, 1 << extra).kronecker(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(0.0), 0.0);
        assert!((wrap_phase(PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(1.5 * PI) + 0.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn diagonal_phases() {
        let mut m = CMatrix::identity(2, 2);
        m[(1, 1)] = C64::new(0.0, 1.0);
        let eig = unitary_eigendecomposition(&m).unwrap();
        assert!(eig.phases[0].abs() < 1e-12);
        assert!((eig.phases[1] - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_identity_is_one_cluster() {
        let eig = unitary_eigendecomposition(&CMatrix::identity(4, 4)).unwrap();
        assert_eq!(eig.clusters, vec![0..4]);
    }
}
