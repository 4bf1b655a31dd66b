//! Standard gate matrices. Matrix index bit `t` maps to the `t`-th listed qubit.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{CMatrix, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn hadamard() -> CMatrix {
    let h = FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn swap() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(3, 3)] = c(1.0, 0.0);
    m
}

/// `block_diag(1, U)`: the control is the highest matrix bit, `U` acts on the rest.
pub fn controlled(unitary: &CMatrix) -> CMatrix {
    let d = unitary.nrows();
    let mut m = CMatrix::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(unitary);
    m
}

/// Controlled swap on qubits `[a, b, control]`.
pub fn fredkin() -> CMatrix {
    controlled(&swap())
}

/// The ancilla readout transform `|l⟩ ↦ 2^{-k/2} Σ_m e^{−2πi l m / 2^k} |m⟩`.
pub fn inverse_fourier_matrix(qubits: usize) -> CMatrix {
    let dim = 1usize << qubits;
    let norm = 1.0 / (dim as f64).sqrt();
    CMatrix::from_fn(dim, dim, |m, l| {
        let angle = -2.0 * PI * ((l * m) % dim) as f64 / dim as f64;
        C64::from_polar(norm, angle)
    })
}
