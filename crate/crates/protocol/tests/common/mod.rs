#![allow(dead_code)]

use std::f64::consts::TAU;
use std::sync::atomic::{AtomicU64, Ordering};

use qpe_protocol::PowerOracle;
use qsim::{CMatrix, SimError, StateVector, C64};

/// Test oracle over an explicit matrix, counting queries.
pub struct MatrixOracle {
    pub matrix: CMatrix,
    pub queries: AtomicU64,
}

impl MatrixOracle {
    pub fn new(matrix: CMatrix) -> Self {
        Self {
            matrix,
            queries: AtomicU64::new(0),
        }
    }

    /// Diagonal unitary with eigenphases `2π · fractions[i]`.
    pub fn diagonal(fractions: &[f64]) -> Self {
        let d = fractions.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, f) in fractions.iter().enumerate() {
            m[(i, i)] = C64::from_polar(1.0, TAU * f);
        }
        Self::new(m)
    }

    pub fn power(&self, p: u64) -> CMatrix {
        let d = self.matrix.nrows();
        (0..p).fold(CMatrix::identity(d, d), |acc, _| &acc * &self.matrix)
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }
}

impl PowerOracle for MatrixOracle {
    fn qubits(&self) -> usize {
        self.matrix.nrows().trailing_zeros() as usize
    }

    fn apply_power(&self, state: &mut StateVector, power: u64) -> Result<(), SimError> {
        self.queries.fetch_add(1, Ordering::SeqCst);
        let qubits: Vec<usize> = state.layout().oracle_register().collect();
        state.apply_unitary(&self.power(power), &qubits)
    }
}

pub fn basis(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[i] = C64::new(1.0, 0.0);
    v
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_diff_f(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
