//! The sealed oracle for `U`.
//!
//! A [`BlackBoxUnitary`] can be constructed from a matrix but never opened:
//! its only public action is [`BlackBoxUnitary::apply_power`]. The matrix is
//! visible inside this crate, which is where the `verify` oracles live.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use nalgebra::{DVector, SymmetricEigen};
use qpe_protocol::PowerOracle;
use qsim::{unitarity_residual, CMatrix, RngStream, SimError, StateVector, C64, UNITARY_TOL};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::OracleError;

/// Largest qubit count for dense constructors and oracles.
pub const MAX_DENSE_QUBITS: usize = 6;

fn qubits_of(dim: usize) -> Result<usize, OracleError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(OracleError::NotQubitDimension(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_DENSE_QUBITS {
        return Err(OracleError::TooManyQubits {
            got: n,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(n)
}

fn hermiticity_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Time-independent Hamiltonian `H` generating `U = exp(−iHt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianGenerator {
    matrix: CMatrix,
}

impl HermitianGenerator {
    pub fn new(matrix: CMatrix) -> Result<Self, OracleError> {
        if !matrix.is_square() {
            return Err(OracleError::ShapeMismatch(matrix.nrows(), matrix.ncols()));
        }
        qubits_of(matrix.nrows())?;
        let residual = hermiticity_residual(&matrix);
        if residual >= UNITARY_TOL {
            return Err(OracleError::NotHermitian(residual));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Largest minus smallest eigenvalue.
    pub fn spread(&self) -> f64 {
        let values = self.eigenvalues();
        values[values.len() - 1] - values[0]
    }
}

/// An `n`-qubit unitary that protocol code can only apply.
#[derive(Debug)]
pub struct BlackBoxUnitary {
    width: usize,
    hidden: CMatrix,
    /// `U^{2^i}` at index `i`.
    squares: Mutex<Vec<Arc<CMatrix>>>,
    powers: Mutex<HashMap<u64, Arc<CMatrix>>>,
    queries: AtomicU64,
}

impl BlackBoxUnitary {
    /// Seals an explicit unitary.
    pub fn seal(matrix: CMatrix) -> Result<Self, OracleError> {
        if !matrix.is_square() {
            return Err(OracleError::ShapeMismatch(matrix.nrows(), matrix.ncols()));
        }
        let width = qubits_of(matrix.nrows())?;
        let residual = unitarity_residual(&matrix);
        if residual >= UNITARY_TOL {
            return Err(OracleError::NotUnitary(residual));
        }
        Ok(Self {
            width,
            squares: Mutex::new(vec![Arc::new(matrix.clone())]),
            hidden: matrix,
            powers: Mutex::new(HashMap::new()),
            queries: AtomicU64::new(0),
        })
    }

    pub fn identity(width: usize) -> Result<Self, OracleError> {
        let dim = 1usize << width;
        Self::seal(CMatrix::identity(dim, dim))
    }

    /// Haar-distributed unitary: QR of a complex Gaussian matrix with the
    /// phases of the triangular factor's diagonal pushed into `Q`.
    pub fn haar_random(width: usize, rng: &mut RngStream) -> Result<Self, OracleError> {
        Self::seal(haar_matrix(width, rng)?)
    }

    /// `U = V diag(e^{iφ}) V†` for a Haar-random `V`. Phases are taken modulo 2π.
    pub fn from_spectrum(phases: &[f64], rng: &mut RngStream) -> Result<Self, OracleError> {
        if !phases.len().is_power_of_two() {
            return Err(OracleError::SpectrumLength {
                got: phases.len(),
                expected: phases.len().next_power_of_two(),
            });
        }
        let width = qubits_of(phases.len())?;
        if let Some(&bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(OracleError::NonFinitePhase(bad));
        }
        let basis = haar_matrix(width, rng)?;
        let diag = DVector::from_iterator(
            phases.len(),
            phases.iter().map(|&p| C64::from_polar(1.0, p)),
        );
        let matrix = &basis * CMatrix::from_diagonal(&diag) * basis.adjoint();
        Self::seal(matrix)
    }

    /// `U = exp(−iHt)` through the eigendecomposition of `H`.
    pub fn from_hamiltonian(
        generator: &HermitianGenerator,
        time: f64,
    ) -> Result<Self, OracleError> {
        if !(time > 0.0 && time.is_finite()) {
            return Err(OracleError::InvalidTime(time));
        }
        let eig = SymmetricEigen::new(generator.matrix.clone());
        let dim = generator.matrix.nrows();
        let phases = DVector::from_iterator(
            dim,
            eig.eigenvalues
                .iter()
                .map(|&l| C64::from_polar(1.0, -l * time)),
        );
        let v = &eig.eigenvectors;
        Self::seal(v * CMatrix::from_diagonal(&phases) * v.adjoint())
    }

    pub fn qubits(&self) -> usize {
        self.width
    }

    /// Number of `apply_power` calls so far.
    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset_queries(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }

    pub(crate) fn hidden(&self) -> &CMatrix {
        &self.hidden
    }

    fn square(&self, i: usize) -> Arc<CMatrix> {
        let mut squares = self.squares.lock().expect("square cache poisoned");
        while squares.len() <= i {
            let last = squares.last().expect("U itself is cached").clone();
            squares.push(Arc::new(&*last * &*last));
        }
        squares[i].clone()
    }

    /// `U^p` by repeated squaring, cached per exponent.
    pub(crate) fn power(&self, p: u64) -> Arc<CMatrix> {
        if let Some(m) = self.powers.lock().expect("power cache poisoned").get(&p) {
            return m.clone();
        }
        let dim = self.hidden.nrows();
        let mut acc: Option<CMatrix> = None;
        let mut bit = 0;
        let mut rest = p;
        while rest > 0 {
            if rest & 1 == 1 {
                let sq = self.square(bit);
                acc = Some(match acc {
                    None => (*sq).clone(),
                    Some(m) => &m * &*sq,
                });
            }
            rest >>= 1;
            bit += 1;
        }
        let result = Arc::new(acc.unwrap_or_else(|| CMatrix::identity(dim, dim)));
        self.powers
            .lock()
            .expect("power cache poisoned")
            .insert(p, result.clone());
        result
    }

    /// Applies `U^p` to the layout's oracle register. Counts as one query.
    pub fn apply_power(&self, state: &mut StateVector, p: u64) -> Result<(), SimError> {
        let register = state.layout().oracle_register();
        if register.len() != self.width {
            return Err(SimError::DimensionMismatch {
                rows: self.hidden.nrows(),
                cols: self.hidden.ncols(),
                qubits: register.len(),
            });
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        if p == 0 {
            return Ok(());
        }
        let qubits: Vec<usize> = register.collect();
        state.apply_unitary(&self.power(p), &qubits)
    }
}

impl PowerOracle for BlackBoxUnitary {
    fn qubits(&self) -> usize {
        self.width
    }

    fn apply_power(&self, state: &mut StateVector, power: u64) -> Result<(), SimError> {
        BlackBoxUnitary::apply_power(self, state, power)
    }
}

pub(crate) fn haar_matrix(width: usize, rng: &mut RngStream) -> Result<CMatrix, OracleError> {
    if width == 0 || width > MAX_DENSE_QUBITS {
        return Err(OracleError::TooManyQubits {
            got: width,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << width;
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let gaussian = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        ) * scale
    });
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn power_cache_and_identity() {
        let b = BlackBoxUnitary::haar_random(2, &mut RngStream::new(1)).unwrap();
        assert_eq!(*b.power(0), CMatrix::identity(4, 4));
        let p5 = b.power(5);
        let direct = b.hidden() * b.hidden() * b.hidden() * b.hidden() * b.hidden();
        assert!((&*p5 - direct).iter().all(|z| z.norm() < 1e-12));
        assert!(Arc::ptr_eq(&p5, &b.power(5)));
    }

    #[test]
    fn pauli_z_evolution() {
        let z = qsim::gates::pauli_z();
        let b = BlackBoxUnitary::from_hamiltonian(&HermitianGenerator::new(z).unwrap(), FRAC_PI_2)
            .unwrap();
        let m = b.hidden();
        assert!((m[(0, 0)] - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((m[(1, 1)] - C64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(m[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn construction_guards() {
        let bad = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(
            BlackBoxUnitary::seal(bad.clone()),
            Err(OracleError::NotUnitary(_))
        ));
        assert!(matches!(
            BlackBoxUnitary::seal(CMatrix::identity(3, 3)),
            Err(OracleError::NotQubitDimension(3))
        ));
        let mut skew = CMatrix::zeros(2, 2);
        skew[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            HermitianGenerator::new(skew),
            Err(OracleError::NotHermitian(_))
        ));
        let h = HermitianGenerator::new(CMatrix::identity(2, 2)).unwrap();
        assert!(BlackBoxUnitary::from_hamiltonian(&h, 0.0).is_err());
        assert!(matches!(
            BlackBoxUnitary::from_spectrum(&[0.0, 1.0, 2.0], &mut RngStream::new(0)),
            Err(OracleError::SpectrumLength {
                got: 3,
                expected: 4
            })
        ));
        assert!(BlackBoxUnitary::haar_random(7, &mut RngStream::new(0)).is_err());
    }
}
