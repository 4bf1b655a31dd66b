//! Initial states of the system registers `R1` and `R2`.

use qsim::{RngStream, C64, UNITARY_TOL};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ProtocolError;

/// Preparation of one `n`-qubit register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegisterPrep {
    /// Computational basis state `|index⟩`.
    Basis(usize),
    /// Eigenvector of the oracle with the given rank in ascending eigenphase
    /// order. Must be resolved into [`RegisterPrep::Amplitudes`] by a caller
    /// with oracle privileges before the protocol runs.
    Eigenstate(usize),
    /// Uniform mixture over the computational basis, sampled per shot.
    MaximallyMixed,
    /// Explicit normalized amplitudes.
    Amplitudes(Vec<C64>),
}

/// Weighted pure state in a mixture decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct PureComponent {
    pub weight: f64,
    pub amplitudes: Vec<C64>,
}

fn basis(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[index] = C64::new(1.0, 0.0);
    v
}

impl RegisterPrep {
    pub fn validate(&self, width: usize) -> Result<(), ProtocolError> {
        let dim = 1usize << width;
        match self {
            RegisterPrep::Basis(i) | RegisterPrep::Eigenstate(i) if *i >= dim => {
                Err(ProtocolError::InvalidPreparation(format!(
                    "index {i} out of range for dimension {dim}"
                )))
            }
            RegisterPrep::Amplitudes(v) => {
                if v.len() != dim {
                    return Err(ProtocolError::InvalidPreparation(format!(
                        "{} amplitudes given for dimension {dim}",
                        v.len()
                    )));
                }
                let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
                if (norm - 1.0).abs() > UNITARY_TOL {
                    return Err(ProtocolError::InvalidPreparation(format!(
                        "amplitudes have norm² {norm}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_pure(&self) -> bool {
        !matches!(self, RegisterPrep::MaximallyMixed)
    }

    /// Decomposition into weighted pure states.
    pub fn components(&self, width: usize) -> Result<Vec<PureComponent>, ProtocolError> {
        self.validate(width)?;
        let dim = 1usize << width;
        Ok(match self {
            RegisterPrep::Basis(i) => vec![PureComponent {
                weight: 1.0,
                amplitudes: basis(dim, *i),
            }],
            RegisterPrep::Amplitudes(v) => vec![PureComponent {
                weight: 1.0,
                amplitudes: v.clone(),
            }],
            RegisterPrep::MaximallyMixed => (0..dim)
                .map(|i| PureComponent {
                    weight: 1.0 / dim as f64,
                    amplitudes: basis(dim, i),
                })
                .collect(),
            RegisterPrep::Eigenstate(_) => return Err(ProtocolError::UnresolvedEigenstate),
        })
    }

    /// Draws one pure state. Returns the index of the drawn component, which
    /// identifies the state among the outputs of [`RegisterPrep::components`].
    pub fn draw(&self, width: usize, rng: &mut RngStream) -> Result<usize, ProtocolError> {
        match self {
            RegisterPrep::MaximallyMixed => Ok(rng.random_range(0..1usize << width)),
            RegisterPrep::Eigenstate(_) => Err(ProtocolError::UnresolvedEigenstate),
            _ => Ok(0),
        }
    }
}

/// Product preparation `ρ1 ⊗ ρ2` of the two system registers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialPreparation {
    pub r1: RegisterPrep,
    pub r2: RegisterPrep,
}

impl InitialPreparation {
    pub fn new(r1: RegisterPrep, r2: RegisterPrep) -> Self {
        Self { r1, r2 }
    }

    /// The same preparation on both registers.
    pub fn symmetric(prep: RegisterPrep) -> Self {
        Self {
            r1: prep.clone(),
            r2: prep,
        }
    }

    pub fn validate(&self, width: usize) -> Result<(), ProtocolError> {
        self.r1.validate(width)?;
        self.r2.validate(width)
    }

    pub fn is_pure(&self) -> bool {
        self.r1.is_pure() && self.r2.is_pure()
    }

    pub fn has_eigenstate(&self) -> bool {
        matches!(self.r1, RegisterPrep::Eigenstate(_))
            || matches!(self.r2, RegisterPrep::Eigenstate(_))
    }

    /// Registers swapped.
    pub fn swapped(&self) -> Self {
        Self {
            r1: self.r2.clone(),
            r2: self.r1.clone(),
        }
    }
}
