//! Dense state-vector simulation for phase-estimation circuits.
//!
//! Qubit `q` is bit `q` of the amplitude index (little-endian). Registers are
//! laid out in ascending order as `Ra | R1 | R2 | H`, see [`RegisterLayout`].

mod error;
pub mod gates;
mod kernel;
mod layout;
mod rng;
mod state;

pub use error::SimError;
pub use kernel::{is_unitary, unitarity_residual};
pub use layout::{LayoutKind, RegisterLayout, DEFAULT_QUBIT_CAP};
pub use rng::{sample_index, RngStream};
pub use state::StateVector;

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for gates and oracle powers.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Tolerance for unitarity and normalization checks.
pub const UNITARY_TOL: f64 = 1e-10;

/// Tolerance for elementwise amplitude comparisons.
pub const ELEMENT_TOL: f64 = 1e-12;

/// Projections with less remaining weight than this are rejected.
pub const DEGENERATE_NORM: f64 = 1e-12;
