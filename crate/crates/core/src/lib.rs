//! Black-box phase estimation of `U ⊗ U†`.
//!
//! [`blackbox`] holds the sealed oracle and its constructors, [`verify`] the
//! brute-force ground truth with privileged access to the hidden matrix. The
//! protocol itself lives in [`protocol`], which depends on neither and sees
//! the oracle only through [`protocol::PowerOracle`].

pub mod blackbox;
mod error;
pub mod verify;

pub use qpe_protocol as protocol;
pub use qsim;

pub use blackbox::{BlackBoxUnitary, HermitianGenerator, MAX_DENSE_QUBITS};
pub use error::OracleError;
