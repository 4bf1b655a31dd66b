//! Phase estimation of `U ⊗ U†` for a unitary available only as a black box,
//! and the spectral analysis built on repeated runs.
//!
//! This crate never sees a matrix for `U`. Everything it knows about the
//! oracle goes through [`PowerOracle`].

mod error;
mod oracle;
pub mod prep;
pub mod qpe;
pub mod spectra;

pub use error::ProtocolError;
pub use oracle::PowerOracle;
pub use prep::{InitialPreparation, RegisterPrep};
pub use qpe::{
    blackbox_qpe, build_blackbox_step, controlled_stage, decode_phase, exact_distribution, execute,
    protocol_circuit, simulate_pure, standard_qpe, Mode, Op, ProtocolConfig, Shots, StepVariant,
};
pub use spectra::{
    autocorrelation_estimate, choose_time_step, detect_periodicities, run_campaign,
    PeriodCandidate, PeriodReport, PhaseHistogram, SpectralDensity, DEFAULT_THRESHOLD,
};
