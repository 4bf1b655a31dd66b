//! Histograms of decoded phase differences, the autocorrelation of the
//! density of states, and periodicity detection.

use std::f64::consts::{PI, TAU};

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::qpe::{blackbox_qpe, decode_phase, ProtocolConfig};
use crate::{InitialPreparation, PowerOracle, ProtocolError};

/// Default relative detection threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

const MASS_TOL: f64 = 1e-10;

/// Outcome counts over `m ∈ [0, 2^k)`, or exact probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseHistogram {
    pub k: usize,
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
    /// Present for exact runs; `counts` is then all zero.
    pub exact: Option<Vec<f64>>,
}

impl PhaseHistogram {
    pub fn sampled(k: usize, counts: Vec<u64>, seed: u64) -> Result<Self, ProtocolError> {
        if counts.len() != 1 << k {
            return Err(ProtocolError::IncompatibleHistograms(
                "count vector length is not 2^k",
            ));
        }
        let shots = counts.iter().sum();
        Ok(Self {
            k,
            counts,
            shots,
            seed,
            exact: None,
        })
    }

    pub fn exact(k: usize, probabilities: Vec<f64>, seed: u64) -> Result<Self, ProtocolError> {
        if probabilities.len() != 1 << k {
            return Err(ProtocolError::IncompatibleHistograms(
                "probability vector length is not 2^k",
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > MASS_TOL || probabilities.iter().any(|&p| p < -MASS_TOL) {
            return Err(ProtocolError::InvalidDensity(format!(
                "exact probabilities sum to {total}"
            )));
        }
        Ok(Self {
            k,
            counts: vec![0; 1 << k],
            shots: 0,
            seed,
            exact: Some(probabilities),
        })
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact probabilities, or empirical frequencies.
    pub fn probabilities(&self) -> Result<Vec<f64>, ProtocolError> {
        if let Some(p) = &self.exact {
            return Ok(p.clone());
        }
        if self.shots == 0 {
            return Err(ProtocolError::ZeroShots);
        }
        Ok(self
            .counts
            .iter()
            .map(|&c| c as f64 / self.shots as f64)
            .collect())
    }

    /// Per-bin binomial standard deviation of the empirical frequency;
    /// zero for exact histograms.
    pub fn standard_errors(&self) -> Result<Vec<f64>, ProtocolError> {
        if self.is_exact() {
            return Ok(vec![0.0; 1 << self.k]);
        }
        let shots = self.shots as f64;
        Ok(self
            .probabilities()?
            .iter()
            .map(|p| (p * (1.0 - p) / shots).sqrt())
            .collect())
    }

    pub fn decoded_phases(&self) -> Vec<f64> {
        (0..1usize << self.k)
            .map(|m| decode_phase(m, self.k).expect("m < 2^k"))
            .collect()
    }

    /// Sum of two sampled campaigns. The seed of `self` is kept.
    pub fn merge(&self, other: &Self) -> Result<Self, ProtocolError> {
        if self.k != other.k {
            return Err(ProtocolError::IncompatibleHistograms(
                "different resolutions",
            ));
        }
        if self.is_exact() || other.is_exact() {
            return Err(ProtocolError::IncompatibleHistograms(
                "exact histograms carry no counts",
            ));
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a + b)
            .collect();
        Self::sampled(self.k, counts, self.seed)
    }

    /// Total variation distance between the two probability vectors.
    pub fn total_variation(&self, other: &Self) -> Result<f64, ProtocolError> {
        if self.k != other.k {
            return Err(ProtocolError::IncompatibleHistograms(
                "different resolutions",
            ));
        }
        let (p, q) = (self.probabilities()?, other.probabilities()?);
        Ok(0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }
}

/// Probability measure over phases (eigenphases, or their differences).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub support: Vec<f64>,
    pub weights: Vec<f64>,
    /// `k` when `support[m]` is the decoded grid phase of outcome `m`.
    pub grid_bits: Option<usize>,
}

impl SpectralDensity {
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self, ProtocolError> {
        if support.len() != weights.len() {
            return Err(ProtocolError::InvalidDensity(
                "support and weights differ in length".into(),
            ));
        }
        if weights.iter().any(|&w| w < -MASS_TOL || !w.is_finite()) {
            return Err(ProtocolError::InvalidDensity("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(ProtocolError::InvalidDensity(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Self {
            support,
            weights,
            grid_bits: None,
        })
    }

    /// Weights accumulated on the grid `2πm/2^k`, indexed by `m`.
    pub fn binned(&self, k: usize) -> Vec<f64> {
        let size = 1usize << k;
        let mut bins = vec![0.0; size];
        for (&phase, &w) in self.support.iter().zip(&self.weights) {
            let m = (phase * size as f64 / TAU).round().rem_euclid(size as f64) as usize % size;
            bins[m] += w;
        }
        bins
    }

    /// The density binned onto the `2^k` grid.
    pub fn on_grid(&self, k: usize) -> Self {
        let support = (0..1usize << k)
            .map(|m| decode_phase(m, k).expect("m < 2^k"))
            .collect();
        Self {
            support,
            weights: self.binned(k),
            grid_bits: Some(k),
        }
    }

    /// Total weight at phases within `tol` of `phase` modulo 2π.
    pub fn mass_at(&self, phase: f64, tol: f64) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .filter(|(&s, _)| {
                let d = (s - phase).rem_euclid(TAU);
                d.min(TAU - d) <= tol
            })
            .map(|(_, &w)| w)
            .sum()
    }
}

/// One Fourier frequency of the binned autocorrelation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodCandidate {
    /// Cycles per 2π.
    pub frequency: usize,
    /// `2π / frequency`.
    pub period: f64,
    pub magnitude: f64,
    /// Magnitude relative to the largest non-zero-frequency magnitude.
    pub relative: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub grid_bits: usize,
    pub threshold: f64,
    /// All mass sits at zero difference; no period is meaningful.
    pub degenerate: bool,
    /// Frequencies `1..=2^{k−1}` in ascending order.
    pub candidates: Vec<PeriodCandidate>,
}

impl PeriodReport {
    /// The longest detected period (the fundamental of the passing set).
    pub fn top(&self) -> Option<&PeriodCandidate> {
        self.candidates.iter().find(|c| c.passed)
    }

    pub fn detected(&self) -> impl Iterator<Item = &PeriodCandidate> {
        self.candidates.iter().filter(|c| c.passed)
    }
}

/// Largest time step `t` with `t·Δ ≤ π`.
pub fn choose_time_step(delta_bound: f64) -> Result<f64, ProtocolError> {
    if !(delta_bound > 0.0 && delta_bound.is_finite()) {
        return Err(ProtocolError::InvalidSpreadBound(delta_bound));
    }
    Ok(PI / delta_bound)
}

/// Repeated protocol runs aggregated into a histogram.
pub fn run_campaign<O: PowerOracle>(
    oracle: &O,
    prep: &InitialPreparation,
    config: &ProtocolConfig,
) -> Result<PhaseHistogram, ProtocolError> {
    blackbox_qpe(oracle, prep, config)
}

/// Normalized distribution over decoded signed phase differences.
pub fn autocorrelation_estimate(hist: &PhaseHistogram) -> Result<SpectralDensity, ProtocolError> {
    let weights = hist.probabilities()?;
    Ok(SpectralDensity {
        support: hist.decoded_phases(),
        weights,
        grid_bits: Some(hist.k),
    })
}

/// Fourier analysis of a grid-binned difference density.
pub fn detect_periodicities(
    density: &SpectralDensity,
    threshold: f64,
) -> Result<PeriodReport, ProtocolError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(ProtocolError::InvalidThreshold(threshold));
    }
    let k = density.grid_bits.ok_or(ProtocolError::NotBinned)?;
    let bins = density.binned(k);
    let total: f64 = bins.iter().sum();
    if total <= MASS_TOL {
        return Err(ProtocolError::EmptyDensity);
    }
    if bins[0] >= total - MASS_TOL {
        return Ok(PeriodReport {
            grid_bits: k,
            threshold,
            degenerate: true,
            candidates: vec![],
        });
    }

    let size = bins.len();
    let mut spectrum: Vec<Complex<f64>> = bins.iter().map(|&w| Complex::new(w, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(size)
        .process(&mut spectrum);

    let magnitudes: Vec<f64> = spectrum[1..=size / 2].iter().map(|z| z.norm()).collect();
    let peak = magnitudes.iter().copied().fold(0.0, f64::max);
    // A flat density leaves only rounding noise away from zero frequency.
    let resolvable = peak > MASS_TOL * total;
    let candidates = magnitudes
        .iter()
        .enumerate()
        .map(|(i, &magnitude)| {
            let relative = if resolvable { magnitude / peak } else { 0.0 };
            PeriodCandidate {
                frequency: i + 1,
                period: TAU / (i + 1) as f64,
                magnitude,
                relative,
                passed: resolvable && relative >= threshold,
            }
        })
        .collect();
    Ok(PeriodReport {
        grid_bits: k,
        threshold,
        degenerate: false,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_density(k: usize, bins: Vec<f64>) -> SpectralDensity {
        let support = (0..1usize << k)
            .map(|m| decode_phase(m, k).unwrap())
            .collect();
        SpectralDensity {
            support,
            weights: bins,
            grid_bits: Some(k),
        }
    }

    #[test]
    fn time_step_from_spread() {
        assert!((choose_time_step(PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((choose_time_step(TAU).unwrap() - 0.5).abs() < 1e-15);
        assert!((choose_time_step(1.0).unwrap() - PI).abs() < 1e-15);
        assert!(choose_time_step(0.0).is_err());
        assert!(choose_time_step(-1.0).is_err());
        assert!(choose_time_step(f64::NAN).is_err());
    }

    #[test]
    fn flat_density_detects_nothing() {
        let report = detect_periodicities(&grid_density(4, vec![1.0 / 16.0; 16]), 0.5).unwrap();
        assert!(!report.degenerate);
        assert!(report.top().is_none());
    }

    #[test]
    fn delta_at_zero_is_degenerate() {
        let mut bins = vec![0.0; 16];
        bins[0] = 1.0;
        let report = detect_periodicities(&grid_density(4, bins), 0.5).unwrap();
        assert!(report.degenerate);
        assert!(report.candidates.is_empty());
    }

    #[test]
    fn comb_density_reports_spacing() {
        // Mass on every fourth bin of 32: spacing 2π/8.
        let bins = (0..32)
            .map(|m| if m % 4 == 0 { 1.0 / 8.0 } else { 0.0 })
            .collect();
        let report = detect_periodicities(&grid_density(5, bins), 0.5).unwrap();
        let top = report.top().unwrap();
        assert_eq!(top.frequency, 8);
        assert!((top.period - TAU / 8.0).abs() < 1e-15);
        let detected: Vec<usize> = report.detected().map(|c| c.frequency).collect();
        assert_eq!(detected, vec![8, 16]);
    }

    #[test]
    fn detection_errors() {
        let zero = grid_density(3, vec![0.0; 8]);
        assert_eq!(
            detect_periodicities(&zero, 0.5),
            Err(ProtocolError::EmptyDensity)
        );
        let flat = grid_density(3, vec![0.125; 8]);
        assert!(detect_periodicities(&flat, 0.0).is_err());
        assert!(detect_periodicities(&flat, 1.0).is_err());
        let unbinned = SpectralDensity::new(vec![0.0], vec![1.0]).unwrap();
        assert_eq!(
            detect_periodicities(&unbinned, 0.5),
            Err(ProtocolError::NotBinned)
        );
    }

    #[test]
    fn histogram_invariants() {
        let h = PhaseHistogram::sampled(2, vec![1, 2, 3, 4], 9).unwrap();
        assert_eq!(h.shots, 10);
        let merged = h.merge(&h).unwrap();
        assert_eq!(merged.counts, vec![2, 4, 6, 8]);
        assert_eq!(merged.shots, 20);
        assert!(PhaseHistogram::exact(1, vec![0.7, 0.2], 0).is_err());
        let empty = PhaseHistogram::sampled(1, vec![0, 0], 0).unwrap();
        assert_eq!(
            autocorrelation_estimate(&empty),
            Err(ProtocolError::ZeroShots)
        );
        let errs = PhaseHistogram::sampled(1, vec![50, 50], 0)
            .unwrap()
            .standard_errors()
            .unwrap();
        assert!((errs[0] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn binning_wraps_signed_phases() {
        let d = SpectralDensity::new(vec![-PI / 2.0, PI, 0.0], vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(d.binned(3), vec![0.5, 0.0, 0.0, 0.0, 0.25, 0.0, 0.25, 0.0]);
        assert!((d.mass_at(-PI, 1e-12) - 0.25).abs() < 1e-15);
    }
}
