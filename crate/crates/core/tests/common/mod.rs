#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use swapqpe::qsim::{CMatrix, RngStream, C64};

pub fn gaussian(rng: &mut RngStream) -> C64 {
    C64::new(
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
    )
}

pub fn random_hermitian(dim: usize, rng: &mut RngStream) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

pub fn random_vector(dim: usize, rng: &mut RngStream) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

pub fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_diff_f(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Sorted copy, with values within `tol` of 2π folded to 0.
pub fn sorted_phases(phases: &[f64], tol: f64) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let mut v: Vec<f64> = phases
        .iter()
        .map(|p| {
            let r = p.rem_euclid(tau);
            if tau - r < tol {
                0.0
            } else {
                r
            }
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v
}
