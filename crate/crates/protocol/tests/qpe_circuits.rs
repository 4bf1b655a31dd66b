mod common;

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use common::{basis, max_diff, max_diff_f, MatrixOracle};
use qpe_protocol::{
    blackbox_qpe, build_blackbox_step, execute, standard_qpe, InitialPreparation, Mode,
    ProtocolConfig, ProtocolError, RegisterPrep, Shots,
};
use qsim::{CMatrix, StateVector, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Closed-form readout probability for kick-back phase `phi` on `k` ancillas.
fn kickback_probability(phi: f64, m: usize, k: usize) -> f64 {
    let size = (1usize << k) as f64;
    let amp: C64 = (0..1usize << k)
        .map(|l| C64::from_polar(1.0, (phi - TAU * m as f64 / size) * l as f64))
        .sum::<C64>()
        / size;
    amp.norm_sqr()
}

fn rotation() -> CMatrix {
    // A non-diagonal single-qubit unitary.
    let (a, b) = (0.6, 0.8);
    CMatrix::from_row_slice(2, 2, &[c(a, 0.0), c(0.0, -b), c(0.0, -b), c(a, 0.0)])
}

#[test]
fn standard_qpe_identity() {
    let target = [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)];
    let dist = standard_qpe(&CMatrix::identity(2, 2), &target, 3).unwrap();
    assert!((dist[0] - 1.0).abs() < 1e-12);
}

#[test]
fn standard_qpe_exact_grid_phase() {
    let u = MatrixOracle::diagonal(&[0.0, 3.0 / 8.0]).matrix;
    let dist = standard_qpe(&u, &basis(2, 1), 3).unwrap();
    assert!((dist[3] - 1.0).abs() < 1e-12);
}

#[test]
fn standard_qpe_off_grid_phase_peaks_at_nearest() {
    let u = MatrixOracle::diagonal(&[0.0, 0.3]).matrix;
    let dist = standard_qpe(&u, &basis(2, 1), 3).unwrap();
    let peak = (0..8).max_by(|&a, &b| dist[a].total_cmp(&dist[b])).unwrap();
    assert_eq!(peak, 2);
    assert!(dist[2] >= 0.4);
    for (m, &p) in dist.iter().enumerate() {
        assert!((p - kickback_probability(TAU * 0.3, m, 3)).abs() < 1e-12);
    }
}

#[test]
fn standard_qpe_rejects_non_qubit_dimension() {
    let u = CMatrix::identity(3, 3);
    assert_eq!(
        standard_qpe(&u, &basis(3, 0), 2),
        Err(ProtocolError::NotQubitDimension(3))
    );
}

fn forced_ancilla_step(mode: Mode, ancilla_bit: usize) -> (StateVector, StateVector) {
    let oracle = MatrixOracle::new(rotation());
    let config = ProtocolConfig::new(1, 1, mode).unwrap();
    let layout = config.layout;
    let anc = basis(2, ancilla_bit);
    let r1 = [c(0.6, 0.0), c(0.0, 0.8)];
    let r2 = [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)];
    let start = StateVector::product(
        layout,
        &[
            (layout.ancilla(), &anc),
            (layout.r1(), &r1),
            (layout.r2(), &r2),
        ],
    )
    .unwrap();
    let mut stepped = start.clone();
    execute(&build_blackbox_step(0, &config), &oracle, &mut stepped).unwrap();

    // Reference: U applied directly to the register the branch selects.
    let mut direct = start;
    let register = if ancilla_bit == 1 {
        layout.r1()
    } else {
        layout.r2()
    };
    direct
        .apply_unitary(&rotation(), &register.collect::<Vec<_>>())
        .unwrap();
    (stepped, direct)
}

#[test]
fn step_routes_power_by_ancilla_branch() {
    for mode in [Mode::FullSwap, Mode::Compressed] {
        for bit in [0, 1] {
            let (stepped, direct) = forced_ancilla_step(mode, bit);
            assert!(
                max_diff(stepped.amplitudes(), direct.amplitudes()) < 1e-12,
                "{mode:?} ancilla={bit}"
            );
        }
    }
}

#[test]
fn step_restores_target_register() {
    // Start with a non-trivial H; the fragment must hand it back unchanged.
    let oracle = MatrixOracle::new(rotation());
    let config = ProtocolConfig::new(1, 1, Mode::FullSwap).unwrap();
    let layout = config.layout;
    let h = [c(0.0, 1.0), c(0.0, 0.0)];
    let plus = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
    let start = StateVector::product(
        layout,
        &[
            (layout.ancilla(), &plus),
            (layout.r1(), &basis(2, 0)),
            (layout.target().unwrap(), &h),
        ],
    )
    .unwrap();
    let mut state = start.clone();
    execute(&build_blackbox_step(0, &config), &oracle, &mut state).unwrap();
    // All weight of H stays on |0⟩, with the same local amplitude factor.
    let h_mask = 1usize << layout.target().unwrap().start;
    for (i, a) in state.amplitudes().iter().enumerate() {
        if i & h_mask != 0 {
            assert!(a.norm() < 1e-15);
        }
    }
    assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
}

fn eigen_prep(a: usize, b: usize, dim: usize) -> InitialPreparation {
    InitialPreparation::new(
        RegisterPrep::Amplitudes(basis(dim, a)),
        RegisterPrep::Amplitudes(basis(dim, b)),
    )
}

#[test]
fn identity_oracle_reads_zero() {
    let oracle = MatrixOracle::new(CMatrix::identity(2, 2));
    let config = ProtocolConfig::new(3, 1, Mode::FullSwap)
        .unwrap()
        .shots(Shots::Sampled(50))
        .seed(4);
    let prep = InitialPreparation::symmetric(RegisterPrep::MaximallyMixed);
    let hist = blackbox_qpe(&oracle, &prep, &config).unwrap();
    assert_eq!(hist.counts[0], 50);
}

#[test]
fn same_eigenstate_cancels() {
    let oracle = MatrixOracle::diagonal(&[0.0, 0.137, 0.5, 0.91]);
    let config = ProtocolConfig::new(3, 2, Mode::FullSwap).unwrap();
    for a in 0..4 {
        let hist = blackbox_qpe(&oracle, &eigen_prep(a, a, 4), &config).unwrap();
        assert!((hist.exact.unwrap()[0] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn eigenphase_difference_five_sixteenths() {
    let oracle = MatrixOracle::diagonal(&[7.0 / 16.0, 2.0 / 16.0]);
    for mode in [Mode::FullSwap, Mode::Compressed] {
        let config = ProtocolConfig::new(4, 1, mode).unwrap();
        let p = blackbox_qpe(&oracle, &eigen_prep(0, 1, 2), &config)
            .unwrap()
            .exact
            .unwrap();
        assert!((p[5] - 1.0).abs() < 1e-9, "{mode:?}: {p:?}");
        // Reversed roles read out the negative difference.
        let p = blackbox_qpe(&oracle, &eigen_prep(1, 0, 2), &config)
            .unwrap()
            .exact
            .unwrap();
        assert!((p[11] - 1.0).abs() < 1e-9);
    }
}

#[test]
fn negative_difference_decodes() {
    // (φ_a − φ_b)/2π = −3/16 reads out m = 13 and decodes to −3π/8.
    let oracle = MatrixOracle::diagonal(&[1.0 / 16.0, 4.0 / 16.0]);
    let config = ProtocolConfig::new(4, 1, Mode::FullSwap).unwrap();
    let p = blackbox_qpe(&oracle, &eigen_prep(0, 1, 2), &config)
        .unwrap()
        .exact
        .unwrap();
    assert!((p[13] - 1.0).abs() < 1e-9);
    let decoded = qpe_protocol::decode_phase(13, 4).unwrap();
    assert!((decoded + 3.0 * std::f64::consts::PI / 8.0).abs() < 1e-15);
}

#[test]
fn swapping_preparations_negates_phase() {
    let oracle = MatrixOracle::new(rotation());
    let config = ProtocolConfig::new(3, 1, Mode::FullSwap).unwrap();
    let prep = InitialPreparation::new(
        RegisterPrep::Amplitudes(vec![c(0.6, 0.0), c(0.0, 0.8)]),
        RegisterPrep::Basis(0),
    );
    let p = blackbox_qpe(&oracle, &prep, &config)
        .unwrap()
        .exact
        .unwrap();
    let q = blackbox_qpe(&oracle, &prep.swapped(), &config)
        .unwrap()
        .exact
        .unwrap();
    for m in 0..8 {
        assert!((p[m] - q[(8 - m) % 8]).abs() < 1e-12);
    }
}

#[test]
fn modes_agree_exactly() {
    let oracle = MatrixOracle::new(rotation());
    let prep = InitialPreparation::new(RegisterPrep::MaximallyMixed, RegisterPrep::Basis(1));
    let full = ProtocolConfig::new(3, 1, Mode::FullSwap).unwrap();
    let compressed = ProtocolConfig::new(3, 1, Mode::Compressed).unwrap();
    let a = blackbox_qpe(&oracle, &prep, &full).unwrap().exact.unwrap();
    let b = blackbox_qpe(&oracle, &prep, &compressed)
        .unwrap()
        .exact
        .unwrap();
    assert!(max_diff_f(&a, &b) < 1e-12);
}

#[test]
fn matches_standard_qpe_on_tensor_product() {
    let oracle = MatrixOracle::new(rotation());
    let u = rotation();
    // R1 is the low register: U ⊗ U† on (R1, R2) is kron(U†, U) in matrix order.
    let joint = u.adjoint().kronecker(&u);
    let psi1 = [c(0.6, 0.0), c(0.0, 0.8)];
    let psi2 = [c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)];
    let target: Vec<C64> = psi2
        .iter()
        .flat_map(|&b| psi1.iter().map(move |&a| a * b))
        .collect();
    let reference = standard_qpe(&joint, &target, 3).unwrap();
    let config = ProtocolConfig::new(3, 1, Mode::FullSwap).unwrap();
    let prep = InitialPreparation::new(
        RegisterPrep::Amplitudes(psi1.to_vec()),
        RegisterPrep::Amplitudes(psi2.to_vec()),
    );
    let got = blackbox_qpe(&oracle, &prep, &config)
        .unwrap()
        .exact
        .unwrap();
    assert!(max_diff_f(&got, &reference) < 1e-9);
}

#[test]
fn queries_per_execution_equal_ancilla_count() {
    let oracle = MatrixOracle::new(rotation());
    let prep = InitialPreparation::symmetric(RegisterPrep::MaximallyMixed);
    let config = ProtocolConfig::new(4, 1, Mode::FullSwap)
        .unwrap()
        .shots(Shots::Sampled(25))
        .reuse_terminal_state(false);
    blackbox_qpe(&oracle, &prep, &config).unwrap();
    assert_eq!(oracle.queries(), 4 * 25);
}

#[test]
fn reuse_of_terminal_state_keeps_outcomes() {
    let prep = InitialPreparation::symmetric(RegisterPrep::MaximallyMixed);
    let config = ProtocolConfig::new(3, 1, Mode::FullSwap)
        .unwrap()
        .shots(Shots::Sampled(400))
        .seed(31);
    let grouped = MatrixOracle::new(rotation());
    let each = MatrixOracle::new(rotation());
    let a = blackbox_qpe(&grouped, &prep, &config).unwrap();
    let b = blackbox_qpe(&each, &prep, &config.clone().reuse_terminal_state(false)).unwrap();
    assert_eq!(a, b);
    // Four distinct basis pairs, one execution each.
    assert_eq!(grouped.queries(), 3 * 4);
    assert_eq!(each.queries(), 3 * 400);
}

#[test]
fn oracle_width_mismatch() {
    let oracle = MatrixOracle::new(CMatrix::identity(4, 4));
    let config = ProtocolConfig::new(2, 1, Mode::FullSwap).unwrap();
    let prep = InitialPreparation::symmetric(RegisterPrep::Basis(0));
    assert_eq!(
        blackbox_qpe(&oracle, &prep, &config),
        Err(ProtocolError::OracleWidth {
            expected: 1,
            got: 2
        })
    );
}

#[test]
fn zero_shots_and_unresolved_eigenstates_rejected() {
    let oracle = MatrixOracle::new(CMatrix::identity(2, 2));
    let config = ProtocolConfig::new(2, 1, Mode::FullSwap).unwrap();
    let prep = InitialPreparation::symmetric(RegisterPrep::Basis(0));
    assert_eq!(
        blackbox_qpe(&oracle, &prep, &config.clone().shots(Shots::Sampled(0))),
        Err(ProtocolError::NoShotsRequested)
    );
    let eig = InitialPreparation::symmetric(RegisterPrep::Eigenstate(0));
    assert_eq!(
        blackbox_qpe(&oracle, &eig, &config),
        Err(ProtocolError::UnresolvedEigenstate)
    );
}
