//! Phase-estimation circuits.
//!
//! [`standard_qpe`] is the textbook white-box circuit with controlled powers
//! of an explicit matrix. [`blackbox_qpe`] only ever calls
//! [`PowerOracle::apply_power`]: each controlled step
//!
//! ```text
//! V'_j = |1⟩⟨1|_j ⊗ U^{2^j} ⊗ 1 + |0⟩⟨0|_j ⊗ 1 ⊗ U^{2^j}      (on Ra ⊗ R1 ⊗ R2)
//! ```
//!
//! is built by conjugating an unconditional `U^{2^j}` on `R1` with
//! conditional exchanges of `R1` and `R2`. The conditional exchange fires on
//! the ancilla's |0⟩ branch, so on |1⟩ the power lands on `R1` and on |0⟩ it
//! is routed to `R2`. Branch `l` therefore carries `U^l ⊗ U^{2^k−1−l}`, which
//! equals `U^l ⊗ U^{−l}` up to the unconditional `1 ⊗ U^{2^k−1}`; ancilla
//! statistics are those of phase estimation on `U ⊗ U†`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::Range;

use qsim::{
    gates, sample_index, CMatrix, LayoutKind, RegisterLayout, RngStream, StateVector, C64,
    DEFAULT_QUBIT_CAP,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::prep::PureComponent;
use crate::{InitialPreparation, PhaseHistogram, PowerOracle, ProtocolError};

/// How the oracle register is wired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// `U` acts on `H`, reached from `R1` by register exchange.
    #[default]
    FullSwap,
    /// `U` acts on `R1` directly and `H` is dropped.
    Compressed,
}

/// Sampled shots, or the exact outcome distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Sampled(u64),
}

/// Step construction. Anything but [`StepVariant::Sandwich`] is a
/// deliberately broken circuit used as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepVariant {
    #[default]
    Sandwich,
    OmitClosingSwap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub layout: RegisterLayout,
    pub mode: Mode,
    pub shots: Shots,
    pub seed: u64,
    /// Index of the first shot; campaigns over disjoint shot ranges merge
    /// into the campaign over their union.
    pub shot_offset: u64,
    /// Simulate each distinct pure preparation once and draw every shot's
    /// outcome from its terminal state. Outcomes are identical either way.
    pub reuse_terminal_state: bool,
    pub variant: StepVariant,
}

impl ProtocolConfig {
    pub fn new(ancilla: usize, width: usize, mode: Mode) -> Result<Self, ProtocolError> {
        Self::with_cap(ancilla, width, mode, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(
        ancilla: usize,
        width: usize,
        mode: Mode,
        cap: usize,
    ) -> Result<Self, ProtocolError> {
        let kind = match mode {
            Mode::FullSwap => LayoutKind::FullSwap,
            Mode::Compressed => LayoutKind::Compressed,
        };
        Ok(Self {
            layout: RegisterLayout::with_kind(ancilla, width, kind, cap)?,
            mode,
            shots: Shots::Exact,
            seed: 0,
            shot_offset: 0,
            reuse_terminal_state: true,
            variant: StepVariant::Sandwich,
        })
    }

    pub fn shots(mut self, shots: Shots) -> Self {
        self.shots = shots;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn shot_offset(mut self, offset: u64) -> Self {
        self.shot_offset = offset;
        self
    }

    pub fn reuse_terminal_state(mut self, reuse: bool) -> Self {
        self.reuse_terminal_state = reuse;
        self
    }

    pub fn variant(mut self, variant: StepVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.layout.ancilla_qubits()
    }

    pub fn width(&self) -> usize {
        self.layout.width()
    }
}

/// One circuit instruction.
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Hadamard(Vec<usize>),
    PauliX(usize),
    SwapRegisters {
        a: Range<usize>,
        b: Range<usize>,
    },
    ConditionalSwap {
        control: usize,
        a: Range<usize>,
        b: Range<usize>,
    },
    /// `U^power` through the oracle.
    OraclePower(u64),
    InverseQft(Vec<usize>),
}

/// Exchange of `R1` and `R2` on the |0⟩ branch of ancilla qubit `control`.
fn anti_conditional_swap(control: usize, layout: &RegisterLayout) -> [Op; 3] {
    [
        Op::PauliX(control),
        Op::ConditionalSwap {
            control,
            a: layout.r1(),
            b: layout.r2(),
        },
        Op::PauliX(control),
    ]
}

/// Instructions realizing `V'_j` for ancilla qubit `j`.
pub fn build_blackbox_step(j: usize, config: &ProtocolConfig) -> Vec<Op> {
    let layout = &config.layout;
    let control = layout.ancilla().start + j;
    let mut ops = Vec::with_capacity(11);
    ops.extend(anti_conditional_swap(control, layout));
    let power = Op::OraclePower(1u64 << j);
    match layout.target() {
        Some(h) => {
            ops.push(Op::SwapRegisters {
                a: h.clone(),
                b: layout.r1(),
            });
            ops.push(power);
            ops.push(Op::SwapRegisters {
                a: h,
                b: layout.r1(),
            });
        }
        None => ops.push(power),
    }
    if config.variant == StepVariant::Sandwich {
        ops.extend(anti_conditional_swap(control, layout));
    }
    ops
}

/// `∏_j V'_j` for `j = 0..k`.
pub fn controlled_stage(config: &ProtocolConfig) -> Vec<Op> {
    (0..config.ancilla_qubits())
        .flat_map(|j| build_blackbox_step(j, config))
        .collect()
}

/// Hadamard layer, controlled stage, Fourier readout.
pub fn protocol_circuit(config: &ProtocolConfig) -> Vec<Op> {
    let ancilla: Vec<usize> = config.layout.ancilla().collect();
    let mut ops = vec![Op::Hadamard(ancilla.clone())];
    ops.extend(controlled_stage(config));
    ops.push(Op::InverseQft(ancilla));
    ops
}

pub fn execute<O: PowerOracle>(
    ops: &[Op],
    oracle: &O,
    state: &mut StateVector,
) -> Result<(), ProtocolError> {
    for op in ops {
        match op {
            Op::Hadamard(qubits) => state.hadamard_layer(qubits)?,
            Op::PauliX(q) => state.pauli_x(*q)?,
            Op::SwapRegisters { a, b } => state.swap_registers(a.clone(), b.clone())?,
            Op::ConditionalSwap { control, a, b } => {
                state.conditional_swap(*control, a.clone(), b.clone())?
            }
            Op::OraclePower(p) => oracle.apply_power(state, *p)?,
            Op::InverseQft(qubits) => state.inverse_qft(qubits)?,
        }
    }
    Ok(())
}

fn check_oracle<O: PowerOracle>(oracle: &O, config: &ProtocolConfig) -> Result<(), ProtocolError> {
    if oracle.qubits() != config.width() {
        return Err(ProtocolError::OracleWidth {
            expected: config.width(),
            got: oracle.qubits(),
        });
    }
    Ok(())
}

/// Runs the full circuit on `|0⟩_Ra ⊗ |ψ1⟩_R1 ⊗ |ψ2⟩_R2 (⊗ |0⟩_H)` and
/// returns the state just before readout.
pub fn simulate_pure<O: PowerOracle>(
    oracle: &O,
    config: &ProtocolConfig,
    r1: &[C64],
    r2: &[C64],
) -> Result<StateVector, ProtocolError> {
    check_oracle(oracle, config)?;
    let layout = config.layout;
    let mut state = StateVector::product(layout, &[(layout.r1(), r1), (layout.r2(), r2)])?;
    execute(&protocol_circuit(config), oracle, &mut state)?;
    Ok(state)
}

/// Exact outcome distribution, averaging over the mixture components of
/// both registers.
pub fn exact_distribution<O: PowerOracle>(
    oracle: &O,
    prep: &InitialPreparation,
    config: &ProtocolConfig,
) -> Result<Vec<f64>, ProtocolError> {
    check_oracle(oracle, config)?;
    let n = config.width();
    let r1 = prep.r1.components(n)?;
    let r2 = prep.r2.components(n)?;
    let pairs: Vec<(&PureComponent, &PureComponent)> = r1
        .iter()
        .flat_map(|a| r2.iter().map(move |b| (a, b)))
        .collect();
    let partial: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|(a, b)| {
            let state = simulate_pure(oracle, config, &a.amplitudes, &b.amplitudes)?;
            let weight = a.weight * b.weight;
            Ok(state
                .ancilla_distribution()
                .into_iter()
                .map(|p| weight * p)
                .collect())
        })
        .collect::<Result<_, ProtocolError>>()?;
    let mut dist = vec![0.0; 1 << config.ancilla_qubits()];
    for d in partial {
        for (acc, p) in dist.iter_mut().zip(d) {
            *acc += p;
        }
    }
    Ok(dist)
}

/// Phase estimation through the oracle. Returns exact probabilities for
/// [`Shots::Exact`], otherwise a sampled histogram.
///
/// Shot `s` uses the random substream `seed / (shot_offset + s)` to draw the
/// register states of mixed preparations and then the readout.
pub fn blackbox_qpe<O: PowerOracle>(
    oracle: &O,
    prep: &InitialPreparation,
    config: &ProtocolConfig,
) -> Result<PhaseHistogram, ProtocolError> {
    let k = config.ancilla_qubits();
    prep.validate(config.width())?;
    match config.shots {
        Shots::Exact => {
            let dist = exact_distribution(oracle, prep, config)?;
            PhaseHistogram::exact(k, dist, config.seed)
        }
        Shots::Sampled(0) => Err(ProtocolError::NoShotsRequested),
        Shots::Sampled(shots) => {
            check_oracle(oracle, config)?;
            let outcomes = if config.reuse_terminal_state {
                sample_grouped(oracle, prep, config, shots)?
            } else {
                sample_each(oracle, prep, config, shots)?
            };
            let mut counts = vec![0u64; 1 << k];
            for m in outcomes {
                counts[m] += 1;
            }
            PhaseHistogram::sampled(k, counts, config.seed)
        }
    }
}

struct ShotDraw {
    r1: usize,
    r2: usize,
    rng: RngStream,
}

fn draw_shot(
    prep: &InitialPreparation,
    config: &ProtocolConfig,
    root: &RngStream,
    shot: u64,
) -> Result<ShotDraw, ProtocolError> {
    let mut rng = root.substream(config.shot_offset + shot);
    let n = config.width();
    let r1 = prep.r1.draw(n, &mut rng)?;
    let r2 = prep.r2.draw(n, &mut rng)?;
    Ok(ShotDraw { r1, r2, rng })
}

fn sample_each<O: PowerOracle>(
    oracle: &O,
    prep: &InitialPreparation,
    config: &ProtocolConfig,
    shots: u64,
) -> Result<Vec<usize>, ProtocolError> {
    let n = config.width();
    let r1 = prep.r1.components(n)?;
    let r2 = prep.r2.components(n)?;
    let root = RngStream::new(config.seed);
    (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut draw = draw_shot(prep, config, &root, shot)?;
            let mut state = simulate_pure(
                oracle,
                config,
                &r1[draw.r1].amplitudes,
                &r2[draw.r2].amplitudes,
            )?;
            Ok(state.measure_ancilla(&mut draw.rng)?)
        })
        .collect()
}

fn sample_grouped<O: PowerOracle>(
    oracle: &O,
    prep: &InitialPreparation,
    config: &ProtocolConfig,
    shots: u64,
) -> Result<Vec<usize>, ProtocolError> {
    let n = config.width();
    let r1 = prep.r1.components(n)?;
    let r2 = prep.r2.components(n)?;
    let root = RngStream::new(config.seed);

    let mut groups: BTreeMap<(usize, usize), Vec<u64>> = BTreeMap::new();
    for shot in 0..shots {
        let draw = draw_shot(prep, config, &root, shot)?;
        groups.entry((draw.r1, draw.r2)).or_default().push(shot);
    }
    let groups: Vec<_> = groups.into_iter().collect();
    let sampled: Vec<Vec<(u64, usize)>> = groups
        .par_iter()
        .map(|((a, b), members)| {
            let state = simulate_pure(oracle, config, &r1[*a].amplitudes, &r2[*b].amplitudes)?;
            let dist = state.ancilla_distribution();
            members
                .iter()
                .map(|&shot| {
                    let mut draw = draw_shot(prep, config, &root, shot)?;
                    Ok((shot, sample_index(&dist, &mut draw.rng)))
                })
                .collect()
        })
        .collect::<Result<_, ProtocolError>>()?;
    let mut outcomes = vec![0usize; shots as usize];
    for (shot, m) in sampled.into_iter().flatten() {
        outcomes[shot as usize] = m;
    }
    Ok(outcomes)
}

fn qubit_count(dim: usize) -> Result<usize, ProtocolError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(ProtocolError::NotQubitDimension(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Textbook phase estimation with white-box controlled powers of `unitary`,
/// acting on the pure target state `target`.
pub fn standard_qpe(
    unitary: &CMatrix,
    target: &[C64],
    ancilla: usize,
) -> Result<Vec<f64>, ProtocolError> {
    if unitary.nrows() != unitary.ncols() {
        return Err(ProtocolError::NotQubitDimension(unitary.nrows()));
    }
    let width = qubit_count(unitary.nrows())?;
    let layout = RegisterLayout::single(ancilla, width)?;
    let mut state = StateVector::product(layout, &[(layout.r1(), target)])?;
    let anc: Vec<usize> = layout.ancilla().collect();
    state.hadamard_layer(&anc)?;

    let mut qubits: Vec<usize> = layout.r1().collect();
    qubits.push(0);
    let mut power = unitary.clone();
    for (j, &control) in anc.iter().enumerate() {
        if j > 0 {
            power = &power * &power;
        }
        *qubits.last_mut().expect("control slot") = control;
        state.apply_unitary(&gates::controlled(&power), &qubits)?;
    }
    state.inverse_qft(&anc)?;
    Ok(state.ancilla_distribution())
}

/// Signed phase difference for outcome `m`, in `(−π, π]`.
pub fn decode_phase(m: usize, ancilla: usize) -> Result<f64, ProtocolError> {
    let size = 1usize << ancilla;
    if m >= size {
        return Err(ProtocolError::OutcomeOutOfRange { m, k: ancilla });
    }
    let signed = if 2 * m <= size {
        m as f64
    } else {
        m as f64 - size as f64
    };
    Ok(2.0 * PI * signed / size as f64)
}
