use crate::{CMatrix, C64};

/// `max |(M†M − I)_ij|`, or infinity for non-square input.
pub fn unitarity_residual(matrix: &CMatrix) -> f64 {
    if !matrix.is_square() {
        return f64::INFINITY;
    }
    let product = matrix.adjoint() * matrix;
    let dim = matrix.nrows();
    let mut worst = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            let expected = if r == c {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            worst = worst.max((product[(r, c)] - expected).norm());
        }
    }
    worst
}

pub fn is_unitary(matrix: &CMatrix, tol: f64) -> bool {
    unitarity_residual(matrix) < tol
}

/// Inserts a zero bit at every position in `sorted_positions` (ascending).
#[inline]
fn deposit_zeros(mut value: usize, sorted_positions: &[usize]) -> usize {
    for &q in sorted_positions {
        let low = value & ((1usize << q) - 1);
        value = ((value >> q) << (q + 1)) | low;
    }
    value
}

/// Applies a `2^s × 2^s` matrix to the listed qubits in place. Row/column bit
/// `t` of the matrix index corresponds to `qubits[t]`.
///
/// Callers validate the qubit list and matrix shape.
pub(crate) fn apply_matrix(amps: &mut [C64], matrix: &CMatrix, qubits: &[usize]) {
    let dim = 1usize << qubits.len();
    debug_assert_eq!(matrix.nrows(), dim);

    if qubits.len() == 1 {
        apply_single(amps, matrix, qubits[0]);
        return;
    }

    // Row-major copy keeps the inner product loop contiguous.
    let mut rows = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            rows.push(matrix[(r, c)]);
        }
    }

    let offsets: Vec<usize> = (0..dim)
        .map(|t| {
            qubits
                .iter()
                .enumerate()
                .filter(|(bit, _)| t >> bit & 1 == 1)
                .fold(0usize, |acc, (_, &q)| acc | 1 << q)
        })
        .collect();
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();

    let groups = amps.len() >> qubits.len();
    let mut gathered = vec![C64::new(0.0, 0.0); dim];
    for g in 0..groups {
        let base = deposit_zeros(g, &sorted);
        for (slot, &off) in gathered.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = &rows[r * dim..(r + 1) * dim];
            let mut acc = C64::new(0.0, 0.0);
            for (m, a) in row.iter().zip(&gathered) {
                acc += m * a;
            }
            amps[base | off] = acc;
        }
    }
}

fn apply_single(amps: &mut [C64], matrix: &CMatrix, qubit: usize) {
    let (m00, m01, m10, m11) = (
        matrix[(0, 0)],
        matrix[(0, 1)],
        matrix[(1, 0)],
        matrix[(1, 1)],
    );
    let stride = 1usize << qubit;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a0, *a1);
            *a0 = m00 * x + m01 * y;
            *a1 = m10 * x + m11 * y;
        }
    }
}

/// Exchanges qubit `pairs[i].0` with `pairs[i].1` for every pair at once,
/// restricted to indices where all bits of `control_mask` are set.
pub(crate) fn permute_pairs(amps: &mut [C64], pairs: &[(usize, usize)], control_mask: usize) {
    let mask_a: usize = pairs.iter().map(|&(a, _)| 1usize << a).sum();
    for i in 0..amps.len() {
        if i & control_mask != control_mask {
            continue;
        }
        let mut partner = i & !(mask_a | pairs.iter().map(|&(_, b)| 1usize << b).sum::<usize>());
        for &(a, b) in pairs {
            partner |= (i >> a & 1) << b;
            partner |= (i >> b & 1) << a;
        }
        if partner > i {
            amps.swap(i, partner);
        }
    }
}

/// Multiplies every amplitude whose index has all bits of `mask` set by `phase`.
pub(crate) fn phase_on_mask(amps: &mut [C64], mask: usize, phase: C64) {
    for (i, a) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *a *= phase;
        }
    }
}
