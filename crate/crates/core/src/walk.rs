//! The coinless walk operators: cell reflections, the marked-vertex
//! oracle, and the composite search step.
//!
//! Both tessellations cut the torus into disjoint 2x2 cells; the even
//! cells are anchored at (2a, 2b), the odd cells at (2a+1, 2b+1) with
//! toroidal wraparound. A reflection replaces each amplitude in a cell
//! by `S/2 - a_v`, where `S` is the cell sum. Everything here is a real
//! orthogonal involution or a product of them, runs in O(N) time, and
//! mutates the state in place.
//!
//! Cell sums are accumulated in the fixed order (0,0), (0,1), (1,0),
//! (1,1) relative to the anchor so results are bit-reproducible.

use num_complex::Complex64;

use crate::estimate::RunResult;
use crate::grid::{GridSpec, StateVector};

/// Reflection about the even-cell uniform subspace.
pub fn even_reflection(state: &mut StateVector) {
    let m = state.grid().side();
    let amp = state.amplitudes_mut();
    for a in 0..m / 2 {
        let row0 = (2 * a) * m;
        let row1 = (2 * a + 1) * m;
        for b in 0..m / 2 {
            let y = 2 * b;
            diffuse_cell(amp, row0 + y, row0 + y + 1, row1 + y, row1 + y + 1);
        }
    }
}

/// Reflection about the odd-cell uniform subspace (anchors shifted by
/// (1,1), wrapping around the torus edge).
pub fn odd_reflection(state: &mut StateVector) {
    let m = state.grid().side();
    let amp = state.amplitudes_mut();
    for a in 0..m / 2 {
        let x0 = 2 * a + 1;
        let x1 = if x0 + 1 == m { 0 } else { x0 + 1 };
        let row0 = x0 * m;
        let row1 = x1 * m;
        for b in 0..m / 2 {
            let y0 = 2 * b + 1;
            let y1 = if y0 + 1 == m { 0 } else { y0 + 1 };
            diffuse_cell(amp, row0 + y0, row0 + y1, row1 + y0, row1 + y1);
        }
    }
}

#[inline(always)]
fn diffuse_cell(amp: &mut [Complex64], i00: usize, i01: usize, i10: usize, i11: usize) {
    let s = amp[i00] + amp[i01] + amp[i10] + amp[i11];
    let h = s * 0.5;
    amp[i00] = h - amp[i00];
    amp[i01] = h - amp[i01];
    amp[i10] = h - amp[i10];
    amp[i11] = h - amp[i11];
}

/// Reflection around the marked vertex: the marked amplitude is left
/// alone, every other amplitude is negated.
pub fn oracle(state: &mut StateVector) {
    let iw = state.grid().marked_index();
    let amp = state.amplitudes_mut();
    for a in amp.iter_mut() {
        *a = -*a;
    }
    amp[iw] = -amp[iw];
}

/// One search step: odd reflection, oracle, even reflection, oracle,
/// applied right-to-left (the oracle acts first).
pub fn step(state: &mut StateVector) {
    oracle(state);
    even_reflection(state);
    oracle(state);
    odd_reflection(state);
}

/// Inverse of [`step`]. Each factor is an involution, so the inverse is
/// the same factors in reverse order.
pub fn step_inverse(state: &mut StateVector) {
    odd_reflection(state);
    oracle(state);
    even_reflection(state);
    oracle(state);
}

/// The local part of the step: even reflection and oracle, twice.
///
/// This operator has order three; it acts as a rotation on a two-complex-
/// dimensional subspace supported on the even cell containing the marked
/// vertex and as the identity elsewhere.
pub fn local_rotation(state: &mut StateVector) {
    oracle(state);
    even_reflection(state);
    oracle(state);
    even_reflection(state);
}

/// The oracle-free walk: even reflection followed by odd reflection.
///
/// This is the operator the staggered Fourier transform block-
/// diagonalizes; composing it with [`local_rotation`] gives [`step`].
pub fn free_walk(state: &mut StateVector) {
    even_reflection(state);
    odd_reflection(state);
}

/// Runs the search from the uniform state and records, for t = 0..steps,
/// the complex overlap `<w|psi_t>` and the success probability
/// `p(t) = |<w|psi_t>|^2`.
pub fn run(grid: GridSpec, steps: usize) -> RunResult {
    let mut state = StateVector::uniform(grid);
    let iw = grid.marked_index();
    let mut overlaps = Vec::with_capacity(steps + 1);
    overlaps.push(state.amplitudes()[iw]);
    for _ in 0..steps {
        step(&mut state);
        overlaps.push(state.amplitudes()[iw]);
    }
    RunResult::from_overlaps(grid, overlaps)
}
