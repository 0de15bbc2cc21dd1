//! Staggered Fourier basis and closed-form block structure of the
//! oracle-free walk.
//!
//! The torus splits into four sublattices by coordinate parity. Plane
//! waves restricted to one sublattice ("branches" 0..=3, in the order
//! even-even, even-odd, odd-even, odd-odd) carry momentum labels
//! `0 <= k, l < m/2`, and for each (k, l) the four branch vectors span a
//! subspace invariant under the oracle-free walk. The walk restricted to
//! a block is a 4x4 unitary with eigenvalues `1, 1, exp(+-i theta)`,
//! `cos(theta) = 2 cos^2(k~) cos^2(l~) - 1`, and all four eigenvectors
//! are real with closed-form entries.
//!
//! The other object here is the marked-cell eigenstate: the vector the
//! local rotation multiplies by `exp(2 pi i/3)`, supported on the even
//! cell at the origin. Decomposing it in the block eigenbasis produces
//! the coefficient data every analytic prediction is built from. The
//! decomposition uses conjugate pairs: for each block the `exp(i theta)`
//! eigenvector is kept as printed and its partner is the entrywise
//! conjugate (an exact `exp(-i theta)` eigenvector since the walk is
//! real), which is the basis the downstream formulas assume.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, StateVector};

/// Guard for the closed-form normalizations; only the (0,0) block may be
/// degenerate on analytic grids.
const NORMALIZATION_GUARD: f64 = 1e-14;

/// One momentum block of the oracle-free walk.
#[derive(Clone, Debug)]
pub struct FourierBlock {
    pub k: usize,
    pub l: usize,
    side: usize,
    /// `k~ = 2 pi k / m`, `l~ = 2 pi l / m`.
    pub k_angle: f64,
    pub l_angle: f64,
    /// The reduced 4x4 unitary; `reduced[r][c]` is row r, column c, and
    /// column `b` holds the image of branch vector `b`.
    pub reduced: [[Complex64; 4]; 4],
    /// Principal block eigenphase in [0, pi].
    pub theta: f64,
    /// Sign of `cos(k~) cos(l~)`; never zero on analytic grids.
    pub epsilon: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub c: f64,
    /// Rows 0,1: eigenvalue 1; row 2: `exp(i theta)`; row 3:
    /// `exp(-i theta)`. All entries real. `None` until
    /// [`block_eigensystem`] runs.
    pub eigvecs: Option<[[f64; 4]; 4]>,
    /// True for the (0,0) block, where the reduced matrix is the identity
    /// and all four eigenvalues are 1.
    pub identity_block: bool,
}

impl FourierBlock {
    pub fn eigenvalue(&self, branch: usize) -> Complex64 {
        match branch {
            0 | 1 => Complex64::ONE,
            2 => Complex64::from_polar(1.0, self.theta),
            3 => Complex64::from_polar(1.0, -self.theta),
            _ => unreachable!(),
        }
    }

    fn vectors(&self) -> Result<&[[f64; 4]; 4]> {
        self.eigvecs
            .as_ref()
            .ok_or_else(|| Error::Numerical("block eigensystem not populated".into()))
    }

    /// `||U2red w_b - lambda_b w_b||` for one branch eigenvector.
    pub fn eigen_residual(&self, branch: usize) -> Result<f64> {
        if branch > 3 {
            return Err(Error::BranchRange(branch));
        }
        let w = self.vectors()?[branch];
        let lam = self.eigenvalue(branch);
        let mut resid = 0.0f64;
        for (row, we) in self.reduced.iter().zip(&w) {
            let acc: Complex64 = row.iter().zip(&w).map(|(r, c)| r * c).sum();
            resid += (acc - lam * we).norm_sqr();
        }
        Ok(resid.sqrt())
    }
}

/// Returns `(c + s, c - s)` with the smaller member computed from the
/// exact product `(c + s)(c - s) = prod` instead of by subtraction.
fn stable_pair(c: f64, s: f64, prod: f64) -> (f64, f64) {
    if s >= 0.0 {
        let hi = c + s;
        (hi, if hi > 0.0 { prod / hi } else { 0.0 })
    } else {
        let hi = c - s;
        (if hi > 0.0 { prod / hi } else { 0.0 }, hi)
    }
}

fn check_momentum(grid: &GridSpec, k: usize, l: usize) -> Result<()> {
    let half = grid.side() / 2;
    if k >= half || l >= half {
        return Err(Error::OutOfBounds {
            x: k,
            y: l,
            side: half,
        });
    }
    Ok(())
}

/// Normalized plane wave on one parity sublattice: amplitude
/// `(2/sqrt(N)) omega^(x k + y l)` on vertices whose parities match the
/// branch, zero elsewhere, with `omega = exp(2 pi i / m)`.
pub fn fourier_basis_vector(
    grid: &GridSpec,
    k: usize,
    l: usize,
    branch: usize,
) -> Result<StateVector> {
    check_momentum(grid, k, l)?;
    if branch > 3 {
        return Err(Error::BranchRange(branch));
    }
    let m = grid.side();
    let n = grid.n_vertices();
    let scale = 2.0 / (n as f64).sqrt();
    let mut out = StateVector::zeros(*grid);
    let amp = out.amplitudes_mut();
    let (px, py) = (branch >> 1, branch & 1);
    for x in (px..m).step_by(2) {
        for y in (py..m).step_by(2) {
            // Reduce the exponent mod m before taking the angle so large
            // grids do not lose phase accuracy.
            let e = (x * k + y * l) % m;
            amp[x * m + y] = Complex64::from_polar(scale, 2.0 * PI * e as f64 / m as f64);
        }
    }
    Ok(out)
}

/// Builds the reduced 4x4 block at momentum (k, l). Eigenvectors are not
/// populated; see [`block_eigensystem`].
pub fn build_reduced(grid: &GridSpec, k: usize, l: usize) -> Result<FourierBlock> {
    check_momentum(grid, k, l)?;
    let m = grid.side() as f64;
    let ka = 2.0 * PI * k as f64 / m;
    let la = 2.0 * PI * l as f64 / m;
    let (ck, sk) = (ka.cos(), ka.sin());
    let (cl, sl) = (la.cos(), la.sin());
    let wk = Complex64::from_polar(1.0, ka);
    let wl = Complex64::from_polar(1.0, la);
    let i = Complex64::I;

    let cc = Complex64::new(ck * cl, 0.0);
    let skcl = Complex64::new(sk * cl, 0.0);
    let cksl = Complex64::new(ck * sl, 0.0);
    let sksl = Complex64::new(sk * sl, 0.0);

    let reduced = [
        [
            cc * (wk * wl).conj(),
            -i * wk.conj() * skcl,
            -i * wl.conj() * cksl,
            sksl,
        ],
        [
            -i * wk.conj() * skcl,
            cc * wl * wk.conj(),
            -sksl,
            i * wl * cksl,
        ],
        [
            -i * wl.conj() * cksl,
            -sksl,
            cc * wk * wl.conj(),
            i * wk * skcl,
        ],
        [sksl, i * wl * cksl, i * wk * skcl, cc * wk * wl],
    ];

    let cos_theta = (2.0 * ck * ck * cl * cl - 1.0).clamp(-1.0, 1.0);
    let eps = if ck * cl >= 0.0 { 1.0 } else { -1.0 };
    let c = (1.0 - ck * ck * cl * cl).max(0.0).sqrt();
    let c_plus = ((1.0 + ck * cl) * (1.0 - (ka - la).cos())).max(0.0).sqrt();
    let c_minus = ((1.0 - ck * cl) * (1.0 + (ka - la).cos())).max(0.0).sqrt();

    Ok(FourierBlock {
        k,
        l,
        side: grid.side(),
        k_angle: ka,
        l_angle: la,
        reduced,
        theta: cos_theta.acos(),
        epsilon: eps,
        c_plus,
        c_minus,
        c,
        eigvecs: None,
        identity_block: k == 0 && l == 0,
    })
}

/// Populates the closed-form eigenvectors of a block.
///
/// For the (0,0) identity block the first two rows are the `k = l`
/// closed forms and the last two an explicit orthonormal completion (any
/// completion works there: every direction has eigenvalue 1).
pub fn block_eigensystem(block: &mut FourierBlock) -> Result<()> {
    if block.identity_block {
        block.eigvecs = Some([
            [0.5, -0.5, -0.5, 0.5],
            [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0],
            [0.5, 0.5, 0.5, 0.5],
            [FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2],
        ]);
        return Ok(());
    }
    if block.c < NORMALIZATION_GUARD
        || block.c_minus < NORMALIZATION_GUARD
        || (block.k != block.l && block.c_plus < NORMALIZATION_GUARD)
    {
        // Unreachable for m = 2 (mod 4): only (0,0) degenerates there.
        return Err(Error::Numerical(format!(
            "degenerate block normalization at (k, l) = ({}, {})",
            block.k, block.l
        )));
    }

    let (ka, la) = (block.k_angle, block.l_angle);
    let (ck, sk) = (ka.cos(), ka.sin());
    let (cl, sl) = (la.cos(), la.sin());
    let s_kl = (ka - la).sin();

    let w0 = if block.k == block.l {
        let norm = (2.0 * (1.0 + ck * ck)).sqrt();
        [1.0 / norm, -ck / norm, -ck / norm, 1.0 / norm]
    } else {
        let d = 2.0 * block.c_plus;
        [s_kl / d, (sl - sk) / d, (sl - sk) / d, s_kl / d]
    };

    // The k = l reduction [0, 1/sqrt2, -1/sqrt2, 0] is the same formula.
    let d = 2.0 * block.c_minus;
    let w1 = [-s_kl / d, (sk + sl) / d, -(sk + sl) / d, s_kl / d];

    // The four entries are products sqrt(c -+ eps sk cl) sqrt(c -+ eps ck sl).
    // Each pair multiplies to sl^2 (resp. sk^2) exactly, so the smaller
    // factor is recovered from the product to avoid the cancellation that
    // otherwise turns an exact zero into sqrt(rounding noise).
    let rotation_vec = |eps: f64| -> [f64; 4] {
        let c = block.c;
        let (a_pos, a_neg) = stable_pair(c, eps * sk * cl, sl * sl);
        let (b_pos, b_neg) = stable_pair(c, eps * ck * sl, sk * sk);
        let d = 2.0 * c;
        [
            -eps * (a_neg * b_neg).sqrt() / d,
            (a_neg * b_pos).sqrt() / d,
            (a_pos * b_neg).sqrt() / d,
            eps * (a_pos * b_pos).sqrt() / d,
        ]
    };
    let w2 = rotation_vec(block.epsilon);
    // Flipping the sign convention is the same as reversing the entries.
    let w3 = rotation_vec(-block.epsilon);

    block.eigvecs = Some([w0, w1, w2, w3]);
    Ok(())
}

/// Builds a block with its eigensystem populated.
pub fn full_block(grid: &GridSpec, k: usize, l: usize) -> Result<FourierBlock> {
    let mut b = build_reduced(grid, k, l)?;
    block_eigensystem(&mut b)?;
    Ok(b)
}

/// Overlap of the marked-origin basis state with the full-space
/// eigenvector of the given branch: `(2/sqrt(N)) * w[branch][0]`, since
/// only the even-even branch touches the origin.
pub fn overlap_00(block: &FourierBlock, branch: usize) -> Result<Complex64> {
    if branch > 3 {
        return Err(Error::BranchRange(branch));
    }
    let w = block.vectors()?;
    let n = (block.side * block.side) as f64;
    Ok(Complex64::new(2.0 / n.sqrt() * w[branch][0], 0.0))
}

/// Materializes the full-space vector with the given branch coefficients
/// at momentum (k, l): `sum_b coeffs[b] |branch_b(k,l)>`.
pub fn full_space_vector(
    grid: &GridSpec,
    k: usize,
    l: usize,
    coeffs: &[Complex64; 4],
) -> Result<StateVector> {
    check_momentum(grid, k, l)?;
    let m = grid.side();
    let n = grid.n_vertices();
    let scale = 2.0 / (n as f64).sqrt();
    let mut out = StateVector::zeros(*grid);
    let amp = out.amplitudes_mut();
    for x in 0..m {
        for y in 0..m {
            let branch = 2 * (x % 2) + (y % 2);
            let e = (x * k + y * l) % m;
            let phase = Complex64::from_polar(scale, 2.0 * PI * e as f64 / m as f64);
            amp[x * m + y] = coeffs[branch] * phase;
        }
    }
    Ok(out)
}

/// Full-space eigenvector of the oracle-free walk for one block branch.
pub fn block_eigenvector(grid: &GridSpec, block: &FourierBlock, branch: usize) -> Result<StateVector> {
    if branch > 3 {
        return Err(Error::BranchRange(branch));
    }
    let w = block.vectors()?;
    let coeffs = [
        Complex64::new(w[branch][0], 0.0),
        Complex64::new(w[branch][1], 0.0),
        Complex64::new(w[branch][2], 0.0),
        Complex64::new(w[branch][3], 0.0),
    ];
    full_space_vector(grid, block.k, block.l, &coeffs)
}

/// The marked-cell eigenstate: the local rotation multiplies it by
/// `exp(2 pi i/3)`. Supported on the even cell at the origin.
pub fn marked_eigenstate(grid: &GridSpec) -> Result<StateVector> {
    grid.require_marked_origin()?;
    let s6 = 6.0_f64.sqrt();
    let mut out = StateVector::zeros(*grid);
    let m = grid.side();
    let amp = out.amplitudes_mut();
    amp[0] = Complex64::new(0.0, -3.0_f64.sqrt() / s6); // -i sqrt(3)/sqrt(6) at (0,0)
    amp[1] = Complex64::new(1.0 / s6, 0.0); // (0,1)
    amp[m] = Complex64::new(1.0 / s6, 0.0); // (1,0)
    amp[m + 1] = Complex64::new(1.0 / s6, 0.0); // (1,1)
    Ok(out)
}

/// Reduced (4-entry) representations of the marked-cell eigenstate and
/// its conjugate against the branch vectors of block (k, l):
/// `psi_red[b] = <branch_b(k,l)|psi> * sqrt(N)/2`.
fn marked_reduced(side: usize, k: usize, l: usize) -> ([Complex64; 4], [Complex64; 4]) {
    let m = side as f64;
    let s6 = 6.0_f64.sqrt();
    let om = |e: i64| {
        let e = e.rem_euclid(side as i64);
        Complex64::from_polar(1.0 / s6, 2.0 * PI * e as f64 / m)
    };
    let top = Complex64::new(0.0, 3.0_f64.sqrt() / s6);
    let psi1 = [-top, om(-(l as i64)), om(-(k as i64)), om(-((k + l) as i64))];
    let psi2 = [top, psi1[1], psi1[2], psi1[3]];
    (psi1, psi2)
}

/// Coefficients of the marked-cell eigenstate on one rotation pair.
#[derive(Clone, Copy, Debug)]
pub struct PairCoefficients {
    pub k: usize,
    pub l: usize,
    pub theta: f64,
    /// Coefficient on the `exp(i theta)` eigenvector.
    pub plus: Complex64,
    /// Coefficient on its entrywise conjugate (`exp(-i theta)`).
    pub minus: Complex64,
    /// Coefficients on the two eigenvalue-1 eigenvectors of the block.
    pub fixed0: Complex64,
    pub fixed1: Complex64,
}

/// Decomposition of the marked-cell eigenstate in the eigenbasis of the
/// oracle-free walk.
///
/// The eigenvalue-1 component is kept only through the gauge-invariant
/// aggregates `fixed_weight_sq` (its squared norm) and `fixed_cross`
/// (the cross term with the conjugate eigenstate); the split into a
/// scalar coefficient times a unit eigenvector is gauge and nothing
/// downstream needs it.
#[derive(Clone, Debug)]
pub struct MarkedDecomposition {
    pub side: usize,
    /// `|a|^2`, the weight on the eigenvalue-1 subspace.
    pub fixed_weight_sq: f64,
    /// `a^2 <psi'_2|psi'_1>`: overlap of the eigenvalue-1 components of
    /// the conjugate pair of marked-cell eigenstates.
    pub fixed_cross: Complex64,
    /// One entry per block (k, l) != (0,0), row-major in (k, l).
    pub pairs: Vec<PairCoefficients>,
    /// Coefficients at the (0,0) identity block on `w0, w1` and on the
    /// two completion directions (all eigenvalue 1).
    pub origin_fixed: [Complex64; 4],
}

/// `<00|psi_1> = -i/sqrt(2)`.
pub fn marked_overlap_psi1() -> Complex64 {
    Complex64::new(0.0, -FRAC_1_SQRT_2)
}

/// `<psi_0|psi_1> = (3 - i sqrt(3)) / sqrt(6 N)`.
pub fn uniform_overlap_psi1(n_vertices: usize) -> Complex64 {
    Complex64::new(3.0, -3.0_f64.sqrt()) / (6.0 * n_vertices as f64).sqrt()
}

/// Decomposes the marked-cell eigenstate over all blocks.
pub fn decompose(grid: &GridSpec) -> Result<MarkedDecomposition> {
    grid.require_analytic()?;
    grid.require_marked_origin()?;
    let m = grid.side();
    let half = m / 2;
    let scale = 2.0 / (grid.n_vertices() as f64).sqrt();

    let dot = |w: &[f64; 4], v: &[Complex64; 4]| -> Complex64 {
        w.iter().zip(v.iter()).map(|(wi, vi)| vi * *wi).sum::<Complex64>() * scale
    };

    let mut pairs = Vec::with_capacity(half * half - 1);
    let mut fixed_weight_sq = 0.0;
    let mut fixed_cross = Complex64::ZERO;
    let mut origin_fixed = [Complex64::ZERO; 4];

    for k in 0..half {
        for l in 0..half {
            let block = full_block(grid, k, l)?;
            let w = block.eigvecs.as_ref().unwrap();
            let (psi1, psi2) = marked_reduced(m, k, l);

            if block.identity_block {
                // Everything in this block has eigenvalue 1.
                for b in 0..4 {
                    let a = dot(&w[b], &psi1);
                    let bb = dot(&w[b], &psi2);
                    origin_fixed[b] = a;
                    fixed_weight_sq += a.norm_sqr();
                    fixed_cross += bb.conj() * a;
                }
                continue;
            }

            let a0 = dot(&w[0], &psi1);
            let a1 = dot(&w[1], &psi1);
            let b0 = dot(&w[0], &psi2);
            let b1 = dot(&w[1], &psi2);
            fixed_weight_sq += a0.norm_sqr() + a1.norm_sqr();
            fixed_cross += b0.conj() * a0 + b1.conj() * a1;

            let plus = dot(&w[2], &psi1);
            let minus = dot(&w[2], &psi2).conj();
            pairs.push(PairCoefficients {
                k,
                l,
                theta: block.theta,
                plus,
                minus,
                fixed0: a0,
                fixed1: a1,
            });
        }
    }

    Ok(MarkedDecomposition {
        side: m,
        fixed_weight_sq,
        fixed_cross,
        pairs,
        origin_fixed,
    })
}

impl MarkedDecomposition {
    /// `|a|^2 + sum(|a+|^2 + |a-|^2)`; equals 1 since the eigenstate is
    /// normalized and the pair basis is orthonormal and complete.
    pub fn completeness(&self) -> f64 {
        self.fixed_weight_sq
            + self
                .pairs
                .iter()
                .map(|p| p.plus.norm_sqr() + p.minus.norm_sqr())
                .sum::<f64>()
    }

    /// Materializes the projection of the marked-cell eigenstate onto the
    /// eigenvalue-1 subspace of the oracle-free walk.
    pub fn fixed_component(&self, grid: &GridSpec) -> Result<StateVector> {
        let mut out = StateVector::zeros(*grid);
        let half = self.side / 2;
        // (0,0) block: the stored eigvec rows are the basis used above.
        let origin_block = full_block(grid, 0, 0)?;
        let w = origin_block.eigvecs.as_ref().unwrap();
        for (wb, coeff) in w.iter().zip(&self.origin_fixed) {
            let coeffs = wb.map(|e| Complex64::new(e, 0.0));
            let v = full_space_vector(grid, 0, 0, &coeffs)?;
            accumulate(&mut out, *coeff, &v);
        }
        let mut idx = 0;
        for k in 0..half {
            for l in 0..half {
                if k == 0 && l == 0 {
                    continue;
                }
                let pair = &self.pairs[idx];
                debug_assert_eq!((pair.k, pair.l), (k, l));
                idx += 1;
                let block = full_block(grid, k, l)?;
                let v0 = block_eigenvector(grid, &block, 0)?;
                let v1 = block_eigenvector(grid, &block, 1)?;
                accumulate(&mut out, pair.fixed0, &v0);
                accumulate(&mut out, pair.fixed1, &v1);
            }
        }
        Ok(out)
    }
}

pub(crate) fn accumulate(target: &mut StateVector, coeff: Complex64, v: &StateVector) {
    for (t, s) in target.amplitudes_mut().iter_mut().zip(v.amplitudes()) {
        *t += coeff * s;
    }
}
