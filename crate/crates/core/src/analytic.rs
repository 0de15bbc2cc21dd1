//! Closed-form predictions: principal eigenphase, optimal step count,
//! eigenvector norm, marked-vertex and initial-state overlaps, and the
//! predicted success probability.
//!
//! Everything is an exact finite trigonometric sum over the momentum
//! blocks, evaluated in deterministic row-major (k, l) order; the
//! asymptotic laws (log-divergence of the lattice sum, the
//! `O(sqrt(N log N))` step count, the `O(1/log N)` probability) are
//! checked as properties on top of these sums, never used as the
//! computation. The leading-order phase comes from
//! `alpha^2 = 8 / (N * spectral_sum)`; [`solve_alpha_exact`] instead
//! root-finds the un-approximated consistency condition and is the
//! value small grids should be compared against.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, StateVector};
use crate::spectral::{self, MarkedDecomposition};

/// All predicted quantities for one grid size.
#[derive(Clone, Debug)]
pub struct AnalyticReport {
    pub side: usize,
    pub n_vertices: usize,
    /// `(2/N) sum 1/(1 - cos^2 k~ cos^2 l~)` over nonzero momenta; grows
    /// like log N and sets the principal eigenphase.
    pub spectral_sum: f64,
    /// Leading-order principal eigenphase.
    pub alpha: f64,
    /// Continuous optimal time `pi / (2 alpha)`.
    pub t_f: f64,
    /// `t_f` rounded half-up to a step count, at least 1.
    pub t_pred: usize,
    pub cos_beta: f64,
    /// Unit-modulus phase aligning the conjugate component pair; tends
    /// to `exp(2 pi i/3)`.
    pub relative_phase: Complex64,
    /// Squared norm of the (unnormalized) principal eigenvector.
    pub psi_norm_sq: f64,
    /// Marked-vertex overlap `<00|psi>`, simplified closed form.
    pub overlap_marked: Complex64,
    /// Same overlap assembled from the computed block sums before the
    /// closed-form substitution; agrees with `overlap_marked` to O(alpha).
    pub overlap_marked_raw: Complex64,
    /// Predicted success probability at the optimal time.
    pub p_pred: f64,
    /// Overlap of the initial state with the rotation-plane axis it
    /// starts on; tends to 1/2.
    pub claim1_overlap: f64,
    /// Same overlap after the `exp(-i pi/3)` global-phase adjustment;
    /// tends to 1.
    pub claim1_overlap_adjusted: f64,
    /// The three marked-vertex block sums (the third is identically 0).
    pub target_sum_minus: Complex64,
    pub target_sum_plus: Complex64,
    pub target_sum_skew: Complex64,
}

/// The lattice sum `(2/N) sum_{(k,l) != (0,0)} 1/(1 - cos^2 k~ cos^2 l~)`.
pub fn spectral_sum(grid: &GridSpec) -> Result<f64> {
    grid.require_analytic()?;
    let m = grid.side();
    let half = m / 2;
    let mut total = 0.0;
    for k in 0..half {
        for l in 0..half {
            if k == 0 && l == 0 {
                continue;
            }
            let ck = (2.0 * PI * k as f64 / m as f64).cos();
            let cl = (2.0 * PI * l as f64 / m as f64).cos();
            total += 1.0 / (1.0 - ck * ck * cl * cl);
        }
    }
    Ok(2.0 * total / grid.n_vertices() as f64)
}

/// The same quantity assembled the long way from the decomposition
/// coefficients: `B - C x*` with `B, C` the `1/(2 sin^2(theta/2))`
/// weighted pair sums. Used to cross-validate the decomposition.
pub fn spectral_sum_via_pairs(decomp: &MarkedDecomposition, x: Complex64) -> Complex64 {
    let (b, c) = resolvent_sums(decomp);
    Complex64::new(b, 0.0) - c * x.conj()
}

/// `B = sum (|a+|^2 + |a-|^2) / (2 sin^2(theta/2))` and
/// `C = sum a- a+ / sin^2(theta/2)` over the rotation pairs.
pub fn resolvent_sums(decomp: &MarkedDecomposition) -> (f64, Complex64) {
    let mut b = 0.0;
    let mut c = Complex64::ZERO;
    for p in &decomp.pairs {
        let s = (p.theta / 2.0).sin();
        let w = 1.0 / (s * s);
        b += 0.5 * w * (p.plus.norm_sqr() + p.minus.norm_sqr());
        c += w * p.minus * p.plus;
    }
    (b, c)
}

/// The unit phase `x = |a|^2 / (a*^2 <psi'_1|psi'_2>)` relating the two
/// conjugate components of the principal eigenvector.
pub fn compute_x(decomp: &MarkedDecomposition) -> Result<Complex64> {
    let denom = decomp.fixed_cross.conj();
    if denom.norm() < 1e-30 {
        return Err(Error::Numerical(
            "vanishing fixed-component cross term".into(),
        ));
    }
    let x = decomp.fixed_weight_sq / denom;
    Ok(x / x.norm())
}

/// Leading-order principal eigenphase `sqrt(8 / (N * spectral_sum))`.
pub fn alpha_leading(n_vertices: usize, spectral_sum: f64) -> f64 {
    (8.0 / (n_vertices as f64 * spectral_sum)).sqrt()
}

pub fn compute_alpha(grid: &GridSpec) -> Result<f64> {
    Ok(alpha_leading(grid.n_vertices(), spectral_sum(grid)?))
}

/// `round(pi / (2 alpha))`, half-up, at least one step.
pub fn optimal_steps(alpha: f64) -> usize {
    ((PI / (2.0 * alpha)).round() as usize).max(1)
}

/// `cos(beta) = (1 + sqrt(3) alpha / 4) / sqrt(2)`.
pub fn cos_beta(alpha: f64) -> f64 {
    FRAC_1_SQRT_2 * (1.0 + 3.0_f64.sqrt() * alpha / 4.0)
}

/// `24 / (N alpha^2)`; with the leading-order alpha substituted this is
/// identically `3 * spectral_sum`.
pub fn psi_norm_sq(n_vertices: usize, alpha: f64) -> f64 {
    24.0 / (n_vertices as f64 * alpha * alpha)
}

/// The three marked-vertex lattice sums over nonzero momenta.
#[derive(Clone, Copy, Debug)]
pub struct TargetSums {
    pub minus: Complex64,
    pub plus: Complex64,
    /// Antisymmetric in (k, l); identically zero.
    pub skew: Complex64,
}

pub fn target_sums(grid: &GridSpec) -> Result<TargetSums> {
    grid.require_analytic()?;
    let m = grid.side();
    let n = grid.n_vertices() as f64;
    let half = m / 2;
    let mut sum_minus = 0.0;
    let mut sum_plus = 0.0;
    let mut sum_skew = 0.0;
    for k in 0..half {
        for l in 0..half {
            if k == 0 && l == 0 {
                continue;
            }
            let ka = 2.0 * PI * k as f64 / m as f64;
            let la = 2.0 * PI * l as f64 / m as f64;
            let (ck, sk) = (ka.cos(), ka.sin());
            let (cl, sl) = (la.cos(), la.sin());
            let eps = if ck * cl >= 0.0 { 1.0 } else { -1.0 };
            let denom = 1.0 - ck * ck * cl * cl;
            sum_minus += 1.0 - eps * (ka + la).sin() / denom.sqrt();
            sum_plus += (2.0 * ka).sin() * (2.0 * la).sin() / denom;
            sum_skew += eps * sk * sl / denom;
        }
    }
    let sqrt3 = 3.0_f64.sqrt();
    let minus = Complex64::new(sqrt3, -1.0) * (2.0_f64.sqrt() / n) * sum_minus;
    let plus = Complex64::new(0.0, -1.0 / sqrt3) * minus
        - Complex64::new(1.0, sqrt3) / (n * 6.0_f64.sqrt()) * sum_plus;
    let skew = Complex64::new(1.0, sqrt3) * (2.0_f64.sqrt() / n) * sum_skew;
    Ok(TargetSums { minus, plus, skew })
}

/// Closed forms the sums collapse to: `minus = (sqrt3 - i)/(2 sqrt2) *
/// (1 - 4/N)` and `plus = -(1 + i sqrt3)/(2 sqrt6) * (1 - 4/N)`.
pub fn target_sums_closed(n_vertices: usize) -> (Complex64, Complex64) {
    let n = n_vertices as f64;
    let sqrt3 = 3.0_f64.sqrt();
    let scale = 1.0 - 4.0 / n;
    let minus = Complex64::new(sqrt3, -1.0) / (2.0 * 2.0_f64.sqrt()) * scale;
    let plus = -Complex64::new(1.0, sqrt3) / (2.0 * 6.0_f64.sqrt()) * scale;
    (minus, plus)
}

/// Marked-vertex overlap `<00|psi>`, simplified closed form:
/// `-(sqrt3 (1 + i sqrt3)/4)(1 + 1/N) + sqrt3 (sqrt3 - i)/(N alpha)`.
pub fn overlap_marked(n_vertices: usize, alpha: f64) -> Complex64 {
    let n = n_vertices as f64;
    let sqrt3 = 3.0_f64.sqrt();
    -Complex64::new(1.0, sqrt3) * (sqrt3 / 4.0) * (1.0 + 1.0 / n)
        + Complex64::new(sqrt3, -1.0) * (sqrt3 / (n * alpha))
}

/// The same overlap assembled from the computed sums before the
/// closed-form substitution:
/// `5 sqrt3 x*/8 + (sqrt3/(sqrt2 alpha))(i x*/sqrt2 - minus)
///  - 3 plus/(4 sqrt2) - sqrt3 skew/(2 sqrt2)`.
pub fn overlap_marked_raw(alpha: f64, x: Complex64, sums: &TargetSums) -> Complex64 {
    let sqrt2 = 2.0_f64.sqrt();
    let sqrt3 = 3.0_f64.sqrt();
    let xc = x.conj();
    5.0 * sqrt3 / 8.0 * xc + sqrt3 / (sqrt2 * alpha) * (Complex64::I * xc / sqrt2 - sums.minus)
        - 3.0 / (4.0 * sqrt2) * sums.plus
        - sqrt3 / (2.0 * sqrt2) * sums.skew
}

/// `p = |<00|psi> + <00|psi>*|^2 / (2 ||psi||^2) = 2 Re(<00|psi>)^2 / ||psi||^2`.
pub fn success_probability(overlap: Complex64, norm_sq: f64) -> f64 {
    2.0 * overlap.re * overlap.re / norm_sq
}

/// Overlap of the initial state with the normalized `psi - psi*` axis,
/// before and after the `exp(-i pi/3)` global-phase adjustment.
pub fn claim1_overlaps(n_vertices: usize, alpha: f64, x: Complex64, norm_sq: f64) -> (f64, f64) {
    let z1 = spectral::uniform_overlap_psi1(n_vertices);
    // <psi_0|psi> ~ (sqrt3/(sqrt2 alpha)) (<psi_0|psi_1> - <psi_0|psi_2> x)
    let z = 3.0_f64.sqrt() / (2.0_f64.sqrt() * alpha) * (z1 - z1.conj() * x);
    let norm = norm_sq.sqrt();
    let unadjusted = 2.0_f64.sqrt() * z.im.abs() / norm;
    let rotated = Complex64::from_polar(1.0, -PI / 3.0) * z;
    let adjusted = 2.0_f64.sqrt() * rotated.im.abs() / norm;
    (unadjusted, adjusted)
}

/// Computes the full report for one grid.
pub fn report(grid: &GridSpec) -> Result<AnalyticReport> {
    grid.require_analytic()?;
    grid.require_marked_origin()?;
    let n = grid.n_vertices();
    let sum = spectral_sum(grid)?;
    let alpha = alpha_leading(n, sum);
    let decomp = spectral::decompose(grid)?;
    let x = compute_x(&decomp)?;
    let t_f = PI / (2.0 * alpha);
    let norm_sq = psi_norm_sq(n, alpha);
    let sums = target_sums(grid)?;
    let overlap = overlap_marked(n, alpha);
    let (claim1, claim1_adj) = claim1_overlaps(n, alpha, x, norm_sq);
    Ok(AnalyticReport {
        side: grid.side(),
        n_vertices: n,
        spectral_sum: sum,
        alpha,
        t_f,
        t_pred: optimal_steps(alpha),
        cos_beta: cos_beta(alpha),
        relative_phase: x,
        psi_norm_sq: norm_sq,
        overlap_marked: overlap,
        overlap_marked_raw: overlap_marked_raw(alpha, x, &sums),
        p_pred: success_probability(overlap, norm_sq),
        claim1_overlap: claim1,
        claim1_overlap_adjusted: claim1_adj,
        target_sum_minus: sums.minus,
        target_sum_plus: sums.plus,
        target_sum_skew: sums.skew,
    })
}

fn half_cot(t: f64) -> f64 {
    let h = t / 2.0;
    h.cos() / h.sin()
}

/// Assembles the principal-eigenvector candidate from the block
/// eigenbasis. The formula is leading order, so the result is only an
/// approximate eigenvector of the step; its residual shrinks with m.
pub fn assemble_principal_vector(
    grid: &GridSpec,
    decomp: &MarkedDecomposition,
    alpha: f64,
    x: Complex64,
) -> Result<StateVector> {
    let cosb = cos_beta(alpha);
    let sinb = (1.0 - cosb * cosb).max(0.0).sqrt();
    let sqrt3_half = 3.0_f64.sqrt() / 2.0;

    let fixed = decomp.fixed_component(grid)?;
    let fixed_conj = fixed.conjugated();
    let coef_fixed = sqrt3_half * Complex64::new(half_cot(alpha), -1.0);

    let mut out = StateVector::zeros(*grid);
    for i in 0..grid.n_vertices() {
        out.amplitudes_mut()[i] =
            coef_fixed * (cosb * fixed.amplitudes()[i] - x * sinb * fixed_conj.amplitudes()[i]);
    }

    for pair in &decomp.pairs {
        let block = spectral::full_block(grid, pair.k, pair.l)?;
        let v_plus = spectral::block_eigenvector(grid, &block, 2)?;
        let coef_plus = sqrt3_half
            * Complex64::new(half_cot(alpha - pair.theta), -1.0)
            * (pair.plus * cosb - pair.minus.conj() * x * sinb);
        let coef_minus = sqrt3_half
            * Complex64::new(half_cot(alpha + pair.theta), -1.0)
            * (pair.minus * cosb - pair.plus.conj() * x * sinb);
        spectral::accumulate(&mut out, coef_plus, &v_plus);
        spectral::accumulate(&mut out, coef_minus, &v_plus.conjugated());
    }
    Ok(out)
}

/// Evaluates the determinant of the exact 2x2 consistency system at a
/// trial phase: zero exactly at the principal eigenphase.
///
/// Only the real parts of the `a+ a- x*` products enter: individual
/// pairs carry imaginary parts, but mirror blocks share the same theta
/// and cancel them within each cotangent weight class, so the system is
/// real once `x` is fixed. The dense-oracle agreement (~4e-10 at m = 6)
/// pins this down.
struct ExactCondition {
    weight0: f64,
    r0: f64,
    /// (theta, |a+|^2, |a-|^2, Re(a+ a- x*)) per rotation pair.
    terms: Vec<(f64, f64, f64, f64)>,
}

impl ExactCondition {
    fn build(grid: &GridSpec) -> Result<Self> {
        let decomp = spectral::decompose(grid)?;
        let x = compute_x(&decomp)?;
        let terms = decomp
            .pairs
            .iter()
            .map(|p| {
                (
                    p.theta,
                    p.plus.norm_sqr(),
                    p.minus.norm_sqr(),
                    (p.plus * p.minus * x.conj()).re,
                )
            })
            .collect();
        Ok(ExactCondition {
            weight0: decomp.fixed_weight_sq,
            r0: (decomp.fixed_cross * x.conj()).re,
            terms,
        })
    }

    fn det(&self, alpha: f64) -> f64 {
        let c0 = half_cot(alpha);
        let mut a11 = self.weight0 * c0;
        let mut a12x = -self.r0 * c0;
        for &(theta, wp, wm, r) in &self.terms {
            let cm = half_cot(alpha - theta);
            let cp = half_cot(alpha + theta);
            a11 += wp * cm + wm * cp;
            a12x -= r * (cm + cp);
        }
        1.0 - 3.0 * a11 * a11 + 3.0 * a12x * a12x
    }
}

/// Root-finds the exact (un-approximated) eigenphase condition.
///
/// With the pair coefficients and `x` fixed, the two consistency
/// equations form a real homogeneous 2x2 system in `(cos beta,
/// sin beta)` whose determinant `1 - 3 A11^2 + 3 (A12 x*)^2` must
/// vanish; the root in `(0, theta_min)` is the exact principal phase.
/// Bisection over a bracket found by a uniform scan.
pub fn solve_alpha_exact(grid: &GridSpec) -> Result<f64> {
    let cond = ExactCondition::build(grid)?;
    let theta_min = 4.0 * PI / grid.side() as f64;
    let lo = 1e-9;
    let hi = theta_min - 1e-9;
    let scan_points = 1000;

    let mut prev_a = lo;
    let mut prev_v = cond.det(lo);
    let mut bracket = None;
    for i in 1..=scan_points {
        let a = lo + (hi - lo) * i as f64 / scan_points as f64;
        let v = cond.det(a);
        if v == 0.0 || v.signum() != prev_v.signum() {
            bracket = Some((prev_a, a));
            break;
        }
        prev_a = a;
        prev_v = v;
    }
    let (mut a, mut b) = bracket.ok_or_else(|| Error::NoBracket {
        theta_min,
        details: format!(
            "det({lo:.3e}) = {:.3e}, det({hi:.6}) = {:.3e} over {scan_points} points",
            cond.det(lo),
            cond.det(hi)
        ),
    })?;

    let mut fa = cond.det(a);
    for _ in 0..200 {
        if b - a < 1e-15 {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = cond.det(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa.signum() == fm.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Number of sign changes of the exact determinant over a uniform scan
/// of `(0, theta_min)`; diagnostic companion to [`solve_alpha_exact`].
pub fn determinant_sign_changes(grid: &GridSpec, points: usize) -> Result<usize> {
    let cond = ExactCondition::build(grid)?;
    let theta_min = 4.0 * PI / grid.side() as f64;
    let lo = 1e-9;
    let hi = theta_min - 1e-9;
    let mut changes = 0;
    let mut prev = cond.det(lo).signum();
    for i in 1..=points {
        let v = cond.det(lo + (hi - lo) * i as f64 / points as f64).signum();
        if v != prev {
            changes += 1;
            prev = v;
        }
    }
    Ok(changes)
}
