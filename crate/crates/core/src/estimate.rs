//! Model-free empirical estimators: optimal-time detection in a success
//! probability series, frequency extraction of the principal eigenphase,
//! and a small-N dense spectral oracle.
//!
//! The dense oracle materializes the step operator column by column and
//! eigendecomposes it. Since the step is real orthogonal, its symmetric
//! part `S = (U + U^T)/2` has eigenvalue `cos(theta)` on each invariant
//! rotation plane; a symmetric eigensolve of `S` therefore yields the
//! full unitary spectrum without a general complex eigensolver: for
//! `S v = c v` with `|c| < 1`, `u = (Uv - cv)/sqrt(1-c^2)` completes an
//! orthonormal plane basis and `(v - iu)/sqrt(2)` is an exact eigenvector
//! of `U` with eigenvalue `c + i sqrt(1-c^2)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, StateVector};
use crate::walk;

/// Default cap on the dense-oracle dimension; eigendecomposition is cubic.
pub const DENSE_CAP_DEFAULT: usize = 4096;

/// Cosine threshold under which an eigenvalue of the symmetric part
/// counts as exactly 1 (or -1). Expressed on the cosine because the
/// phase is quadratically insensitive there: `1 - cos` of order 1e-9
/// still corresponds to a phase below 5e-5, far under any eigenphase of
/// the grids the oracle accepts.
const UNIT_COS_TOL: f64 = 1e-9;

/// Simulated success-probability time series with the detected optimum.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub grid: GridSpec,
    /// `p(t) = |<w|psi_t>|^2` for t = 0..=T.
    pub probs: Vec<f64>,
    /// The complex overlap `<w|psi_t>`; the signed series is what the
    /// frequency estimator needs.
    pub overlaps: Vec<Complex64>,
    /// First local maximum of `p(t)` (argmax when the window is monotone).
    pub t_star: usize,
    pub p_star: f64,
    /// Set when the window contained no interior maximum.
    pub monotone_window: bool,
    /// Filled by [`estimate_alpha_from_series`] when requested.
    pub alpha_empirical: Option<f64>,
}

impl RunResult {
    pub fn from_overlaps(grid: GridSpec, overlaps: Vec<Complex64>) -> Self {
        let probs: Vec<f64> = overlaps.iter().map(|z| z.norm_sqr()).collect();
        let (t_star, p_star, monotone_window) = match find_t_star(&probs) {
            Ok((t, p)) => (t, p, false),
            Err(_) => {
                // Window too short for peak detection: fall back to argmax.
                let (t, p) = argmax(&probs);
                (t, p, true)
            }
        };
        RunResult {
            grid,
            probs,
            overlaps,
            t_star,
            p_star,
            monotone_window,
            alpha_empirical: None,
        }
    }
}

fn argmax(xs: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x > xs[best] {
            best = i;
        }
    }
    (best, xs[best])
}

/// First interior maximum of the series: the smallest t with
/// `p(t-1) < p(t) >= p(t+1)` (plateaus resolve to their left edge).
/// Falls back to the argmax, flagged, when the window is monotone.
pub fn find_t_star(probs: &[f64]) -> Result<(usize, f64)> {
    if probs.len() < 3 {
        return Err(Error::SeriesTooShort {
            len: probs.len(),
            min: 3,
        });
    }
    for t in 1..probs.len() - 1 {
        if probs[t - 1] < probs[t] && probs[t] >= probs[t + 1] {
            return Ok((t, probs[t]));
        }
    }
    Ok(argmax(probs))
}

/// Like [`find_t_star`] but also reports whether the window was monotone
/// (no interior maximum found).
pub fn find_t_star_flagged(probs: &[f64]) -> Result<(usize, f64, bool)> {
    if probs.len() < 3 {
        return Err(Error::SeriesTooShort {
            len: probs.len(),
            min: 3,
        });
    }
    for t in 1..probs.len() - 1 {
        if probs[t - 1] < probs[t] && probs[t] >= probs[t + 1] {
            return Ok((t, probs[t], false));
        }
    }
    let (t, p) = argmax(probs);
    Ok((t, p, true))
}

/// Extracts the oscillation frequency of the overlap series.
///
/// The search dynamics rotate inside a fixed plane, so `Re<w|psi_t>`
/// oscillates at angular frequency alpha. The estimator removes the
/// mean, applies a Hann window, takes the DFT, picks the dominant
/// positive-frequency bin and refines it by quadratic interpolation of
/// the log magnitudes of the three bins around the peak. The window
/// keeps the negative-frequency image of the real tone from biasing the
/// peak fit when alpha is only a few bins up. The caller must provide a
/// series covering at least two periods (8 * t_f is the harness
/// default); resolution is 2*pi/T before interpolation and typically an
/// order of magnitude better after.
pub fn estimate_alpha_from_series(overlaps: &[Complex64]) -> Result<f64> {
    let t_len = overlaps.len();
    if t_len < 8 {
        return Err(Error::SeriesTooShort { len: t_len, min: 8 });
    }
    let mean = overlaps.iter().map(|z| z.re).sum::<f64>() / t_len as f64;
    let xs: Vec<f64> = overlaps
        .iter()
        .enumerate()
        .map(|(t, z)| {
            let hann = 0.5 * (1.0 - (2.0 * PI * t as f64 / t_len as f64).cos());
            (z.re - mean) * hann
        })
        .collect();

    // Direct DFT of a real series over positive frequency bins.
    let half = t_len / 2;
    let mut mags = vec![0.0f64; half + 1];
    for (q, mag) in mags.iter_mut().enumerate().skip(1) {
        let w = -2.0 * PI * q as f64 / t_len as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, x) in xs.iter().enumerate() {
            let ph = w * t as f64;
            re += x * ph.cos();
            im += x * ph.sin();
        }
        *mag = (re * re + im * im).sqrt();
    }

    let mut peak = 1;
    for q in 2..=half {
        if mags[q] > mags[peak] {
            peak = q;
        }
    }
    let mut sorted = mags[1..].to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    if mags[peak] < 5.0 * median || mags[peak] <= 0.0 {
        return Err(Error::LowConfidence {
            ratio: if median > 0.0 {
                mags[peak] / median
            } else {
                0.0
            },
        });
    }

    // Three-point parabolic refinement on log magnitude.
    let mut frac = peak as f64;
    if peak > 1 && peak < half && mags[peak - 1] > 0.0 && mags[peak + 1] > 0.0 {
        let lm = mags[peak - 1].ln();
        let l0 = mags[peak].ln();
        let lp = mags[peak + 1].ln();
        let denom = lm - 2.0 * l0 + lp;
        if denom < 0.0 {
            frac += 0.5 * (lm - lp) / denom;
        }
    }
    Ok(2.0 * PI * frac / t_len as f64)
}

/// Materializes the step operator as a dense real matrix, column j being
/// the step applied to basis state j. Fails above `cap` vertices.
pub fn dense_unitary(grid: GridSpec, cap: usize) -> Result<DMatrix<f64>> {
    let n = grid.n_vertices();
    if n > cap {
        return Err(Error::DenseCap { n, cap });
    }
    let m = grid.side();
    let mut u = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = StateVector::basis(grid, j / m, j % m)?;
        walk::step(&mut e);
        for (i, a) in e.amplitudes().iter().enumerate() {
            u[(i, j)] = a.re;
        }
    }
    Ok(u)
}

/// Full spectrum of the (real orthogonal) step operator.
#[derive(Clone, Debug)]
pub struct DenseSpectrum {
    pub dimension: usize,
    /// All N eigenphases, sorted ascending in (-pi, pi].
    pub eigenphases: Vec<f64>,
    /// Smallest strictly positive eigenphase.
    pub principal_alpha: f64,
    /// Eigenvector for `exp(i * principal_alpha)`, unit norm.
    pub principal_vector: StateVector,
    /// Number of rotation planes sharing the principal phase (1 when the
    /// principal pair is simple).
    pub principal_multiplicity: usize,
}

/// Eigendecomposes the dense step matrix via its symmetric part.
pub fn dense_spectrum(grid: GridSpec, u: &DMatrix<f64>) -> Result<DenseSpectrum> {
    let n = u.nrows();
    if n != grid.n_vertices() || u.ncols() != n {
        return Err(Error::Numerical(format!(
            "matrix is {}x{}, grid has {} vertices",
            u.nrows(),
            u.ncols(),
            grid.n_vertices()
        )));
    }
    let s = (u + u.transpose()) * 0.5;
    let eig = s.symmetric_eigen();

    // Partition the symmetric spectrum: c = +-1 subspaces are fixed (U
    // acts as +-I there); each remaining eigenvector belongs to a
    // rotation plane with phase arccos(c).
    let mut zeros = 0usize;
    let mut pis = 0usize;
    let mut planes: Vec<(f64, usize)> = Vec::new(); // (cos, column index)
    for i in 0..n {
        let c = eig.eigenvalues[i].clamp(-1.0, 1.0);
        if c >= 1.0 - UNIT_COS_TOL {
            zeros += 1;
        } else if c <= -1.0 + UNIT_COS_TOL {
            pis += 1;
        } else {
            planes.push((c, i));
        }
    }
    if !planes.len().is_multiple_of(2) {
        return Err(Error::Numerical(format!(
            "rotation-plane vectors do not pair up ({} of them)",
            planes.len()
        )));
    }
    planes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut phases = vec![0.0f64; zeros];
    phases.extend(std::iter::repeat_n(PI, pis));
    for pair in planes.chunks(2) {
        let theta = 0.5 * (pair[0].0.acos() + pair[1].0.acos());
        phases.push(theta);
        phases.push(-theta);
    }
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Principal pair: largest plane cosine below 1, i.e. smallest theta.
    let (c_min, col) = *planes
        .last()
        .ok_or_else(|| Error::Numerical("step operator has no rotation plane".into()))?;
    let cluster = planes.iter().filter(|(c, _)| (c - c_min).abs() < 1e-9).count();
    let principal_alpha = c_min.acos();

    let v = eig.eigenvectors.column(col);
    let sin = (1.0 - c_min * c_min).sqrt();
    let uv = u * v;
    let mut psi = StateVector::zeros(grid);
    for i in 0..n {
        let w = (uv[i] - c_min * v[i]) / sin;
        psi.amplitudes_mut()[i] = Complex64::new(v[i], -w) / 2.0_f64.sqrt();
    }

    Ok(DenseSpectrum {
        dimension: n,
        eigenphases: phases,
        principal_alpha,
        principal_vector: psi,
        principal_multiplicity: cluster / 2,
    })
}

/// Overlaps of the dynamics plane spanned by the principal eigenvector
/// and its conjugate with the initial state and the marked vertex.
#[derive(Clone, Copy, Debug)]
pub struct BetaPlaneOverlaps {
    /// `|<psi_0|beta->|` in the raw eigenvector gauge.
    pub claim1_raw: f64,
    /// Same, maximized over the global phase of the eigenvector.
    pub claim1_max: f64,
    /// `|<w|beta+>|^2` in the raw gauge.
    pub p_raw: f64,
    /// `|<w|beta+>|^2` in the gauge aligning `beta-` with the initial
    /// state, the physically meaningful prediction of the peak success
    /// probability.
    pub p_aligned: f64,
}

/// Builds `beta+- = (psi +- psi*)/sqrt(2)` from the principal eigenvector
/// (already unit norm) and evaluates the plane overlaps.
pub fn beta_plane_overlaps(spectrum: &DenseSpectrum, grid: GridSpec) -> Result<BetaPlaneOverlaps> {
    if spectrum.principal_multiplicity != 1 {
        return Err(Error::DegeneratePrincipal(spectrum.principal_multiplicity));
    }
    let psi = &spectrum.principal_vector;
    let z = StateVector::uniform(grid).inner(psi)?;
    let y = psi.amplitudes()[grid.marked_index()]; // <w|psi>

    let claim1_raw = 2.0_f64.sqrt() * z.im.abs();
    let claim1_max = 2.0_f64.sqrt() * z.norm();
    let p_raw = 2.0 * y.re * y.re;
    // Global phase that rotates <psi_0|psi> onto the imaginary axis.
    let phase = Complex64::from_polar(1.0, PI / 2.0 - z.arg());
    let y_aligned = phase * y;
    let p_aligned = 2.0 * y_aligned.re * y_aligned.re;

    Ok(BetaPlaneOverlaps {
        claim1_raw,
        claim1_max,
        p_raw,
        p_aligned,
    })
}
