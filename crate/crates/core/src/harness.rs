//! Scaling sweeps, amplitude-amplification accounting, and structured
//! result emission.
//!
//! A sweep row runs one grid end to end: analytic report, exact phase
//! solve, simulation over a window of `factor * t_pred` steps, empirical
//! phase extraction, and the amplification ledger. Output is CSV or JSON
//! with a fixed schema; reals carry 12 significant digits so files are
//! byte-comparable across runs (wall time excepted).

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;

use crate::analytic;
use crate::error::{Error, Result};
use crate::estimate;
use crate::grid::{GridSpec, StateVector};
use crate::walk;

/// Default sweep sides: all `= 2 (mod 4)`, roughly geometric, spanning
/// two decades of N in under a minute.
pub const DEFAULT_SWEEP_SIDES: &[usize] = &[6, 10, 14, 22, 30, 46, 62, 94, 126];

/// Default simulation window as a multiple of the predicted optimum;
/// at least 4 is needed for the frequency estimator to resolve alpha,
/// 8 keeps the per-row cross-validation tight.
pub const DEFAULT_WINDOW_FACTOR: f64 = 8.0;

/// Hard budget on total walk steps inside the simulated amplification.
pub const AMPLIFY_STEP_BUDGET: usize = 10_000_000;

/// One grid size of the sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub side: usize,
    pub n: usize,
    pub alpha_analytic: f64,
    pub alpha_exact: f64,
    pub alpha_empirical: Option<f64>,
    pub t_pred: usize,
    pub t_star: usize,
    pub p_star: f64,
    pub p_pred: f64,
    pub claim1_overlap: f64,
    pub aa_rounds: usize,
    pub aa_total_steps: usize,
    /// Monotonic-clock measurement; reported, excluded from determinism.
    pub wall_time_ms: f64,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<ScalingRow>,
    /// Sides that failed validation or a numerical stage, with the error.
    pub failures: Vec<(usize, Error)>,
}

/// Runs the full pipeline for each side. Invalid sides produce failure
/// entries and the sweep continues. Rows come back sorted by side.
pub fn sweep(sides: &[usize], window_factor: f64) -> Result<SweepOutcome> {
    if window_factor < 4.0 {
        return Err(Error::Numerical(format!(
            "window factor must be at least 4 for frequency resolution, got {window_factor}"
        )));
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut sorted: Vec<usize> = sides.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &side in &sorted {
        match sweep_row(side, window_factor) {
            Ok(row) => rows.push(row),
            Err(e) => failures.push((side, e)),
        }
    }
    Ok(SweepOutcome { rows, failures })
}

fn sweep_row(side: usize, window_factor: f64) -> Result<ScalingRow> {
    let start = Instant::now();
    let grid = GridSpec::with_marked_origin(side)?;
    let report = analytic::report(&grid)?;
    let alpha_exact = analytic::solve_alpha_exact(&grid)?;

    let window = ((window_factor * report.t_pred as f64).ceil() as usize).max(8);
    let run = walk::run(grid, window);
    let alpha_empirical = estimate::estimate_alpha_from_series(&run.overlaps).ok();

    let aa_rounds = amplification_rounds(run.p_star);
    let aa_total_steps = amplification_steps(run.t_star, aa_rounds);

    Ok(ScalingRow {
        side,
        n: grid.n_vertices(),
        alpha_analytic: report.alpha,
        alpha_exact,
        alpha_empirical,
        t_pred: report.t_pred,
        t_star: run.t_star,
        p_star: run.p_star,
        p_pred: report.p_pred,
        claim1_overlap: report.claim1_overlap,
        aa_rounds,
        aa_total_steps,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Rounds of amplitude amplification to reach success >= 1/2 from a
/// per-trial probability `p`: `ceil((pi/4) / asin(sqrt(p)))`.
pub fn amplification_rounds(p_star: f64) -> usize {
    let p = p_star.clamp(0.0, 1.0);
    if p <= 0.0 {
        return usize::MAX;
    }
    let angle = p.sqrt().asin();
    ((PI / 4.0) / angle).ceil() as usize
}

/// Step ledger: the initial preparation costs `t_star` walk steps and
/// each round costs one forward and one inverse preparation, so the
/// total is `t_star * (2 * rounds + 1)`.
pub fn amplification_steps(t_star: usize, rounds: usize) -> usize {
    t_star * (2 * rounds + 1)
}

pub fn amplification_estimate(row: &ScalingRow) -> (usize, usize) {
    let rounds = amplification_rounds(row.p_star);
    (rounds, amplification_steps(row.t_star, rounds))
}

/// Reflection about the uniform state, `2|psi_0><psi_0| - I`.
pub fn reflect_about_uniform(state: &mut StateVector) {
    let n = state.grid().n_vertices() as f64;
    let mean: Complex64 = state.amplitudes().iter().sum::<Complex64>() / n;
    for a in state.amplitudes_mut() {
        *a = 2.0 * mean - *a;
    }
}

#[derive(Clone, Debug)]
pub struct AmplifyOutcome {
    pub achieved_p: f64,
    pub rounds_used: usize,
    /// `(round, p)` trace; round 0 is the bare preparation.
    pub trace: Vec<(usize, f64)>,
    pub budget_exceeded: bool,
}

/// Literal amplitude amplification with the walk as the preparation
/// unitary: each round applies the inverse preparation, the reflection
/// about the initial state, the preparation, and the oracle reflection.
/// Stops early once p >= 1/2, at `max_rounds`, or when the step budget
/// would be exceeded (flagged, partial result).
pub fn amplify_simulated(grid: GridSpec, t_f: usize, max_rounds: usize) -> Result<AmplifyOutcome> {
    if t_f == 0 {
        return Err(Error::Numerical("amplification needs t_f >= 1".into()));
    }
    let iw = grid.marked_index();
    let mut state = StateVector::uniform(grid);
    for _ in 0..t_f {
        walk::step(&mut state);
    }
    let mut steps_used = t_f;
    let p0 = state.amplitudes()[iw].norm_sqr();
    let mut trace = vec![(0usize, p0)];
    let mut best_p = p0;
    let mut best_round = 0;
    let mut budget_exceeded = false;

    for round in 1..=max_rounds {
        if best_p >= 0.5 {
            break;
        }
        if steps_used + 2 * t_f > AMPLIFY_STEP_BUDGET {
            budget_exceeded = true;
            break;
        }
        walk::oracle(&mut state);
        for _ in 0..t_f {
            walk::step_inverse(&mut state);
        }
        reflect_about_uniform(&mut state);
        for _ in 0..t_f {
            walk::step(&mut state);
        }
        steps_used += 2 * t_f;
        let p = state.amplitudes()[iw].norm_sqr();
        trace.push((round, p));
        if p > best_p {
            best_p = p;
            best_round = round;
        }
    }

    Ok(AmplifyOutcome {
        achieved_p: best_p,
        rounds_used: best_round,
        trace,
        budget_exceeded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub const SWEEP_HEADER: &str = "m,N,alpha_analytic,alpha_exact,alpha_empirical,t_pred,t_star,\
p_star,p_pred,claim1_overlap,aa_rounds,aa_total_steps,wall_time_ms";

/// 12-significant-digit rendering used for every real in emitted files.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.11e}")
}

/// Writes rows in the fixed schema. Field names are identical in both
/// formats; a missing empirical alpha is an empty CSV field or a JSON
/// null. Byte output is deterministic for identical inputs.
pub fn emit<W: Write>(rows: &[ScalingRow], format: Format, out: &mut W) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{SWEEP_HEADER}")?;
            for r in rows {
                let alpha_emp = r.alpha_empirical.map(fmt_real).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.side,
                    r.n,
                    fmt_real(r.alpha_analytic),
                    fmt_real(r.alpha_exact),
                    alpha_emp,
                    r.t_pred,
                    r.t_star,
                    fmt_real(r.p_star),
                    fmt_real(r.p_pred),
                    fmt_real(r.claim1_overlap),
                    r.aa_rounds,
                    r.aa_total_steps,
                    fmt_real(r.wall_time_ms),
                )?;
            }
        }
        Format::Json => {
            writeln!(out, "[")?;
            for (i, r) in rows.iter().enumerate() {
                let alpha_emp = r
                    .alpha_empirical
                    .map(fmt_real)
                    .unwrap_or_else(|| "null".into());
                let comma = if i + 1 < rows.len() { "," } else { "" };
                writeln!(
                    out,
                    "  {{\"m\": {}, \"N\": {}, \"alpha_analytic\": {}, \"alpha_exact\": {}, \
                     \"alpha_empirical\": {}, \"t_pred\": {}, \"t_star\": {}, \"p_star\": {}, \
                     \"p_pred\": {}, \"claim1_overlap\": {}, \"aa_rounds\": {}, \
                     \"aa_total_steps\": {}, \"wall_time_ms\": {}}}{comma}",
                    r.side,
                    r.n,
                    fmt_real(r.alpha_analytic),
                    fmt_real(r.alpha_exact),
                    alpha_emp,
                    r.t_pred,
                    r.t_star,
                    fmt_real(r.p_star),
                    fmt_real(r.p_pred),
                    fmt_real(r.claim1_overlap),
                    r.aa_rounds,
                    r.aa_total_steps,
                    fmt_real(r.wall_time_ms),
                )?;
            }
            writeln!(out, "]")?;
        }
    }
    Ok(())
}

pub fn emit_to_path(rows: &[ScalingRow], format: Format, path: &std::path::Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    emit(rows, format, &mut file)?;
    Ok(())
}

/// Ordinary least squares of y on x; returns (slope, intercept, r^2).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplification_round_formula() {
        assert_eq!(amplification_rounds(1.0), 1);
        assert_eq!(amplification_rounds(0.25), 2); // ceil((pi/4)/asin(0.5))
        assert_eq!(amplification_steps(7, 2), 7 * 5);
    }

    #[test]
    fn uniform_reflection_involution() {
        use rand::prelude::*;
        let g = GridSpec::with_marked_origin(6).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        let mut s = StateVector::zeros(g);
        for a in s.amplitudes_mut() {
            *a = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let s0 = s.clone();
        reflect_about_uniform(&mut s);
        reflect_about_uniform(&mut s);
        for i in 0..36 {
            assert!((s.amplitudes()[i] - s0.amplitudes()[i]).norm() < 1e-12);
        }
        // The uniform state itself is fixed.
        let mut u = StateVector::uniform(g);
        reflect_about_uniform(&mut u);
        for a in u.amplitudes() {
            assert!((a - Complex64::new(1.0 / 6.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn amplify_terminates_immediately_when_good_enough() {
        // m=2: p after one step is already large.
        let g = GridSpec::with_marked_origin(2).unwrap();
        let out = amplify_simulated(g, 1, 10).unwrap();
        if out.trace[0].1 >= 0.5 {
            assert_eq!(out.rounds_used, 0);
            assert_eq!(out.trace.len(), 1);
        }
    }

    #[test]
    fn emit_formats() {
        let rows = vec![ScalingRow {
            side: 6,
            n: 36,
            alpha_analytic: 0.6454972243679028,
            alpha_exact: 0.66,
            alpha_empirical: None,
            t_pred: 2,
            t_star: 2,
            p_star: 0.4,
            p_pred: 0.12,
            claim1_overlap: 0.5,
            aa_rounds: 2,
            aa_total_steps: 10,
            wall_time_ms: 1.25,
        }];
        let mut csv = Vec::new();
        emit(&rows, Format::Csv, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_HEADER);
        let data = lines.next().unwrap();
        assert!(data.starts_with("6,36,6.45497224368e-1,"));
        // Empty field for the missing empirical alpha.
        assert!(data.contains(",,2,2,"));

        let mut json = Vec::new();
        emit(&rows, Format::Json, &mut json).unwrap();
        let jtext = String::from_utf8(json).unwrap();
        assert!(jtext.contains("\"alpha_empirical\": null"));
        // JSON field names equal the CSV header tokens.
        for token in SWEEP_HEADER.split(',') {
            assert!(jtext.contains(&format!("\"{token}\"")), "missing {token}");
        }

        // Header-only output for an empty row list.
        let mut empty = Vec::new();
        emit(&[], Format::Csv, &mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap(), format!("{SWEEP_HEADER}\n"));
    }

    #[test]
    fn emit_deterministic_and_round_trips() {
        let rows = vec![
            ScalingRow {
                side: 6,
                n: 36,
                alpha_analytic: 0.645497224368,
                alpha_exact: 0.66012345,
                alpha_empirical: Some(0.6612),
                t_pred: 2,
                t_star: 2,
                p_star: 0.407,
                p_pred: 0.125,
                claim1_overlap: 0.52,
                aa_rounds: 2,
                aa_total_steps: 10,
                wall_time_ms: 0.8,
            },
            ScalingRow {
                side: 10,
                n: 100,
                alpha_analytic: 0.334,
                alpha_exact: 0.34,
                alpha_empirical: Some(0.341),
                t_pred: 5,
                t_star: 5,
                p_star: 0.33,
                p_pred: 0.11,
                claim1_overlap: 0.51,
                aa_rounds: 2,
                aa_total_steps: 25,
                wall_time_ms: 1.9,
            },
        ];
        let mut a = Vec::new();
        let mut b = Vec::new();
        emit(&rows, Format::Csv, &mut a).unwrap();
        emit(&rows, Format::Csv, &mut b).unwrap();
        assert_eq!(a, b);

        // Parse back and compare the reals at emitted precision.
        let text = String::from_utf8(a).unwrap();
        for (line, row) in text.lines().skip(1).zip(&rows) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 13);
            assert_eq!(fields[0].parse::<usize>().unwrap(), row.side);
            assert_eq!(fields[1].parse::<usize>().unwrap(), row.n);
            let back: f64 = fields[2].parse().unwrap();
            assert!((back - row.alpha_analytic).abs() < 1e-11 * row.alpha_analytic.abs());
            let emp: f64 = fields[4].parse().unwrap();
            assert!((emp - row.alpha_empirical.unwrap()).abs() < 1e-9);
            assert_eq!(fields[6].parse::<usize>().unwrap(), row.t_star);
        }
    }

    #[test]
    fn fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        let (slope, intercept, r2) = linear_fit(&xs, &ys);
        assert!((slope - 3.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_reports_bad_sides() {
        let out = sweep(&[6, 8, 12], 8.0).unwrap();
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.rows[0].side, 6);
        assert_eq!(out.failures.len(), 2);
        assert!(sweep(&[6], 2.0).is_err());
    }
}
