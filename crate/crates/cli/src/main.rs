//! `coinless` — run, analyze, and sweep the coinless walk search on
//! torus grids.
//!
//! Subcommand output goes to stdout (or `--out`) in the declared format
//! with no extra lines; diagnostics go to stderr. Exit codes: 0 success,
//! 1 usage error, 2 numerical failure.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use coinless_core::error::Error as CoreError;
use coinless_core::grid::{GridSpec, StateVector, UNITARITY_TOL};
use coinless_core::harness::{self, fmt_real};
use coinless_core::{analytic, estimate, spectral, walk};

#[derive(Parser)]
#[command(
    name = "coinless",
    version,
    about = "Coinless quantum-walk spatial search on two-dimensional torus grids",
    after_help = "Set COINLESS_OUT_DIR to prefix relative --out paths."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum OutFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug)]
enum Steps {
    Auto,
    Fixed(usize),
}

fn parse_steps(s: &str) -> Result<Steps, String> {
    if s == "auto" {
        Ok(Steps::Auto)
    } else {
        s.parse()
            .map(Steps::Fixed)
            .map_err(|_| format!("expected a non-negative step count or 'auto', got '{s}'"))
    }
}

fn parse_marked(s: &str) -> Result<(usize, usize), String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected 'x,y', got '{s}'"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad coordinate '{t}'"))
    };
    Ok((parse(x)?, parse(y)?))
}

#[derive(Clone, Debug)]
struct SidesArg(Vec<usize>);

/// Comma list ("6,10,14") or inclusive range ("start:end:step"); every
/// side must be valid for the analytic stack.
fn parse_sides(s: &str) -> Result<SidesArg, String> {
    let sides: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range must be start:end:step, got '{s}'"));
        }
        let nums: Vec<usize> = parts
            .iter()
            .map(|t| t.parse().map_err(|_| format!("bad range bound '{t}'")))
            .collect::<Result<_, _>>()?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if step == 0 {
            return Err("range step must be positive".into());
        }
        (start..=end).step_by(step).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| format!("bad side '{t}'")))
            .collect::<Result<_, _>>()?
    };
    if sides.is_empty() {
        return Err("no sides given".into());
    }
    for &m in &sides {
        if m % 4 != 2 || m < 6 {
            return Err(format!(
                "side {m} rejected: the sweep requires m = 2 (mod 4) and m >= 6"
            ));
        }
    }
    Ok(SidesArg(sides))
}

#[derive(Subcommand)]
enum Command {
    /// Run the search and emit the success-probability time series
    Simulate {
        /// Grid side m (must be even)
        #[arg(long)]
        side: usize,
        /// Number of steps, or 'auto' for 8x the predicted optimum
        #[arg(long, default_value = "auto", value_parser = parse_steps)]
        steps: Steps,
        /// Marked vertex as "x,y"
        #[arg(long, default_value = "0,0", value_parser = parse_marked)]
        marked: (usize, usize),
        #[arg(long, value_enum, default_value_t)]
        format: OutFormat,
        /// Output path (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Warn on stderr when the cumulative norm drift exceeds this
        #[arg(long, default_value_t = UNITARITY_TOL)]
        norm_tol: f64,
    },
    /// Closed-form predictions for one grid
    Analytic {
        /// Grid side m (must be 2 mod 4, at least 6)
        #[arg(long)]
        side: usize,
        #[arg(long, value_enum, default_value_t)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-block spectral table, plus the dense-oracle phase when N <= cap
    Spectrum {
        #[arg(long)]
        side: usize,
        /// Dense-oracle size cap (number of vertices)
        #[arg(long, default_value_t = estimate::DENSE_CAP_DEFAULT)]
        cap: usize,
        #[arg(long, value_enum, default_value_t)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scaling sweep over several grid sides
    Sweep {
        /// Comma list or start:end:step range of sides
        #[arg(long, default_value = "6,10,14,22,30,46,62,94,126", value_parser = parse_sides)]
        sides: SidesArg,
        /// Simulation window as a multiple of the predicted optimum (>= 4)
        #[arg(long, default_value_t = harness::DEFAULT_WINDOW_FACTOR)]
        window_factor: f64,
        #[arg(long, value_enum, default_value_t)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated amplitude amplification trace
    Amplify {
        #[arg(long)]
        side: usize,
        /// Preparation length t_f, or 'auto' for the predicted optimum
        #[arg(long, default_value = "auto", value_parser = parse_steps)]
        steps: Steps,
        #[arg(long, default_value_t = 64)]
        max_rounds: usize,
        #[arg(long, default_value = "0,0", value_parser = parse_marked)]
        marked: (usize, usize),
        #[arg(long, value_enum, default_value_t)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &CoreError) -> u8 {
    match e {
        CoreError::OddSide(_)
        | CoreError::OutOfBounds { .. }
        | CoreError::AnalyticParity(_)
        | CoreError::MarkedNotOrigin { .. }
        | CoreError::BranchRange(_) => 1,
        _ => 2,
    }
}

/// Relative --out paths are prefixed by COINLESS_OUT_DIR when it is set.
fn resolve_out(p: &Path) -> PathBuf {
    if p.is_relative() {
        if let Ok(dir) = std::env::var("COINLESS_OUT_DIR") {
            if !dir.is_empty() {
                return Path::new(&dir).join(p);
            }
        }
    }
    p.to_path_buf()
}

fn open_sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    match out {
        None => Ok(Box::new(io::stdout())),
        Some(p) => Ok(Box::new(std::fs::File::create(resolve_out(p))?)),
    }
}

fn dispatch(cmd: Command) -> Result<(), CoreError> {
    match cmd {
        Command::Simulate {
            side,
            steps,
            marked,
            format,
            out,
            norm_tol,
        } => simulate(side, steps, marked, format, &out, norm_tol),
        Command::Analytic { side, format, out } => analytic_record(side, format, &out),
        Command::Spectrum {
            side,
            cap,
            format,
            out,
        } => spectrum(side, cap, format, &out),
        Command::Sweep {
            sides,
            window_factor,
            format,
            out,
        } => sweep(&sides.0, window_factor, format, &out),
        Command::Amplify {
            side,
            steps,
            max_rounds,
            marked,
            format,
            out,
        } => amplify(side, steps, max_rounds, marked, format, &out),
    }
}

fn auto_steps(grid: &GridSpec, factor: usize) -> Result<usize, CoreError> {
    match analytic::report(grid) {
        Ok(r) => Ok(factor * r.t_pred),
        Err(e) => {
            eprintln!("note: --steps auto needs the analytic prediction; pass --steps explicitly");
            Err(e)
        }
    }
}

fn simulate(
    side: usize,
    steps: Steps,
    marked: (usize, usize),
    format: OutFormat,
    out: &Option<PathBuf>,
    norm_tol: f64,
) -> Result<(), CoreError> {
    let grid = GridSpec::new(side, marked.0, marked.1)?;
    let steps = match steps {
        Steps::Fixed(n) => n,
        Steps::Auto => auto_steps(&grid, 8)?,
    };
    let iw = grid.marked_index();
    let mut state = StateVector::uniform(grid);
    let mut series = vec![state.amplitudes()[iw]];
    for _ in 0..steps {
        walk::step(&mut state);
        series.push(state.amplitudes()[iw]);
    }
    let drift = (state.norm() - 1.0).abs();
    if drift > norm_tol {
        eprintln!("warning: cumulative norm drift {drift:.3e} exceeds {norm_tol:.1e}");
    }

    let mut sink = open_sink(out)?;
    match format {
        OutFormat::Csv => {
            writeln!(sink, "t,p_t,re_overlap,im_overlap")?;
            for (t, z) in series.iter().enumerate() {
                writeln!(
                    sink,
                    "{t},{},{},{}",
                    fmt_real(z.norm_sqr()),
                    fmt_real(z.re),
                    fmt_real(z.im)
                )?;
            }
        }
        OutFormat::Json => {
            writeln!(sink, "[")?;
            for (t, z) in series.iter().enumerate() {
                let comma = if t + 1 < series.len() { "," } else { "" };
                writeln!(
                    sink,
                    "  {{\"t\": {t}, \"p_t\": {}, \"re_overlap\": {}, \"im_overlap\": {}}}{comma}",
                    fmt_real(z.norm_sqr()),
                    fmt_real(z.re),
                    fmt_real(z.im)
                )?;
            }
            writeln!(sink, "]")?;
        }
    }
    Ok(())
}

const ANALYTIC_FIELDS: &[&str] = &[
    "m",
    "N",
    "B_minus_Cx",
    "alpha",
    "t_f",
    "t_pred",
    "cos_beta",
    "x_re",
    "x_im",
    "psi_norm_sq",
    "overlap00_re",
    "overlap00_im",
    "overlap00_raw_re",
    "overlap00_raw_im",
    "p_pred",
    "claim1_overlap",
    "claim1_adjusted",
    "E_minus_re",
    "E_minus_im",
    "E_plus_re",
    "E_plus_im",
    "F_re",
    "F_im",
];

fn analytic_record(side: usize, format: OutFormat, out: &Option<PathBuf>) -> Result<(), CoreError> {
    let grid = GridSpec::with_marked_origin(side)?;
    let r = analytic::report(&grid)?;
    let values: Vec<String> = vec![
        r.side.to_string(),
        r.n_vertices.to_string(),
        fmt_real(r.spectral_sum),
        fmt_real(r.alpha),
        fmt_real(r.t_f),
        r.t_pred.to_string(),
        fmt_real(r.cos_beta),
        fmt_real(r.relative_phase.re),
        fmt_real(r.relative_phase.im),
        fmt_real(r.psi_norm_sq),
        fmt_real(r.overlap_marked.re),
        fmt_real(r.overlap_marked.im),
        fmt_real(r.overlap_marked_raw.re),
        fmt_real(r.overlap_marked_raw.im),
        fmt_real(r.p_pred),
        fmt_real(r.claim1_overlap),
        fmt_real(r.claim1_overlap_adjusted),
        fmt_real(r.target_sum_minus.re),
        fmt_real(r.target_sum_minus.im),
        fmt_real(r.target_sum_plus.re),
        fmt_real(r.target_sum_plus.im),
        fmt_real(r.target_sum_skew.re),
        fmt_real(r.target_sum_skew.im),
    ];
    let mut sink = open_sink(out)?;
    match format {
        OutFormat::Csv => {
            writeln!(sink, "{}", ANALYTIC_FIELDS.join(","))?;
            writeln!(sink, "{}", values.join(","))?;
        }
        OutFormat::Json => {
            let fields: Vec<String> = ANALYTIC_FIELDS
                .iter()
                .zip(&values)
                .map(|(k, v)| format!("\"{k}\": {v}"))
                .collect();
            writeln!(sink, "{{{}}}", fields.join(", "))?;
        }
    }
    Ok(())
}

fn spectrum(
    side: usize,
    cap: usize,
    format: OutFormat,
    out: &Option<PathBuf>,
) -> Result<(), CoreError> {
    let grid = GridSpec::with_marked_origin(side)?;
    grid.require_analytic()?;
    let half = side / 2;
    let mut rows = Vec::with_capacity(half * half);
    for k in 0..half {
        for l in 0..half {
            let block = spectral::full_block(&grid, k, l)?;
            let w0 = spectral::overlap_00(&block, 0)?.re;
            let w1 = spectral::overlap_00(&block, 1)?.re;
            rows.push((k, l, block.theta, w0, w1, block.identity_block));
        }
    }

    let dense_alpha = if grid.n_vertices() <= cap {
        let u = estimate::dense_unitary(grid, cap)?;
        Some(estimate::dense_spectrum(grid, &u)?.principal_alpha)
    } else {
        None
    };

    let mut sink = open_sink(out)?;
    match format {
        OutFormat::Csv => {
            writeln!(sink, "k,l,theta,overlap_00_w0,overlap_00_w1,identity")?;
            for (k, l, theta, w0, w1, id) in &rows {
                writeln!(
                    sink,
                    "{k},{l},{},{},{},{}",
                    fmt_real(*theta),
                    fmt_real(*w0),
                    fmt_real(*w1),
                    u8::from(*id)
                )?;
            }
            // Keep stdout a pure table; the oracle summary is a diagnostic.
            if let Some(alpha) = dense_alpha {
                eprintln!("dense-oracle alpha = {}", fmt_real(alpha));
            }
        }
        OutFormat::Json => {
            writeln!(sink, "{{")?;
            writeln!(sink, "  \"blocks\": [")?;
            for (i, (k, l, theta, w0, w1, id)) in rows.iter().enumerate() {
                let comma = if i + 1 < rows.len() { "," } else { "" };
                writeln!(
                    sink,
                    "    {{\"k\": {k}, \"l\": {l}, \"theta\": {}, \"overlap_00_w0\": {}, \
                     \"overlap_00_w1\": {}, \"identity\": {id}}}{comma}",
                    fmt_real(*theta),
                    fmt_real(*w0),
                    fmt_real(*w1)
                )?;
            }
            writeln!(sink, "  ],")?;
            match dense_alpha {
                Some(alpha) => writeln!(sink, "  \"dense_alpha\": {}", fmt_real(alpha))?,
                None => writeln!(sink, "  \"dense_alpha\": null")?,
            }
            writeln!(sink, "}}")?;
        }
    }
    Ok(())
}

fn sweep(
    sides: &[usize],
    window_factor: f64,
    format: OutFormat,
    out: &Option<PathBuf>,
) -> Result<(), CoreError> {
    let outcome = harness::sweep(sides, window_factor)?;
    for (side, e) in &outcome.failures {
        eprintln!("side {side} failed: {e}");
    }
    if outcome.rows.is_empty() {
        if let Some((_, e)) = outcome.failures.into_iter().next() {
            return Err(e);
        }
    }
    let mut sink = open_sink(out)?;
    let fmt = match format {
        OutFormat::Csv => harness::Format::Csv,
        OutFormat::Json => harness::Format::Json,
    };
    harness::emit(&outcome.rows, fmt, &mut sink)?;
    Ok(())
}

fn amplify(
    side: usize,
    steps: Steps,
    max_rounds: usize,
    marked: (usize, usize),
    format: OutFormat,
    out: &Option<PathBuf>,
) -> Result<(), CoreError> {
    let grid = GridSpec::new(side, marked.0, marked.1)?;
    let t_f = match steps {
        Steps::Fixed(n) => n,
        Steps::Auto => auto_steps(&grid, 1)?,
    };
    let outcome = harness::amplify_simulated(grid, t_f, max_rounds)?;
    if outcome.budget_exceeded {
        eprintln!(
            "warning: step budget reached after round {}; result is partial",
            outcome.trace.len() - 1
        );
    }
    let mut sink = open_sink(out)?;
    match format {
        OutFormat::Csv => {
            writeln!(sink, "round,p")?;
            for (round, p) in &outcome.trace {
                writeln!(sink, "{round},{}", fmt_real(*p))?;
            }
        }
        OutFormat::Json => {
            writeln!(sink, "[")?;
            for (i, (round, p)) in outcome.trace.iter().enumerate() {
                let comma = if i + 1 < outcome.trace.len() { "," } else { "" };
                writeln!(sink, "  {{\"round\": {round}, \"p\": {}}}{comma}", fmt_real(*p))?;
            }
            writeln!(sink, "]")?;
        }
    }
    Ok(())
}
