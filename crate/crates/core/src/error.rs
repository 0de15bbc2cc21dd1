use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid side must be even and at least 2, got {0}")]
    OddSide(usize),
    #[error("vertex ({x}, {y}) out of bounds for side {side}")]
    OutOfBounds { x: usize, y: usize, side: usize },
    #[error("state vectors live on different grids (side {0} vs side {1})")]
    GridMismatch(usize, usize),
    #[error("analytic stack requires side = 2 (mod 4) and side >= 6, got {0}")]
    AnalyticParity(usize),
    #[error("analytic stack requires the marked vertex at the origin, got ({x}, {y})")]
    MarkedNotOrigin { x: usize, y: usize },
    #[error("sublattice branch must be 0..=3, got {0}")]
    BranchRange(usize),
    #[error("dense oracle capped at {cap} vertices, grid has {n}")]
    DenseCap { n: usize, cap: usize },
    #[error("time series needs at least {min} samples, got {len}")]
    SeriesTooShort { len: usize, min: usize },
    #[error("no dominant spectral peak (peak/median magnitude {ratio:.2}, need >= 5)")]
    LowConfidence { ratio: f64 },
    #[error("degenerate principal eigen-pair (plane multiplicity {0})")]
    DegeneratePrincipal(usize),
    #[error("eigenphase condition has no bracketed root in (0, {theta_min:.6}): {details}")]
    NoBracket { theta_min: f64, details: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
