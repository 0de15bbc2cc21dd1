//! Torus grid geometry and complex state vectors.
//!
//! Vertices of the `m x m` torus are indexed row-major, `i = x*m + y`.
//! The side must be even so the 2x2 cell tessellations tile the grid
//! exactly; the analytic stack additionally requires `m = 2 (mod 4)`
//! (see [`GridSpec::analytic_valid`]).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for unitarity / norm-preservation checks.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Tolerance for sum identities (completeness, closed-form cross-checks).
pub const SUM_IDENTITY_TOL: f64 = 1e-10;

/// A vertex of the torus grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub x: usize,
    pub y: usize,
}

impl std::fmt::Display for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Geometry of an `m x m` torus grid with a single marked vertex.
///
/// Construction fails fast on odd sides; every walk operator assumes the
/// tessellations tile exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    side: usize,
    marked: Vertex,
}

impl GridSpec {
    pub fn new(side: usize, marked_x: usize, marked_y: usize) -> Result<Self> {
        if side < 2 || !side.is_multiple_of(2) {
            return Err(Error::OddSide(side));
        }
        if marked_x >= side || marked_y >= side {
            return Err(Error::OutOfBounds {
                x: marked_x,
                y: marked_y,
                side,
            });
        }
        Ok(GridSpec {
            side,
            marked: Vertex {
                x: marked_x,
                y: marked_y,
            },
        })
    }

    /// Grid with the marked vertex at the origin, the configuration the
    /// whole analytic stack is derived for.
    pub fn with_marked_origin(side: usize) -> Result<Self> {
        GridSpec::new(side, 0, 0)
    }

    /// Number of vertices per dimension (`m`).
    pub fn side(&self) -> usize {
        self.side
    }

    /// Total number of vertices (`N = m^2`).
    pub fn n_vertices(&self) -> usize {
        self.side * self.side
    }

    pub fn marked(&self) -> Vertex {
        self.marked
    }

    /// True when `m = 2 (mod 4)`, the parity class on which the
    /// closed-form spectral results hold (the reflection product has no
    /// eigenvalue -1 there). Analytic operations reject other grids.
    pub fn analytic_valid(&self) -> bool {
        self.side % 4 == 2
    }

    /// Row-major vertex index `x*m + y`.
    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        x * self.side + y
    }

    #[inline]
    pub fn marked_index(&self) -> usize {
        self.index(self.marked.x, self.marked.y)
    }

    /// Checks the `m = 2 (mod 4)`, `m >= 6` precondition shared by the
    /// spectral and analytic modules.
    pub fn require_analytic(&self) -> Result<()> {
        if !self.analytic_valid() || self.side < 6 {
            return Err(Error::AnalyticParity(self.side));
        }
        Ok(())
    }

    /// Checks that the marked vertex sits at the origin (the analytic
    /// stack fixes this; the torus is translation invariant).
    pub fn require_marked_origin(&self) -> Result<()> {
        if self.marked != (Vertex { x: 0, y: 0 }) {
            return Err(Error::MarkedNotOrigin {
                x: self.marked.x,
                y: self.marked.y,
            });
        }
        Ok(())
    }
}

/// Length-`N` complex amplitude vector over the grid vertices.
///
/// Values are immutable from the caller's perspective except through the
/// in-place walk operators; they can be freely moved between threads.
#[derive(Clone, Debug)]
pub struct StateVector {
    grid: GridSpec,
    amp: Vec<Complex64>,
}

impl StateVector {
    /// The uniform superposition, amplitude `1/sqrt(N)` everywhere.
    pub fn uniform(grid: GridSpec) -> Self {
        let n = grid.n_vertices();
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        StateVector {
            grid,
            amp: vec![a; n],
        }
    }

    /// Computational basis state `|x, y>`.
    pub fn basis(grid: GridSpec, x: usize, y: usize) -> Result<Self> {
        if x >= grid.side() || y >= grid.side() {
            return Err(Error::OutOfBounds {
                x,
                y,
                side: grid.side(),
            });
        }
        let mut amp = vec![Complex64::ZERO; grid.n_vertices()];
        amp[grid.index(x, y)] = Complex64::ONE;
        Ok(StateVector { grid, amp })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        StateVector {
            grid,
            amp: vec![Complex64::ZERO; grid.n_vertices()],
        }
    }

    /// Wraps a raw amplitude vector; the length must be `N`.
    pub fn from_amplitudes(grid: GridSpec, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != grid.n_vertices() {
            return Err(Error::GridMismatch(grid.side(), amp.len()));
        }
        Ok(StateVector { grid, amp })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    pub fn amplitude(&self, x: usize, y: usize) -> Result<Complex64> {
        if x >= self.grid.side() || y >= self.grid.side() {
            return Err(Error::OutOfBounds {
                x,
                y,
                side: self.grid.side(),
            });
        }
        Ok(self.amp[self.grid.index(x, y)])
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid.side() != other.grid.side() {
            return Err(Error::GridMismatch(self.grid.side(), other.grid.side()));
        }
        Ok(self
            .amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Entrywise complex conjugate.
    pub fn conjugated(&self) -> Self {
        StateVector {
            grid: self.grid,
            amp: self.amp.iter().map(|a| a.conj()).collect(),
        }
    }
}
