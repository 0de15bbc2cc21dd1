//! Coinless quantum-walk spatial search on two-dimensional torus grids.
//!
//! The crate has two halves that check each other. The simulation half
//! ([`walk`], [`estimate`]) runs the search dynamics with an O(N) kernel
//! per step and extracts empirical quantities (optimal step count,
//! success probability, principal eigenphase) from the time series or
//! from a small-N dense eigendecomposition. The analytic half
//! ([`spectral`], [`analytic`]) evaluates the closed-form block
//! diagonalization of the oracle-free walk and predicts the same
//! quantities from finite trigonometric sums. The [`harness`] sweeps
//! grid sizes, cross-validates the two routes, and emits CSV/JSON rows
//! for the scaling laws.

pub mod analytic;
pub mod error;
pub mod estimate;
pub mod grid;
pub mod harness;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use grid::{GridSpec, StateVector, Vertex, SUM_IDENTITY_TOL, UNITARITY_TOL};
