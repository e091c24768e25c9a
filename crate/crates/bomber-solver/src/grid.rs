//! Uniform discretization of the `(x, t)` domain.
//!
//! Nodes are `x_i = i·dx` for `i = 0..nx` and `t_n = n·dt` for
//! `n = 0..nt`, with `dx = x_max/(nx−1)` and `dt = t_max/(nt−1)`. The
//! survival equation `∂Q/∂t = G − Q` is a contraction with rate 1, so
//! explicit stepping is stable for modest `dt`; construction enforces the
//! conservative guard `dt ≤ 0.5`.

use serde::{Deserialize, Serialize};

use crate::SolverError;

/// Uniform grid over `[0, x_max] × [0, t_max]`.
///
/// Fields are public for inspection; use [`Grid::new`] to construct a
/// validated instance. Code holding a `Grid` built by `new` may rely on
/// `dx > 0`, `dt > 0`, and `dt ≤ 0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Upper end of the ammunition axis.
    pub x_max: f64,
    /// Number of ammunition nodes (≥ 2).
    pub nx: usize,
    /// Upper end of the time axis.
    pub t_max: f64,
    /// Number of time nodes (≥ 2).
    pub nt: usize,
}

impl Grid {
    /// Stability guard on the explicit time step.
    pub const MAX_DT: f64 = 0.5;

    /// Validates and builds a grid.
    ///
    /// # Errors
    ///
    /// [`SolverError::InvalidGrid`] when an extent is not a positive
    /// finite real or a node count is below 2;
    /// [`SolverError::UnstableTimeStep`] when `t_max/(nt−1) > 0.5`.
    pub fn new(x_max: f64, nx: usize, t_max: f64, nt: usize) -> Result<Self, SolverError> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(SolverError::InvalidGrid(format!(
                "x_max must be a positive finite real, got {x_max}"
            )));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(SolverError::InvalidGrid(format!(
                "t_max must be a positive finite real, got {t_max}"
            )));
        }
        if nx < 2 || nt < 2 {
            return Err(SolverError::InvalidGrid(format!(
                "need at least 2 nodes per axis, got nx = {nx}, nt = {nt}"
            )));
        }
        let grid = Grid {
            x_max,
            nx,
            t_max,
            nt,
        };
        if grid.dt() > Self::MAX_DT {
            return Err(SolverError::UnstableTimeStep {
                dt: grid.dt(),
                guard: Self::MAX_DT,
            });
        }
        Ok(grid)
    }

    /// Ammunition spacing `x_max / (nx − 1)`.
    #[inline]
    pub fn dx(&self) -> f64 {
        self.x_max / (self.nx - 1) as f64
    }

    /// Time spacing `t_max / (nt − 1)`.
    #[inline]
    pub fn dt(&self) -> f64 {
        self.t_max / (self.nt - 1) as f64
    }

    /// Coordinate of ammunition node `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Coordinate of time node `n`.
    #[inline]
    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.dt()
    }

    /// Re-checks the construction invariants (fields are public, so a
    /// caller may have altered them after `new`).
    pub(crate) fn validate(&self) -> Result<(), SolverError> {
        Self::new(self.x_max, self.nx, self.t_max, self.nt).map(|_| ())
    }
}

/// `x_max = 12`, `nx = 1201`, `t_max = 5`, `nt = 2001`: covers every
/// stock/horizon combination exercised by the verification suite at
/// desk scale (`dx = 0.01`, `dt = 0.0025`).
impl Default for Grid {
    fn default() -> Self {
        Grid::new(12.0, 1201, 5.0, 2001).expect("default grid parameters are valid")
    }
}
