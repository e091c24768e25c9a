//! Solved-field storage and interpolating queries.
//!
//! A [`SolutionField`] holds the three surfaces on the grid:
//!
//! * `P(x,t)` — survival probability with stock `x` and horizon `t`,
//! * `K(x,t)` — optimal immediate allocation,
//! * `H(x,t)` — conditional survival value `a(K)·P(x−K, t)`.
//!
//! `P` and `H` are stored as their complements `Q = 1 − P`, `G = 1 − H`,
//! which the march produces directly; both tend to zero as `t → 0`, so
//! quantities like `log(1−P)` read off stored data at full precision.
//! `K` is stored as produced by the inner maximization, never recomputed,
//! so downstream monotonicity checks see exactly the solver's decisions.

use bomber_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::grid::Grid;
use crate::SolverError;

/// Values within this fraction of a node snap to it when locating query
/// coordinates, so node queries return stored values exactly.
const NODE_SNAP: f64 = 1e-9;

/// Ammunition model for the inner maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SolveMode {
    /// Any allocation `k ∈ [0, x]` is feasible.
    Continuous,
    /// Only whole multiples of a unit can be fired.
    DiscreteUnit {
        /// Size of one ammunition unit (positive).
        step: f64,
    },
}

/// Which surface to export in single-field formats such as CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    /// Survival probability `P`.
    P,
    /// Optimal allocation `K`.
    K,
    /// Conditional survival value `H`.
    H,
}

/// Interpolated field values at one query point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicySample {
    /// Allocation, clamped into `[0, x]`.
    pub k: f64,
    /// Survival probability.
    pub p: f64,
    /// Conditional survival value.
    pub h: f64,
}

/// The solved `P`, `K`, `H` surfaces on a uniform grid.
///
/// Node accessors take an ammunition index `ix ∈ 0..nx` and a time index
/// `it ∈ 0..nt` and panic when out of bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    grid: Grid,
    params: ModelParams,
    mode: SolveMode,
    /// `Q = 1 − P`, time-major: `q[it·nx + ix]`.
    q: Vec<f64>,
    /// `K`, same layout.
    k: Vec<f64>,
    /// `G = 1 − H`, same layout.
    g: Vec<f64>,
}

impl SolutionField {
    /// Assembles a field from externally supplied surfaces.
    ///
    /// `q` and `g` are the *complements* `1 − P` and `1 − H`, `k` the
    /// allocation surface, all time-major (`buf[it·nx + ix]`). This is the
    /// entry point for deserializers and for building synthetic fields in
    /// tests; nothing is recomputed or checked beyond the buffer lengths.
    ///
    /// # Panics
    ///
    /// Panics when any buffer length differs from `nx·nt`.
    pub fn from_parts(
        grid: Grid,
        params: ModelParams,
        mode: SolveMode,
        q: Vec<f64>,
        k: Vec<f64>,
        g: Vec<f64>,
    ) -> Self {
        let n = grid.nx * grid.nt;
        assert_eq!(q.len(), n);
        assert_eq!(k.len(), n);
        assert_eq!(g.len(), n);
        SolutionField {
            grid,
            params,
            mode,
            q,
            k,
            g,
        }
    }

    /// The grid the field was solved on.
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// The model parameters the field was solved for.
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// The ammunition mode the field was solved in.
    pub fn mode(&self) -> SolveMode {
        self.mode
    }

    #[inline]
    fn idx(&self, ix: usize, it: usize) -> usize {
        assert!(
            ix < self.grid.nx && it < self.grid.nt,
            "node ({ix}, {it}) outside grid {}×{}",
            self.grid.nx,
            self.grid.nt
        );
        it * self.grid.nx + ix
    }

    /// Survival probability `P` at node `(ix, it)`.
    #[inline]
    pub fn p(&self, ix: usize, it: usize) -> f64 {
        1.0 - self.q[self.idx(ix, it)]
    }

    /// Optimal allocation `K` at node `(ix, it)`.
    #[inline]
    pub fn k(&self, ix: usize, it: usize) -> f64 {
        self.k[self.idx(ix, it)]
    }

    /// Conditional survival value `H` at node `(ix, it)`.
    #[inline]
    pub fn h(&self, ix: usize, it: usize) -> f64 {
        1.0 - self.g[self.idx(ix, it)]
    }

    /// Complement `Q = 1 − P` at node `(ix, it)`, at full stored
    /// precision (no cancellation for `P` near 1).
    #[inline]
    pub fn q(&self, ix: usize, it: usize) -> f64 {
        self.q[self.idx(ix, it)]
    }

    /// Complement `G = 1 − H` at node `(ix, it)`, at full stored
    /// precision.
    #[inline]
    pub fn g(&self, ix: usize, it: usize) -> f64 {
        self.g[self.idx(ix, it)]
    }

    /// One time slice of `P` values over all ammunition nodes.
    pub fn p_slice(&self, it: usize) -> Vec<f64> {
        let base = self.idx(0, it);
        self.q[base..base + self.grid.nx]
            .iter()
            .map(|q| 1.0 - q)
            .collect()
    }

    /// Interpolated policy at an off-grid point.
    ///
    /// `P` and `H` interpolate bilinearly; `K` interpolates linearly in
    /// `x` on the two bracketing time slices, then linearly in `t`, and
    /// is clamped into `[0, x]` (a neighboring node above the query may
    /// hold more stock than the query point has). Queries at node
    /// coordinates return stored values exactly.
    ///
    /// # Errors
    ///
    /// [`SolverError::OutOfDomain`] when `(x, t)` lies outside
    /// `[0, x_max] × [0, t_max]`.
    pub fn policy_at(&self, x: f64, t: f64) -> Result<PolicySample, SolverError> {
        let grid = &self.grid;
        if !(x >= 0.0 && x <= grid.x_max && t >= 0.0 && t <= grid.t_max) {
            return Err(SolverError::OutOfDomain {
                x,
                t,
                x_max: grid.x_max,
                t_max: grid.t_max,
            });
        }
        let (ix, fx) = locate(x, grid.dx(), grid.nx);
        let (it, ft) = locate(t, grid.dt(), grid.nt);
        let w00 = (1.0 - fx) * (1.0 - ft);
        let w10 = fx * (1.0 - ft);
        let w01 = (1.0 - fx) * ft;
        let w11 = fx * ft;
        let at = |buf: &[f64], i: usize, n: usize| buf[n * grid.nx + i];
        let q = w00 * at(&self.q, ix, it)
            + w10 * at(&self.q, ix + 1, it)
            + w01 * at(&self.q, ix, it + 1)
            + w11 * at(&self.q, ix + 1, it + 1);
        let g = w00 * at(&self.g, ix, it)
            + w10 * at(&self.g, ix + 1, it)
            + w01 * at(&self.g, ix, it + 1)
            + w11 * at(&self.g, ix + 1, it + 1);
        let k_lo = at(&self.k, ix, it) * (1.0 - fx) + at(&self.k, ix + 1, it) * fx;
        let k_hi = at(&self.k, ix, it + 1) * (1.0 - fx) + at(&self.k, ix + 1, it + 1) * fx;
        let k = (k_lo * (1.0 - ft) + k_hi * ft).clamp(0.0, x);
        Ok(PolicySample {
            k,
            p: 1.0 - q,
            h: 1.0 - g,
        })
    }
}

/// Locates `val` on an axis with spacing `d` and `n` nodes: returns the
/// lower bracketing index `i ≤ n − 2` and the fractional offset in
/// `[0, 1]`, snapped to exact 0 or 1 within [`NODE_SNAP`] so that node
/// queries carry exact weights.
fn locate(val: f64, d: f64, n: usize) -> (usize, f64) {
    let pos = val / d;
    let mut i = pos as usize;
    if i > n - 2 {
        i = n - 2;
    }
    let mut frac = pos - i as f64;
    if frac < NODE_SNAP {
        frac = 0.0;
    } else if frac > 1.0 - NODE_SNAP {
        frac = 1.0;
    }
    (i, frac)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_field() -> SolutionField {
        // 3×2 grid with hand-laid values: q rows (t-major)
        //   t=0: [0.00, 0.00, 0.00]
        //   t=1: [0.10, 0.06, 0.04]
        let grid = Grid::new(2.0, 3, 0.5, 2).unwrap();
        let params = ModelParams::new(0.5);
        let q = vec![0.0, 0.0, 0.0, 0.10, 0.06, 0.04];
        let k = vec![0.0, 1.0, 2.0, 0.0, 0.8, 1.9];
        let g = vec![0.5, 0.2, 0.1, 0.55, 0.30, 0.20];
        SolutionField::from_parts(grid, params, SolveMode::Continuous, q, k, g)
    }

    #[test]
    fn node_accessors_are_exact_complements() {
        let f = tiny_field();
        assert_eq!(f.p(0, 1), 1.0 - 0.10);
        assert_eq!(f.q(2, 1), 0.04);
        assert_eq!(f.h(1, 0), 0.8);
        assert_eq!(f.k(2, 0), 2.0);
    }

    #[test]
    fn policy_at_nodes_returns_stored_values() {
        let f = tiny_field();
        let s = f.policy_at(1.0, 0.5).unwrap();
        assert_eq!(s.p, f.p(1, 1));
        assert_eq!(s.h, f.h(1, 1));
        assert_eq!(s.k, f.k(1, 1));
        // Boundary condition at t = 0.
        let s0 = f.policy_at(1.37, 0.0).unwrap();
        assert_eq!(s0.p, 1.0);
    }

    #[test]
    fn policy_between_nodes_stays_within_neighbors() {
        let f = tiny_field();
        let s = f.policy_at(1.5, 0.25).unwrap();
        let corners = [f.p(1, 0), f.p(2, 0), f.p(1, 1), f.p(2, 1)];
        let lo = corners.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(s.p >= lo && s.p <= hi);
        assert!(s.k <= 1.5);
    }

    #[test]
    fn policy_clamps_allocation_to_stock() {
        let f = tiny_field();
        // Near x = 0 at t = 0 the x-neighbor holds k = 1.0 > x.
        let s = f.policy_at(0.05, 0.0).unwrap();
        assert!(s.k <= 0.05);
    }

    #[test]
    fn rejects_out_of_domain_queries() {
        let f = tiny_field();
        assert!(matches!(
            f.policy_at(2.5, 0.1),
            Err(SolverError::OutOfDomain { .. })
        ));
        assert!(f.policy_at(-0.1, 0.1).is_err());
        assert!(f.policy_at(1.0, 0.6).is_err());
        assert!(f.policy_at(f64::NAN, 0.1).is_err());
    }
}
