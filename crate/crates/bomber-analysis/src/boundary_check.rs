//! Empirical recovery of the spend-it-all boundary from a solved field.
//!
//! Below the boundary the optimal policy fires everything, so along each
//! time slice the stored allocation satisfies `K(x,t) = x` up to some
//! threshold and drops strictly below `x` past it. Two detectors read
//! that threshold off the grid:
//!
//! * **plateau edge** — the largest node with `K = x` to numerical
//!   equality. The solver's largest-allocation tie rule makes the plateau
//!   an exact equality, so this detector locates the boundary to within
//!   one grid cell (first-order in `dx`).
//! * **tolerant edge** — the largest node with `K ≥ x − 2·dx`. A blunter
//!   instrument that also accepts nodes just past the true edge where the
//!   allocation deficit is still a couple of cells; it sits a roughly
//!   constant ~4.5·dx above the closed form and is reported for
//!   comparison, not asserted against.
//!
//! Each included time node is compared against the closed forms: the
//! exact boundary `f_u(t)` in parameter cases I–III, the two-sided band
//! `[g_u(t), f_u(t)]` in case IV (where the deviation is the distance to
//! the *band*, zero inside it). Time nodes whose boundary does not fit
//! the grid (`f_u(t) + 3·dx > x_max`, including `t = 0` where the
//! boundary is unbounded) are skipped and counted.

use std::fmt;

use bomber_core::{classify_spend_it_all, BoundaryCase};
use bomber_solver::SolutionField;
use serde::{Deserialize, Serialize};

use crate::conjectures::validate_allocations_for;
use crate::AnalysisError;

/// Relative slack for the plateau equality `K = x`; stored plateaus are
/// bitwise exact, so this only has to absorb formatting round-trips.
const PLATEAU_TOL: f64 = 1e-9;

/// One measured time slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    /// Horizon of this slice.
    pub t: f64,
    /// Parameter case governing which closed form is exact here.
    pub case: BoundaryCase,
    /// Plateau-edge detector: largest node with `K = x` exactly.
    pub x_plateau: f64,
    /// Tolerant detector: largest node with `K ≥ x − 2·dx`.
    pub x_tolerant: f64,
    /// Closed-form outer boundary `f_u(t)`.
    pub f_value: f64,
    /// Closed-form inner boundary `g_u(t)`.
    pub g_value: f64,
    /// Plateau-edge deviation: `|x_plateau − f_u|` in cases I–III,
    /// distance from `[g_u, f_u]` in case IV.
    pub plateau_deviation: f64,
    /// Same measure for the tolerant detector.
    pub tolerant_deviation: f64,
}

/// Boundary comparison over every measurable time slice of one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    /// Kill probability of the analyzed field.
    pub v: f64,
    /// Escape probability `u = 1 − v`.
    pub u: f64,
    /// Ammunition spacing of the analyzed grid.
    pub dx: f64,
    /// Per-slice measurements, ordered by increasing `t`.
    pub rows: Vec<BoundaryRow>,
    /// Largest plateau-edge deviation over all rows.
    pub max_plateau_deviation: f64,
    /// Largest tolerant-detector deviation over all rows.
    pub max_tolerant_deviation: f64,
    /// Time nodes excluded because the boundary exceeds the grid.
    pub skipped_slices: u64,
}

impl fmt::Display for BoundaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "spend-it-all boundary: v = {}, u = {}, dx = {:.6}",
            self.v, self.u, self.dx
        )?;
        writeln!(
            f,
            "rows {}   skipped {}   max deviation: plateau {:.6} ({:.2}·dx), tolerant {:.6} ({:.2}·dx)",
            self.rows.len(),
            self.skipped_slices,
            self.max_plateau_deviation,
            self.max_plateau_deviation / self.dx,
            self.max_tolerant_deviation,
            self.max_tolerant_deviation / self.dx
        )?;
        writeln!(
            f,
            "{:>10} {:>5} {:>10} {:>10} {:>10} {:>10} {:>11} {:>11}",
            "t", "case", "plateau", "tolerant", "f_u", "g_u", "dev_plat", "dev_tol"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>10.5} {:>5} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>11.3e} {:>11.3e}",
                r.t,
                format!("{:?}", r.case),
                r.x_plateau,
                r.x_tolerant,
                r.f_value,
                r.g_value,
                r.plateau_deviation,
                r.tolerant_deviation
            )?;
        }
        Ok(())
    }
}

/// Distance from the detected edge to its closed-form target: the exact
/// boundary `f_u` where that is proven, the band `[g_u, f_u]` in case IV.
fn deviation(x_detected: f64, f_value: f64, g_value: f64, case: BoundaryCase) -> f64 {
    match case {
        BoundaryCase::IV => (g_value - x_detected).max(x_detected - f_value).max(0.0),
        _ => (x_detected - f_value).abs(),
    }
}

/// Measures the empirical spend-it-all boundary on every time slice whose
/// closed-form boundary fits inside the grid, and compares it with
/// `f_u`/`g_u`.
///
/// The field's own parameters supply `u`; slices at `t = 0` or with
/// `f_u(t) + 3·dx > x_max` are skipped (the plateau would touch or leave
/// the grid) and tallied in `skipped_slices`.
///
/// # Errors
///
/// [`AnalysisError::CorruptField`] when the allocation surface holds a
/// non-finite value.
pub fn verify_spend_boundary(field: &SolutionField) -> Result<BoundaryReport, AnalysisError> {
    validate_allocations_for(field)?;
    let grid = field.grid();
    let params = field.params();
    let dx = grid.dx();
    let mut rows = Vec::new();
    let mut skipped = 0u64;
    for it in 0..grid.nt {
        let t = grid.t(it);
        if t <= 0.0 {
            skipped += 1;
            continue;
        }
        // Case and closed forms depend only on (t, params); the probe
        // stock is arbitrary.
        let verdict = classify_spend_it_all(1.0, t, params, false);
        if verdict.f_value + 3.0 * dx > grid.x_max {
            skipped += 1;
            continue;
        }
        let mut x_plateau = 0.0;
        for ix in (0..grid.nx).rev() {
            let x = grid.x(ix);
            if x - field.k(ix, it) <= PLATEAU_TOL * (1.0 + x) {
                x_plateau = x;
                break;
            }
        }
        let mut x_tolerant = 0.0;
        for ix in (0..grid.nx).rev() {
            let x = grid.x(ix);
            if x - field.k(ix, it) <= 2.0 * dx {
                x_tolerant = x;
                break;
            }
        }
        rows.push(BoundaryRow {
            t,
            case: verdict.case,
            x_plateau,
            x_tolerant,
            f_value: verdict.f_value,
            g_value: verdict.g_value,
            plateau_deviation: deviation(x_plateau, verdict.f_value, verdict.g_value, verdict.case),
            tolerant_deviation: deviation(
                x_tolerant,
                verdict.f_value,
                verdict.g_value,
                verdict.case,
            ),
        });
    }
    let max_plateau_deviation = rows.iter().fold(0.0f64, |m, r| m.max(r.plateau_deviation));
    let max_tolerant_deviation = rows.iter().fold(0.0f64, |m, r| m.max(r.tolerant_deviation));
    Ok(BoundaryReport {
        v: params.v,
        u: params.u,
        dx,
        rows,
        max_plateau_deviation,
        max_tolerant_deviation,
        skipped_slices: skipped,
    })
}
