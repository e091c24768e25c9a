//! Adjacency scans for the three allocation-monotonicity statements.
//!
//! Writing `K(x,t)` for the stored optimal allocation:
//!
//! * **A** — for each stock, `K` does not increase as the horizon grows:
//!   `K(x, t') ≤ K(x, t)` for `t' > t`. Proven; a violation beyond
//!   discretization slack is a solver defect.
//! * **B** — for each horizon, `K` does not decrease with the stock:
//!   `K(x', t) ≥ K(x, t)` for `x' > x`. Open in general: the scan reports
//!   what it finds and asserts nothing.
//! * **C** — the *held-back* stock `x − K(x,t)` does not decrease with
//!   `x`. Proven; same standing as A.
//!
//! A violation is recorded only when the defect exceeds the caller's
//! tolerance (typically a couple of grid steps, since nodewise argmax
//! locations rattle inside one cell). The scan never fails on findings —
//! a counterexample to B would be the most interesting output this crate
//! can produce, and it should arrive as data.

use std::fmt;

use bomber_solver::SolutionField;
use serde::{Deserialize, Serialize};

use crate::AnalysisError;

/// Which monotonicity statement to scan for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conjecture {
    /// `K(x, ·)` nonincreasing in the horizon (proven).
    A,
    /// `K(·, t)` nondecreasing in the stock (open).
    B,
    /// `x − K(x, ·)` nondecreasing in the stock (proven).
    C,
}

impl fmt::Display for Conjecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conjecture::A => write!(f, "A (K nonincreasing in t)"),
            Conjecture::B => write!(f, "B (K nondecreasing in x)"),
            Conjecture::C => write!(f, "C (x − K nondecreasing in x)"),
        }
    }
}

/// One adjacent pair that broke the scanned ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Ammunition index of the *reference* node.
    pub x_index: usize,
    /// Time index of the reference node.
    pub t_index: usize,
    /// Index of the neighbor along the scanned axis (`t` for A, `x` for
    /// B and C).
    pub neighbor_index: usize,
    /// Size of the defect, in allocation units; always exceeds the
    /// report's tolerance.
    pub magnitude: f64,
}

/// Outcome of one conjecture scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    /// The statement that was scanned.
    pub conjecture: Conjecture,
    /// Every adjacent pair whose defect exceeded `tolerance`.
    pub violations: Vec<Violation>,
    /// Slack below which a defect is attributed to discretization.
    pub tolerance: f64,
    /// Number of adjacent pairs scanned.
    pub total_checked: u64,
}

impl ViolationReport {
    /// True when the scan found nothing beyond the tolerance.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Largest recorded defect, if any.
    pub fn worst_magnitude(&self) -> Option<f64> {
        self.violations
            .iter()
            .map(|v| v.magnitude)
            .fold(None, |acc, m| Some(acc.map_or(m, |a: f64| a.max(m))))
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "conjecture {}", self.conjecture)?;
        writeln!(
            f,
            "pairs checked {}   tolerance {:e}   violations {}",
            self.total_checked,
            self.tolerance,
            self.violations.len()
        )?;
        if !self.violations.is_empty() {
            writeln!(
                f,
                "{:>8} {:>8} {:>10} {:>14}",
                "x-index", "t-index", "neighbor", "magnitude"
            )?;
            for v in &self.violations {
                writeln!(
                    f,
                    "{:>8} {:>8} {:>10} {:>14.6e}",
                    v.x_index, v.t_index, v.neighbor_index, v.magnitude
                )?;
            }
        }
        Ok(())
    }
}

/// Rejects fields whose allocation surface holds non-finite values.
pub(crate) fn validate_allocations_for(field: &SolutionField) -> Result<(), AnalysisError> {
    let grid = field.grid();
    for it in 0..grid.nt {
        for ix in 0..grid.nx {
            if !field.k(ix, it).is_finite() {
                return Err(AnalysisError::CorruptField(format!(
                    "K({ix}, {it}) = {}",
                    field.k(ix, it)
                )));
            }
        }
    }
    Ok(())
}

/// Scans every adjacent node pair of the allocation surface for the
/// chosen monotonicity statement.
///
/// Statement A walks each `x`-row along `t`; B and C walk each `t`-column
/// along `x`. A pair is recorded when its defect exceeds `tolerance`:
/// findings come back in the report, never as an error, no matter how
/// many there are.
///
/// # Errors
///
/// [`AnalysisError::CorruptField`] when the allocation surface holds a
/// non-finite value.
///
/// # Panics
///
/// Panics unless `tolerance` is nonnegative and finite.
pub fn check_conjecture(
    field: &SolutionField,
    which: Conjecture,
    tolerance: f64,
) -> Result<ViolationReport, AnalysisError> {
    assert!(
        tolerance.is_finite() && tolerance >= 0.0,
        "tolerance must be a nonnegative real, got {tolerance}"
    );
    validate_allocations_for(field)?;
    let grid = field.grid();
    let mut violations = Vec::new();
    let mut total_checked = 0u64;
    match which {
        Conjecture::A => {
            for ix in 0..grid.nx {
                for it in 0..grid.nt - 1 {
                    total_checked += 1;
                    let defect = field.k(ix, it + 1) - field.k(ix, it);
                    if defect > tolerance {
                        violations.push(Violation {
                            x_index: ix,
                            t_index: it,
                            neighbor_index: it + 1,
                            magnitude: defect,
                        });
                    }
                }
            }
        }
        Conjecture::B => {
            for it in 0..grid.nt {
                for ix in 0..grid.nx - 1 {
                    total_checked += 1;
                    let defect = field.k(ix, it) - field.k(ix + 1, it);
                    if defect > tolerance {
                        violations.push(Violation {
                            x_index: ix,
                            t_index: it,
                            neighbor_index: ix + 1,
                            magnitude: defect,
                        });
                    }
                }
            }
        }
        Conjecture::C => {
            for it in 0..grid.nt {
                for ix in 0..grid.nx - 1 {
                    total_checked += 1;
                    let held_lo = grid.x(ix) - field.k(ix, it);
                    let held_hi = grid.x(ix + 1) - field.k(ix + 1, it);
                    let defect = held_lo - held_hi;
                    if defect > tolerance {
                        violations.push(Violation {
                            x_index: ix,
                            t_index: it,
                            neighbor_index: ix + 1,
                            magnitude: defect,
                        });
                    }
                }
            }
        }
    }
    Ok(ViolationReport {
        conjecture: which,
        violations,
        tolerance,
        total_checked,
    })
}
