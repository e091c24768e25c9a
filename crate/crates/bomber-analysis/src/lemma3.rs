//! High-value ⇒ high-allocation check.
//!
//! Wherever the conditional survival value is already large in the sense
//! `H(x,t) ≥ 1 − e^{−γx}`, the allocation winning that value cannot be
//! small: `K(x,t) ≥ γx` up to lower-order terms. The scan tests this with
//! an explicit margin, flagging nodes where
//!
//! ```text
//! H ≥ 1 − e^{−γx}   but   K < γx − margin·x.
//! ```
//!
//! The antecedent is evaluated on the stored complement (`G ≤ e^{−γx}`),
//! so it stays meaningful where `H` is within ulps of 1. The `x = 0`
//! column is excluded: there the antecedent (`H ≥ 0`) and the conclusion
//! (`K ≥ 0`) both hold trivially, telling nothing. On many fields the
//! antecedent never fires elsewhere either (large γ asks for values the
//! grid's corner cannot reach); the report then comes back empty but says
//! how many nodes were scanned and how many triggered, so "vacuously
//! clean" and "checked and clean" are distinguishable.

use std::fmt;

use bomber_solver::SolutionField;
use serde::{Deserialize, Serialize};

use crate::AnalysisError;

/// One node where the implication failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Violation {
    /// Ammunition index of the node.
    pub x_index: usize,
    /// Time index of the node.
    pub t_index: usize,
    /// Value `H` at the node (which met the antecedent).
    pub h: f64,
    /// Stored allocation at the node.
    pub k: f64,
    /// The bound it fell short of: `γx − margin·x`.
    pub required: f64,
}

/// Outcome of one high-value allocation scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Report {
    /// Value threshold parameter `γ ∈ (0, 1]`.
    pub gamma: f64,
    /// Allowed shortfall as a fraction of `x`.
    pub margin: f64,
    /// Total nodes scanned.
    pub nodes_scanned: u64,
    /// Nodes meeting the antecedent `H ≥ 1 − e^{−γx}`.
    pub triggered: u64,
    /// Triggered nodes whose allocation fell below the bound.
    pub violations: Vec<Lemma3Violation>,
}

impl Lemma3Report {
    /// True when no triggered node broke the bound (including the
    /// vacuous case of nothing triggering).
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when the antecedent never fired, so the scan tested nothing.
    pub fn is_vacuous(&self) -> bool {
        self.triggered == 0
    }
}

impl fmt::Display for Lemma3Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "high-value allocation check: gamma = {}, margin = {}",
            self.gamma, self.margin
        )?;
        writeln!(
            f,
            "nodes {}   triggered {}   violations {}",
            self.nodes_scanned,
            self.triggered,
            self.violations.len()
        )?;
        if !self.violations.is_empty() {
            writeln!(
                f,
                "{:>8} {:>8} {:>14} {:>12} {:>12}",
                "x-index", "t-index", "H", "K", "required"
            )?;
            for v in &self.violations {
                writeln!(
                    f,
                    "{:>8} {:>8} {:>14.10} {:>12.6} {:>12.6}",
                    v.x_index, v.t_index, v.h, v.k, v.required
                )?;
            }
        }
        Ok(())
    }
}

/// Scans every node with `x > 0`: where `H ≥ 1 − e^{−γx}`, requires
/// `K ≥ γx − margin·x`.
///
/// # Errors
///
/// [`AnalysisError::CorruptField`] when the allocation surface holds a
/// non-finite value.
///
/// # Panics
///
/// Panics unless `γ ∈ (0, 1]` and `margin` is a nonnegative real.
pub fn lemma3_check(
    field: &SolutionField,
    gamma: f64,
    margin: f64,
) -> Result<Lemma3Report, AnalysisError> {
    assert!(
        gamma > 0.0 && gamma <= 1.0,
        "gamma must lie in (0, 1], got {gamma}"
    );
    assert!(
        margin.is_finite() && margin >= 0.0,
        "margin must be a nonnegative real, got {margin}"
    );
    crate::conjectures::validate_allocations_for(field)?;
    let grid = field.grid();
    let mut report = Lemma3Report {
        gamma,
        margin,
        nodes_scanned: ((grid.nx - 1) * grid.nt) as u64,
        triggered: 0,
        violations: Vec::new(),
    };
    for it in 0..grid.nt {
        for ix in 1..grid.nx {
            let x = grid.x(ix);
            // H ≥ 1 − e^{−γx} in complement form, exact where H ≈ 1.
            if field.g(ix, it) <= (-gamma * x).exp() {
                report.triggered += 1;
                let required = gamma * x - margin * x;
                let k = field.k(ix, it);
                if k < required {
                    report.violations.push(Lemma3Violation {
                        x_index: ix,
                        t_index: it,
                        h: field.h(ix, it),
                        k,
                        required,
                    });
                }
            }
        }
    }
    Ok(report)
}
