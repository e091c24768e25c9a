//! Verification passes over solved survival fields.
//!
//! The solver produces `P`, `K`, `H` surfaces; the theory makes claims
//! about their shape. This crate checks each claim against a concrete
//! [`SolutionField`](bomber_solver::SolutionField) and reports findings as
//! serializable data rather than panics, so that a genuine counterexample
//! is recorded, not crashed on:
//!
//! * [`check_conjecture`] — adjacency scans for the three monotonicity
//!   statements: `K` nonincreasing in `t` (A), `K` nondecreasing in `x`
//!   (B, open in general), and `x − K` nondecreasing in `x` (C).
//! * [`verify_spend_boundary`] — recovers the empirical spend-it-all
//!   threshold from each time slice and measures its deviation from the
//!   closed forms `f_u(t)` / `g_u(t)`.
//! * [`asymptotics_table`] — solves purpose-sized grids deep into the
//!   small-`t` corner and tabulates `K/x`, `|log(1−H)|/x`, `|log(1−P)|/x`
//!   against their regime limits `α_j(ρ)` and `β_j(ρ)`.
//! * [`lemma3_check`] — wherever the value is already high
//!   (`H ≥ 1 − e^{−γx}`), the allocation must be correspondingly large
//!   (`K ≥ γx` up to a margin).
//!
//! Everything here is a pure function of its inputs: identical fields
//! produce identical reports, bit for bit.

mod asymptotics;
mod boundary_check;
mod conjectures;
mod error;
mod lemma3;

pub use asymptotics::{
    asymptotics_table, asymptotics_table_in_mode, write_asymptotics_csv, AsymptoticsRow,
    ASYM_DX_TARGET, ASYM_MAX_STOCK, ASYM_NT,
};
pub use boundary_check::{verify_spend_boundary, BoundaryReport, BoundaryRow};
pub use conjectures::{check_conjecture, Conjecture, Violation, ViolationReport};
pub use error::AnalysisError;
pub use lemma3::{lemma3_check, Lemma3Report, Lemma3Violation};

// The limiting allocation difference is part of the same verification
// vocabulary; surfaced here so downstream code needs only one import.
pub use bomber_core::monotone_limit_gap;

/// Serializes any report to pretty-printed JSON.
///
/// Thin wrapper so every report type shares one canonical JSON shape
/// (`serde_json` with a trailing newline, suitable for files).
///
/// # Panics
///
/// Panics if serialization fails, which for these plain-data reports
/// would indicate a bug, not bad input.
pub fn report_to_json<T: serde::Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports are plain serializable data");
    s.push('\n');
    s
}
