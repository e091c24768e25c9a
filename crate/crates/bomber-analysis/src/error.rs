//! Error type for the verification passes.

use bomber_solver::SolverError;
use thiserror::Error;

/// Failures an analysis pass can report.
///
/// Monotonicity violations and boundary deviations are *findings*, not
/// errors — they come back inside reports. Errors are reserved for inputs
/// the pass cannot meaningfully analyze at all.
#[derive(Debug, Error)]
pub enum AnalysisError {
    /// A surface holds a non-finite value, so adjacency comparisons would
    /// be meaningless; names the surface and the first offending node.
    #[error("field is corrupt: {0}")]
    CorruptField(String),

    /// Asymptotic rows need `t ∈ (0, 1)` so that `|log t| > 0`.
    #[error("asymptotic row requires t in (0, 1), got t = {t}")]
    TimeOutOfRange { t: f64 },

    /// The requested row sits at a stock `x = |log t|/ρ` beyond what a
    /// desk-scale grid can hold.
    #[error("row at t = {t} needs stock x = {x:.2} beyond the supported cap {cap}")]
    StockBeyondCap { t: f64, x: f64, cap: f64 },

    /// An underlying solve failed.
    #[error(transparent)]
    Solver(#[from] SolverError),
}
