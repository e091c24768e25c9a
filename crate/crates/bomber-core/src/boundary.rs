//! Spend-it-all boundaries and their case analysis.
//!
//! For every remaining time `t` there is a threshold on the ammunition
//! stock below which the optimal policy fires *everything* at the next
//! enemy (`K(x,t) = x`). Two closed forms bracket that threshold:
//!
//! ```text
//! f_u(t) = log[1 + u/(e^{tu} − 1)]      (outer boundary)
//! g_u(t) = log(1 + 1/t − u)             (inner boundary)
//! ```
//!
//! with `f_0(t) = g_0(t) = log(1 + 1/t)` in the limit `u = 0`. The
//! characterization splits into four parameter cases:
//!
//! - **I** (`u = 0`), **II** (`0 < u < 1/2` and `t ≥ u^{−1}·log 2v`),
//!   **III** (`u ≥ 1/2`): `K(x,t) = x` holds *iff* `x ≤ f_u(t)`.
//! - **IV** (`0 < u < 1/2` and `t < u^{−1}·log 2v`): `K(x,t) = x` is
//!   guaranteed for `x ≤ g_u(t)` and ruled out for `x > f_u(t)`; between
//!   the two boundaries this case analysis alone is silent.
//!
//! [`classify_spend_it_all`] reports the verdict together with both
//! boundary values and the case that applied. An opt-in `exact_mode`
//! treats `f_u` as the exact boundary in case IV as well (a sharper
//! result proved elsewhere); the default reports the indeterminate band
//! honestly.

use serde::{Deserialize, Serialize};

use crate::params::ModelParams;

/// Outer spend-it-all boundary `f_u(t)`.
///
/// Returns `log[1 + u/(e^{tu} − 1)]` for `u > 0` and the limit
/// `log(1 + 1/t)` for `u = 0`. Strictly decreasing and positive on
/// `t > 0`, with `f_u(t) − |log t| → 0` as `t → 0`.
///
/// Computed via `expm1`/`log1p` so the small-`u` regime degrades
/// gracefully into `f_0` at full precision instead of suffering the
/// `e^{tu} − 1` cancellation.
///
/// # Panics
///
/// Panics unless `t > 0`.
pub fn f_boundary(t: f64, params: &ModelParams) -> f64 {
    assert!(t > 0.0, "remaining time must be positive, got {t}");
    if params.u == 0.0 {
        (1.0 / t).ln_1p()
    } else {
        (params.u / (t * params.u).exp_m1()).ln_1p()
    }
}

/// Inner spend-it-all boundary `g_u(t) = log(1 + 1/t − u)`.
///
/// May be negative for large `t` (then it certifies nothing); coincides
/// with [`f_boundary`] when `u = 0` and is strictly below it when `u > 0`.
///
/// # Panics
///
/// Panics unless `t > 0` and `1 + 1/t − u > 0`.
pub fn g_boundary(t: f64, params: &ModelParams) -> f64 {
    assert!(t > 0.0, "remaining time must be positive, got {t}");
    let arg = 1.0 / t - params.u;
    assert!(
        arg > -1.0,
        "log argument 1 + 1/t − u must be positive (t = {t}, u = {})",
        params.u
    );
    arg.ln_1p()
}

/// Which case of the spend-it-all characterization applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCase {
    /// `u = 0`: boundary `f_0(t) = log(1 + 1/t)` is exact.
    I,
    /// `0 < u < 1/2` with `t ≥ u^{−1}·log 2v`: boundary `f_u(t)` is exact.
    II,
    /// `u ≥ 1/2`: boundary `f_u(t)` is exact.
    III,
    /// `0 < u < 1/2` with `t < u^{−1}·log 2v`: only the two-sided
    /// `g_u ≤ boundary ≤ f_u` estimate is available.
    IV,
}

/// Verdict on whether the optimal policy fires the whole stock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpendVerdict {
    /// `K(x,t) = x`: fire everything at the next enemy.
    SpendAll,
    /// `K(x,t) < x`: hold some ammunition back.
    InteriorSpend,
    /// Case IV band `g_u(t) < x ≤ f_u(t)`: undetermined by this analysis.
    IndeterminateBand,
}

/// Output of [`classify_spend_it_all`]: the verdict plus the boundary
/// values and case that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpendItAllVerdict {
    pub verdict: SpendVerdict,
    /// Outer boundary `f_u(t)` at the queried time.
    pub f_value: f64,
    /// Inner boundary `g_u(t)` at the queried time.
    pub g_value: f64,
    /// Parameter case that determined the verdict.
    pub case: BoundaryCase,
}

/// Classifies whether `K(x,t) = x` (spend it all) at the point `(x, t)`.
///
/// In cases I–III the boundary `f_u(t)` is exact: the verdict is
/// [`SpendVerdict::SpendAll`] iff `x ≤ f_u(t)`. In case IV the default
/// (`exact_mode = false`) reports [`SpendVerdict::IndeterminateBand`] for
/// `g_u(t) < x ≤ f_u(t)`; with `exact_mode = true` the outer boundary is
/// trusted as exact there too, so the band disappears.
///
/// # Panics
///
/// Panics unless `x > 0` and `t > 0`.
pub fn classify_spend_it_all(
    x: f64,
    t: f64,
    params: &ModelParams,
    exact_mode: bool,
) -> SpendItAllVerdict {
    assert!(x > 0.0, "ammunition stock must be positive, got {x}");
    let f_value = f_boundary(t, params);
    let g_value = g_boundary(t, params);
    let case = if params.u == 0.0 {
        BoundaryCase::I
    } else if params.u >= 0.5 {
        BoundaryCase::III
    } else if t >= (2.0 * params.v).ln() / params.u {
        BoundaryCase::II
    } else {
        BoundaryCase::IV
    };
    let boundary_is_exact = exact_mode || case != BoundaryCase::IV;
    let verdict = if boundary_is_exact {
        if x <= f_value {
            SpendVerdict::SpendAll
        } else {
            SpendVerdict::InteriorSpend
        }
    } else if x <= g_value {
        SpendVerdict::SpendAll
    } else if x > f_value {
        SpendVerdict::InteriorSpend
    } else {
        SpendVerdict::IndeterminateBand
    };
    SpendItAllVerdict {
        verdict,
        f_value,
        g_value,
        case,
    }
}
