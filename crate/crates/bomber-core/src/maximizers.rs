//! Exact maximizers of the two auxiliary one-encounter bound functions.
//!
//! Two families of unimodal functions bound the conditional survival value
//! of firing `y` at the current enemy:
//!
//! ```text
//! F1(y) = a(x − y)·exp(−vt·e^{−y})        (save y, then survive a crude tail bound)
//! F2(y) = a(y)·[1 + A·a(x − y)]            (fire y now, everything else next time)
//! ```
//!
//! Both are unimodal over all of `ℝ` and their maximizers have closed
//! forms, which makes them sharp cross-checks for grid-based optimization:
//! a numerical argmax that disagrees with these by more than a grid step
//! indicates a solver defect.

use crate::params::ModelParams;

/// Maximizer of `F1(y) = a(x − y)·exp(−vt·e^{−y})` over all reals.
///
/// Closed form `y* = log(−vt + √(v²t² + 4t·e^x)) − log 2`, evaluated in a
/// rearranged form that neither overflows `e^x` nor cancels for `t ≫ e^x`:
///
/// ```text
/// y* = x/2 + log(2t) − log(vt·e^{−x/2} + √(v²t²·e^{−x} + 4t))
/// ```
///
/// The maximizer may lie outside `[0, x]`; in particular `y* = 0` exactly
/// when `x = g_u(t)`, which is how the inner boundary arises.
///
/// # Panics
///
/// Panics unless `x > 0` and `t > 0`.
#[allow(non_snake_case)] // F1 names the bound function, a fixed math symbol
pub fn unimodal_max_F1(x: f64, t: f64, params: &ModelParams) -> f64 {
    assert!(x > 0.0, "ammunition stock must be positive, got {x}");
    assert!(t > 0.0, "remaining time must be positive, got {t}");
    let vt = params.v * t;
    let shifted = vt * (-0.5 * x).exp() + (vt * vt * (-x).exp() + 4.0 * t).sqrt();
    0.5 * x + (2.0 * t).ln() - shifted.ln()
}

/// Maximizer of `F2(y) = a(y)·[1 + A·a(x − y)]` over all reals:
/// `y* = [x + log(1 + 1/A)]/2`.
///
/// The maximizer does not depend on `v` (the kill probability scales both
/// factors symmetrically). With `A = (e^{tu} − 1)/u` this is the two-stage
/// allocation `(x + f_u(t))/2`, the amount the "fire now, rest at the next
/// enemy" strategy sends at the current one.
///
/// # Panics
///
/// Panics unless `x > 0` and `A > 0`.
#[allow(non_snake_case)] // F2 names the bound function, a fixed math symbol
pub fn unimodal_max_F2(x: f64, a_weight: f64) -> f64 {
    assert!(x > 0.0, "ammunition stock must be positive, got {x}");
    assert!(a_weight > 0.0, "weight A must be positive, got {a_weight}");
    0.5 * (x + a_weight.recip().ln_1p())
}
