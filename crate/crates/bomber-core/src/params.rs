//! Model parameters and the per-encounter survival function.

use serde::{Deserialize, Serialize};

/// Parameters of the continuous bomber model.
///
/// The model is normalized so that enemies arrive at Poisson rate 1 and one
/// unit of ammunition scales an enemy's slip-through odds by `e^{−1}`; both
/// constants are absorbed into the time and ammunition units and are not
/// configurable. The only free parameter is `v`, the probability that an
/// enemy who survives the bomber's fire destroys the bomber in return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Probability in `(0, 1]` that a surviving enemy destroys the bomber.
    pub v: f64,
    /// Complement `1 − v`, stored explicitly because most closed forms are
    /// written in terms of `u` and exactness of `u = 1 − v` matters near
    /// `u = 0`.
    pub u: f64,
}

impl ModelParams {
    /// Enemy arrival rate; fixed at 1 (the time unit absorbs it).
    pub const ARRIVAL_RATE: f64 = 1.0;

    /// Per-unit ammunition decay base `e^{−1}` (the ammunition unit absorbs
    /// it): firing `y` units lets the enemy through with probability `e^{−y}`.
    pub const DECAY_BASE: f64 = 1.0 / std::f64::consts::E;

    /// Creates parameters from the kill probability `v`.
    ///
    /// # Panics
    ///
    /// Panics unless `v ∈ (0, 1]`.
    pub fn new(v: f64) -> Self {
        assert!(
            v > 0.0 && v <= 1.0,
            "kill probability v must lie in (0, 1], got {v}"
        );
        Self { v, u: 1.0 - v }
    }
}

/// Probability `a(y) = 1 − v·e^{−y}` of defeating a single enemy when
/// firing `y` units of ammunition.
///
/// Strictly increasing in `y`, with `a(0) = u` exactly and `a(y) → 1` as
/// `y → ∞`.
///
/// # Panics
///
/// Panics if `y` is negative or NaN.
pub fn survive_prob(y: f64, params: &ModelParams) -> f64 {
    assert!(y >= 0.0, "ammunition expenditure must be nonnegative, got {y}");
    1.0 - params.v * (-y).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn survive_prob_at_zero_is_exactly_u() {
        for v in [1.0, 0.75, 0.5, 0.25, 1e-9] {
            let p = ModelParams::new(v);
            assert_eq!(survive_prob(0.0, &p), p.u);
        }
    }

    #[test]
    fn survive_prob_matches_direct_evaluation() {
        // 1 − 0.5·e^{−1}, evaluated with 50-digit arithmetic.
        let p = ModelParams::new(0.5);
        assert_abs_diff_eq!(
            survive_prob(1.0, &p),
            0.816_060_279_414_278_8,
            epsilon = 1e-15
        );
    }

    #[test]
    fn survive_prob_is_increasing_and_bounded() {
        let p = ModelParams::new(0.7);
        let mut last = -1.0;
        for i in 0..=1000 {
            let y = i as f64 * 0.03;
            let a = survive_prob(y, &p);
            // Strict growth until v·e^{−y} drops below an ulp of 1, weak after.
            if y < 30.0 {
                assert!(a > last);
            } else {
                assert!(a >= last);
            }
            assert!((p.u..=1.0).contains(&a));
            last = a;
        }
        assert_eq!(survive_prob(f64::INFINITY, &p), 1.0);
    }

    #[test]
    #[should_panic(expected = "nonnegative")]
    fn survive_prob_rejects_negative_y() {
        survive_prob(-0.1, &ModelParams::new(0.5));
    }

    #[test]
    #[should_panic(expected = "kill probability")]
    fn params_reject_v_zero() {
        ModelParams::new(0.0);
    }
}
