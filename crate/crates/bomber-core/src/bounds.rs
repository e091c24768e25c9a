//! Crude probability bounds and the ammunition-splitting inequalities.
//!
//! None of these require solving anything, which makes them ideal
//! invariant checks for numerical solutions: every solved field must
//! respect them at every node, independent of grid resolution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1};

use crate::params::{survive_prob, ModelParams};

/// Slack, in log-space, allowed before a sampled inequality counts as a
/// violation; covers accumulated rounding in products of up to 20 factors.
const INEQUALITY_SLACK: f64 = 1e-12;

/// Upper bound `P(x,t) ≤ exp(−vt·e^{−x})`: even with infinite ammunition
/// spread optimally, each enemy gets through with probability at least
/// `e^{−x}` and then kills with probability `v`.
///
/// # Panics
///
/// Panics unless `x ≥ 0` and `t > 0`.
#[allow(non_snake_case)] // P names the survival function, a fixed math symbol
pub fn crude_upper_bound_P(x: f64, t: f64, params: &ModelParams) -> f64 {
    assert!(x >= 0.0, "ammunition stock must be nonnegative, got {x}");
    assert!(t > 0.0, "remaining time must be positive, got {t}");
    (-params.v * t * (-x).exp()).exp()
}

/// Conditional survival value `a(x)·e^{−tv}` of the spend-it-all strategy:
/// fire the whole stock at the enemy at hand, then ride out the remaining
/// time unarmed. A valid lower bound on `H(x,t)` (with equality on the
/// spend-it-all region, and trivially at `x = 0`).
///
/// # Panics
///
/// Panics unless `x ≥ 0` and `t > 0`.
#[allow(non_snake_case)] // H names the conditional survival function
pub fn spend_it_all_H(x: f64, t: f64, params: &ModelParams) -> f64 {
    assert!(t > 0.0, "remaining time must be positive, got {t}");
    survive_prob(x, params) * (-t * params.v).exp()
}

/// Conditional survival value of the two-stage strategy: fire `y` at the
/// enemy at hand and the remaining `x − y` at the next one (if any), then
/// hope for the best. A valid lower bound on `H(x,t)` for every
/// `y ∈ [0, x]`:
///
/// ```text
/// H̲(y) = e^{−t}·a(y)·[1 + ((e^{tu} − 1)/u)·a(x − y)]
/// ```
///
/// with the `u = 0` limit replacing the weight by `t`. At `y = x` the
/// weight collapses and the value reduces to [`spend_it_all_H`].
///
/// # Panics
///
/// Panics unless `0 ≤ y ≤ x` and `t > 0` (so `x ≥ 0`).
#[allow(non_snake_case)] // H names the conditional survival function
pub fn two_stage_H_lower(y: f64, x: f64, t: f64, params: &ModelParams) -> f64 {
    assert!(
        (0.0..=x).contains(&y),
        "first-stage expenditure must lie in [0, x], got y = {y}, x = {x}"
    );
    assert!(t > 0.0, "remaining time must be positive, got {t}");
    let weight = if params.u == 0.0 {
        t
    } else {
        (t * params.u).exp_m1() / params.u
    };
    (-t).exp() * survive_prob(y, params) * (1.0 + weight * survive_prob(x - y, params))
}

/// Outcome of sampling the two splitting inequalities; see
/// [`check_division_inequalities`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisionInequalityReport {
    /// Number of random splits sampled.
    pub samples: u64,
    /// Samples violating `∏ a(b_j) ≤ a(y/i)^i` beyond the slack.
    pub equal_split_failures: u64,
    /// Samples violating `a(y/i)^i ≤ u^i·e^{vy/u}` beyond the slack.
    pub growth_failures: u64,
    /// Worst signed log-space margin of the first inequality (negative
    /// means it held with room to spare).
    pub worst_equal_split_margin: f64,
    /// Worst signed log-space margin of the second inequality; NaN when
    /// that check was skipped.
    pub worst_growth_margin: f64,
    /// Whether the second inequality was evaluated (requires `u > 0`).
    pub growth_checked: bool,
}

impl DivisionInequalityReport {
    /// True when no sampled inequality was violated beyond the slack.
    pub fn clean(&self) -> bool {
        self.equal_split_failures == 0 && self.growth_failures == 0
    }
}

/// Log-space margin of `∏ a(b_j) ≤ a(y/i)^i` for one split: positive
/// means violated.
fn equal_split_margin(parts: &[f64], y: f64, params: &ModelParams) -> f64 {
    let lhs: f64 = parts
        .iter()
        .map(|&b| survive_prob(b, params).ln())
        .sum();
    lhs - parts.len() as f64 * survive_prob(y / parts.len() as f64, params).ln()
}

/// Log-space margin of `a(y/i)^i ≤ u^i·e^{vy/u}`: positive means violated.
/// Requires `u > 0`.
fn growth_margin(y: f64, i: usize, params: &ModelParams) -> f64 {
    let lhs = i as f64 * survive_prob(y / i as f64, params).ln();
    lhs - (i as f64 * params.u.ln() + params.v * y / params.u)
}

/// Samples the two inequalities that control how survival odds respond to
/// dividing `y` units of ammunition among `i` enemies:
///
/// 1. `∏_{j=1}^i a(b_j) ≤ a(y/i)^i` for any nonnegative split
///    `b_1 + … + b_i = y` — equal division is best;
/// 2. `a(y/i)^i ≤ u^i·e^{vy/u}` — and its value grows at most
///    exponentially in `y` (checked only for `u > 0`, where it is finite).
///
/// Each sample draws `i ≤ 20`, a stock `y ∈ (0, 20]`, and a uniform
/// (Dirichlet) split of `y`. Comparisons run in log space so that deep
/// products stay meaningful; violations beyond [`INEQUALITY_SLACK`] are
/// counted, never thrown.
///
/// # Panics
///
/// Panics if `samples == 0`.
pub fn check_division_inequalities(
    samples: u64,
    seed: u64,
    params: &ModelParams,
) -> DivisionInequalityReport {
    assert!(samples >= 1, "at least one sample is required");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let check_growth = params.u > 0.0;
    let mut report = DivisionInequalityReport {
        samples,
        equal_split_failures: 0,
        growth_failures: 0,
        worst_equal_split_margin: f64::NEG_INFINITY,
        worst_growth_margin: if check_growth {
            f64::NEG_INFINITY
        } else {
            f64::NAN
        },
        growth_checked: check_growth,
    };
    let mut parts = Vec::with_capacity(20);
    for _ in 0..samples {
        let i = rng.gen_range(1..=20usize);
        let y = rng.gen_range(1e-2..=20.0f64);
        parts.clear();
        let mut total = 0.0;
        for _ in 0..i {
            let e: f64 = Exp1.sample(&mut rng);
            parts.push(e);
            total += e;
        }
        for b in &mut parts {
            *b *= y / total;
        }

        let split = equal_split_margin(&parts, y, params);
        report.worst_equal_split_margin = report.worst_equal_split_margin.max(split);
        if split > INEQUALITY_SLACK {
            report.equal_split_failures += 1;
        }
        if check_growth {
            let growth = growth_margin(y, i, params);
            report.worst_growth_margin = report.worst_growth_margin.max(growth);
            if growth > INEQUALITY_SLACK {
                report.growth_failures += 1;
            }
        }
    }
    report
}
