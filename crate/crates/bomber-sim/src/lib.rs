//! Monte Carlo oracle for the continuous bomber model.
//!
//! An independent check on the dynamic-programming solver: fly the
//! mission many times under an explicit allocation policy and count
//! survivals. One trial from state `(x₀, t₀)`:
//!
//! 1. enemies arrive as a unit-rate Poisson process — draw exponential(1)
//!    gaps until the next arrival would pass the horizon;
//! 2. at an encounter with stock `x` and remaining time `t` the policy
//!    commits `k ∈ [0, x]`;
//! 3. the enemy survives the burst with probability `e^{−k}`, and a
//!    survivor then destroys the bomber with probability `v`;
//! 4. the trial succeeds when the clock runs out with the bomber alive.
//!
//! Per-encounter survival is therefore `a(k) = 1 − v·e^{−k}`, the model
//! the solver discretizes — but nothing here shares code with the solver
//! beyond the policy lookup itself, so agreement is evidence, not
//! tautology.
//!
//! Trials use one counter-based generator (ChaCha12) with the trial index
//! as the stream: every trial's randomness is an independent, individually
//! addressable sequence from a single seed. Aggregation is an integer sum
//! of survivals, so reports are identical for any thread count or
//! completion order.

use bomber_core::{f_boundary, ModelParams};
use bomber_solver::SolutionField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// How the bomber commits ammunition at each encounter.
#[derive(Debug, Clone, Copy)]
pub enum Policy<'a> {
    /// Look the allocation up in a solved field at the encounter state
    /// (bilinear interpolation between grid nodes).
    FromField(&'a SolutionField),
    /// Fire the whole remaining stock at the first enemy met.
    SpendItAll,
    /// Fire the fraction `φ ∈ (0, 1]` of the remaining stock every time.
    FixedFraction(f64),
    /// Fire `(x + f_u(t))/2` at the first enemy (the reserve split that
    /// maximizes the two-encounter bound), everything at the second.
    TwoStage,
}

impl Policy<'_> {
    /// Human-readable description used in reports.
    pub fn describe(&self) -> String {
        match self {
            Policy::FromField(field) => {
                let g = field.grid();
                format!(
                    "from-field (v = {}, grid {}x{})",
                    field.params().v,
                    g.nx,
                    g.nt
                )
            }
            Policy::SpendItAll => "spend-it-all".to_string(),
            Policy::FixedFraction(phi) => format!("fixed-fraction {phi}"),
            Policy::TwoStage => "two-stage".to_string(),
        }
    }
}

/// Aggregate outcome of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Number of missions flown.
    pub trials: u64,
    /// Missions that ended with the bomber alive.
    pub survived: u64,
    /// Survival estimate `survived / trials`.
    pub p_hat: f64,
    /// Binomial standard error `√(p̂(1−p̂)/trials)`.
    pub std_err: f64,
    /// Seed the run was keyed on.
    pub seed: u64,
    /// Description of the policy flown.
    pub policy: String,
}

impl fmt::Display for SimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} trials {:>9}  survived {:>9}  p_hat {:.6}  std_err {:.6}  seed {}",
            self.policy, self.trials, self.survived, self.p_hat, self.std_err, self.seed
        )
    }
}

/// Configuration failures detectable before any trial runs.
#[derive(Debug, Error)]
pub enum SimError {
    /// The start state lies outside the field a policy would query.
    #[error("start state (x = {x}, t = {t}) is outside the field domain [0, {x_max}] × [0, {t_max}]")]
    StartOutsideField {
        x: f64,
        t: f64,
        x_max: f64,
        t_max: f64,
    },
    /// The simulation's kill probability differs from the field's.
    #[error("simulation uses v = {v_sim} but the queried field was solved for v = {v_field}")]
    ModelMismatch { v_sim: f64, v_field: f64 },
}

/// Ammunition committed by `policy` at an encounter with stock `x` and
/// horizon `t`; `first` marks the first encounter of the trial.
fn allocation(policy: &Policy, x: f64, t: f64, first: bool, params: &ModelParams) -> f64 {
    match policy {
        Policy::FromField(field) => field
            .policy_at(x, t)
            .expect("trial state stays inside the validated field domain")
            .k,
        Policy::SpendItAll => x,
        Policy::FixedFraction(phi) => phi * x,
        Policy::TwoStage => {
            if first {
                (0.5 * (x + f_boundary(t, params))).clamp(0.0, x)
            } else {
                x
            }
        }
    }
}

/// Flies one mission; true when the bomber survives to the deadline.
fn run_trial(policy: &Policy, x0: f64, t0: f64, params: &ModelParams, rng: &mut ChaCha12Rng) -> bool {
    let mut x = x0;
    let mut t = t0;
    let mut first = true;
    loop {
        let gap: f64 = Exp1.sample(rng);
        if gap >= t {
            return true;
        }
        t -= gap;
        let k = allocation(policy, x, t, first, params);
        first = false;
        // The enemy survives the burst of k with probability e^{−k}…
        if rng.gen::<f64>() < (-k).exp() {
            // …and a survivor destroys the bomber with probability v.
            if rng.gen::<f64>() < params.v {
                return false;
            }
        }
        x = (x - k).max(0.0);
    }
}

/// Runs `trials` missions from `(x0, t0)` under `policy` and aggregates
/// survivals.
///
/// Trials run concurrently; trial `i` draws from stream `i` of a
/// ChaCha12 generator keyed on `seed`, so the exact survivals — and hence
/// the report — are reproducible independent of thread count.
///
/// # Errors
///
/// [`SimError::StartOutsideField`] when a [`Policy::FromField`] start
/// state is not inside the field's grid, and [`SimError::ModelMismatch`]
/// when the field was solved for different parameters than the
/// simulation flies with.
///
/// # Panics
///
/// Panics unless `x0 ≥ 0`, `t0 > 0`, `trials ≥ 1`, and any
/// [`Policy::FixedFraction`] has `φ ∈ (0, 1]`.
pub fn simulate(
    policy: &Policy,
    x0: f64,
    t0: f64,
    params: &ModelParams,
    trials: u64,
    seed: u64,
) -> Result<SimReport, SimError> {
    assert!(
        x0.is_finite() && x0 >= 0.0,
        "initial stock must be a nonnegative real, got {x0}"
    );
    assert!(
        t0.is_finite() && t0 > 0.0,
        "initial horizon must be a positive real, got {t0}"
    );
    assert!(trials >= 1, "at least one trial is required");
    if let Policy::FixedFraction(phi) = policy {
        assert!(
            *phi > 0.0 && *phi <= 1.0,
            "fixed fraction must lie in (0, 1], got {phi}"
        );
    }
    if let Policy::FromField(field) = policy {
        let grid = field.grid();
        if x0 > grid.x_max || t0 > grid.t_max {
            return Err(SimError::StartOutsideField {
                x: x0,
                t: t0,
                x_max: grid.x_max,
                t_max: grid.t_max,
            });
        }
        if field.params().v != params.v {
            return Err(SimError::ModelMismatch {
                v_sim: params.v,
                v_field: field.params().v,
            });
        }
    }
    let survived = (0..trials)
        .into_par_iter()
        .filter(|&trial| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            run_trial(policy, x0, t0, params, &mut rng)
        })
        .count() as u64;
    let p_hat = survived as f64 / trials as f64;
    Ok(SimReport {
        trials,
        survived,
        p_hat,
        std_err: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        seed,
        policy: policy.describe(),
    })
}
