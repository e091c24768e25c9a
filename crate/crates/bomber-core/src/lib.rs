//! Closed-form machinery for the continuous bomber problem.
//!
//! An aircraft carrying `x` units of ammunition must survive enemy
//! encounters arriving as a unit-rate Poisson process over a remaining time
//! `t`. Firing `y` units at an enemy defeats it with probability
//! `a(y) = 1 − v·e^{−y}`; an undefeated enemy destroys the aircraft with
//! probability `v`. The optimal firing amount `K(x,t)`, the survival
//! probability `P(x,t)`, and the conditional survival probability `H(x,t)`
//! given an encounter right now are defined by
//!
//! ```text
//! H(x,t) = max_{k ∈ [0,x]} a(k)·P(x−k, t),      K(x,t) = argmax,
//! ∂P/∂t  = H(x,t) − P(x,t),                     P(x,0) = 1.
//! ```
//!
//! This crate collects everything about that problem that has a closed
//! form, leaving grid solving and simulation to sibling crates:
//!
//! - [`params`]: the model parameters and the per-encounter survival
//!   function `a(y)`.
//! - [`boundary`]: the spend-it-all boundaries `f_u`, `g_u` and the case
//!   analysis classifying where `K(x,t) = x`.
//! - [`maximizers`]: exact maximizers of the two auxiliary one-encounter
//!   bound functions, used to cross-check grid optimization.
//! - [`regions`]: the small-`t` regime machinery — region indices `j`,
//!   the limits `α_j(ρ)`, `β_j(ρ)` of `K/x` and of the log-complements of
//!   `H` and `P`, and the consistency identities connecting them.
//! - [`bounds`]: crude upper/lower bounds on `P` and `H` (valid at every
//!   point, useful as invariant checks on numerical solutions) and the
//!   ammunition-splitting inequalities behind them.
//!
//! Functions here are pure and allocation-free unless noted; domain
//! violations panic (documented per function) rather than returning
//! errors, since every precondition is cheaply checkable by the caller.

pub mod boundary;
pub mod bounds;
pub mod maximizers;
pub mod params;
pub mod regions;

pub use boundary::{
    classify_spend_it_all, f_boundary, g_boundary, BoundaryCase, SpendItAllVerdict, SpendVerdict,
};
pub use bounds::{
    check_division_inequalities, crude_upper_bound_P, spend_it_all_H, two_stage_H_lower,
    DivisionInequalityReport,
};
pub use maximizers::{unimodal_max_F1, unimodal_max_F2};
pub use params::{survive_prob, ModelParams};
pub use regions::{
    alpha, asymptotic_K, beta, lemma2_identities, monotone_limit_gap, region_of_point,
    region_of_rho, Lemma2Report, RegionLabel,
};
