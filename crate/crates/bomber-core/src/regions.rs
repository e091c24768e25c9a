//! Small-`t` regime machinery: region indices and the α/β limits.
//!
//! As `t → 0` with `ρ = |log t|/x` held fixed, the solution organizes
//! itself by how many enemies the bomber can afford to fight seriously.
//! The positive axis of ρ splits into intervals
//!
//! ```text
//! I_j = [ 2/((j+1)·j), 2/(j·(j−1)) )        (upper endpoint ∞ for j = 1)
//! ```
//!
//! and inside `I_j` the normalized quantities converge:
//!
//! ```text
//! K(x,t)/x → α_j(ρ) = 1/j + ρ(j−1)/2
//! |log(1 − H(x,t))|/x → α_j(ρ)
//! |log(1 − P(x,t))|/x → β_j(ρ) = 1/j + ρ(j+1)/2
//! ```
//!
//! so `K(x,t) ≈ x/j + ((j−1)/2)·|log t|`: the stock is split into `j`
//! roughly equal salvos, corrected by a time-horizon term. This module
//! provides the interval lookup, the α/β evaluations, the asymptotic `K`
//! itself, and the internal consistency identities relating consecutive
//! regions (used as a self-check of the formulas).

/// Absolute tolerance for the algebraic identity checks in
/// [`lemma2_identities`]; they hold exactly in real arithmetic, so any
/// discrepancy beyond a few ulps of rounding is a formula error.
const IDENTITY_TOL: f64 = 1e-12;

/// The asymptotic regime containing a given ρ: index `j` with the
/// enclosing interval `[lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionLabel {
    /// Regime index: the limiting number of salvos the stock splits into.
    pub j: u32,
    /// The ratio `|log t|/x` that was classified.
    pub rho: f64,
    /// Inclusive lower endpoint `2/((j+1)·j)` of the interval.
    pub lower: f64,
    /// Exclusive upper endpoint `2/(j·(j−1))`; `+∞` when `j = 1`.
    pub upper: f64,
}

fn interval_lower(j: u32) -> f64 {
    2.0 / ((j as f64 + 1.0) * j as f64)
}

/// Limit of `K(x,t)/x` (and of `|log(1−H)|/x`) in regime `j`:
/// `α_j(ρ) = 1/j + ρ(j−1)/2`.
///
/// # Panics
///
/// Panics unless `j ≥ 1` and `ρ > 0`.
pub fn alpha(j: u32, rho: f64) -> f64 {
    assert!(j >= 1, "regime index must be at least 1");
    assert!(rho > 0.0, "rho must be positive, got {rho}");
    1.0 / j as f64 + rho * (j as f64 - 1.0) / 2.0
}

/// Limit of `|log(1−P)|/x` in regime `j`: `β_j(ρ) = 1/j + ρ(j+1)/2`.
///
/// Satisfies `β_{j+1}(ρ) = α_{j+1}(ρ) + ρ`.
///
/// # Panics
///
/// Panics unless `j ≥ 1` and `ρ > 0`.
pub fn beta(j: u32, rho: f64) -> f64 {
    assert!(j >= 1, "regime index must be at least 1");
    assert!(rho > 0.0, "rho must be positive, got {rho}");
    1.0 / j as f64 + rho * (j as f64 + 1.0) / 2.0
}

/// Finds the regime interval `I_j` containing ρ.
///
/// Interval membership is evaluated against the same floating-point
/// expressions that [`RegionLabel`] reports, so a ρ computed as
/// `2.0/6.0` lands in `I_2` exactly.
///
/// # Panics
///
/// Panics unless `ρ > 0`, or if ρ is so small that the index would
/// exceed 10^9 (far outside any meaningful regime).
pub fn region_of_rho(rho: f64) -> RegionLabel {
    assert!(rho > 0.0, "rho must be positive, got {rho}");
    // Jump near the right index via the real-arithmetic inverse of the
    // lower endpoint, then settle exactly against the f64 endpoints.
    let guess = (-0.5 + (0.25 + 2.0 / rho).sqrt()).ceil();
    assert!(
        guess < 1e9,
        "rho = {rho} is below the supported range of regime indices"
    );
    let mut j = (guess as u32).max(1);
    while j > 1 && rho >= interval_lower(j - 1) {
        j -= 1;
    }
    while rho < interval_lower(j) {
        j += 1;
    }
    RegionLabel {
        j,
        rho,
        lower: interval_lower(j),
        upper: if j == 1 {
            f64::INFINITY
        } else {
            interval_lower(j - 1)
        },
    }
}

/// Classifies the point `(x, t)` by its ratio `ρ̂ = |log t|/x`.
///
/// # Panics
///
/// Panics unless `x > 0` and `0 < t < 1` (the regimes describe the
/// small-`t` corner, where `|log t| > 0`).
pub fn region_of_point(x: f64, t: f64) -> RegionLabel {
    assert!(x > 0.0, "ammunition stock must be positive, got {x}");
    assert!(
        t > 0.0 && t < 1.0,
        "remaining time must lie in (0, 1), got {t}"
    );
    region_of_rho(-t.ln() / x)
}

/// Small-`t` approximation of the optimal allocation:
/// `K(x,t) ≈ x/j + ((j−1)/2)·|log t|` with `j` the regime of `(x,t)`.
///
/// Continuous across the lower endpoint of each regime (both sides give
/// `2x/(j+1)` there) though not smooth.
///
/// # Panics
///
/// Same domain as [`region_of_point`].
#[allow(non_snake_case)] // K names the allocation function, a fixed math symbol
pub fn asymptotic_K(x: f64, t: f64) -> f64 {
    let j = region_of_point(x, t).j as f64;
    x / j + (j - 1.0) / 2.0 * -t.ln()
}

/// Result of [`lemma2_identities`]: the rescaled ratio ρ′ and the four
/// consistency checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Report {
    /// `ρ′ = ρ/[1 − α_{j+1}(ρ)]`: the ratio seen after the first salvo
    /// removes a `α_{j+1}` fraction of the stock.
    pub rho_prime: f64,
    /// `ρ < α_{j+1}(ρ)`: the first salvo exceeds the log-time scale.
    pub salvo_dominates: bool,
    /// `ρ′ ∈ I_j`: after one salvo the point sits one regime down.
    pub rho_prime_in_next_region: bool,
    /// `β_j(ρ′) = [1/α_{j+1}(ρ) − 1]^{−1}` to within [`IDENTITY_TOL`].
    pub beta_consistent: bool,
    /// `α_{j+1}(ρ) + ρ = β_{j+1}(ρ)` to within [`IDENTITY_TOL`].
    pub alpha_beta_offset: bool,
}

impl Lemma2Report {
    /// True when all four consistency checks pass.
    pub fn all_hold(&self) -> bool {
        self.salvo_dominates
            && self.rho_prime_in_next_region
            && self.beta_consistent
            && self.alpha_beta_offset
    }
}

/// Verifies the identities connecting regime `j+1` to regime `j`.
///
/// For `ρ ∈ I_{j+1}` the first of `j+1` salvos leaves the stock at
/// `(1 − α_{j+1}(ρ))·x`, rescaling the ratio to ρ′; the four checks
/// confirm the α/β formulas cohere under that rescaling.
///
/// # Panics
///
/// Panics if `ρ ∉ I_{j+1}`.
pub fn lemma2_identities(j: u32, rho: f64) -> Lemma2Report {
    let region = region_of_rho(rho);
    assert!(
        region.j == j + 1,
        "rho = {rho} lies in I_{}, not I_{}",
        region.j,
        j + 1
    );
    let a_next = alpha(j + 1, rho);
    let rho_prime = rho / (1.0 - a_next);
    // When ρ sits at an endpoint of I_{j+1}, ρ′ lands exactly on an
    // endpoint of I_j in real arithmetic — and an ulp to either side in
    // floating point. Membership therefore carries the identity slack.
    let lower = interval_lower(j) * (1.0 - IDENTITY_TOL);
    let upper = if j == 1 {
        f64::INFINITY
    } else {
        interval_lower(j - 1) * (1.0 + IDENTITY_TOL)
    };
    // Near the upper endpoint of I_{j+1}, α_{j+1} → 1 and ρ′ → ∞, so both
    // sides of the β identity grow without bound; compare relative to their
    // magnitude rather than with a fixed absolute tolerance.
    let beta_rhs = (a_next.recip() - 1.0).recip();
    let beta_scale = beta_rhs.abs().max(1.0);
    Lemma2Report {
        rho_prime,
        salvo_dominates: rho < a_next,
        rho_prime_in_next_region: rho_prime >= lower && rho_prime < upper,
        beta_consistent: (beta(j, rho_prime) - beta_rhs).abs() <= IDENTITY_TOL * beta_scale,
        alpha_beta_offset: (a_next + rho - beta(j + 1, rho)).abs() <= IDENTITY_TOL,
    }
}

/// Asymptotic difference `K(x2,t) − K(x1,t)` of the small-`t`
/// approximation, allowing the two points to sit in different regimes.
///
/// Within a shared regime `j` this reduces to `(x2 − x1)/j ≥ 0`.
///
/// # Panics
///
/// Panics unless `x1 ≤ x2` and both points are in the domain of
/// [`asymptotic_K`].
pub fn monotone_limit_gap(x1: f64, x2: f64, t: f64) -> f64 {
    assert!(
        x1 <= x2,
        "x1 must not exceed x2, got x1 = {x1}, x2 = {x2}"
    );
    asymptotic_K(x2, t) - asymptotic_K(x1, t)
}
