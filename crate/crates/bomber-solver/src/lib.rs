//! Time-marching solver for the bomber survival field.
//!
//! The survival probability `P(x,t)` of a bomber holding ammunition `x`
//! with time `t` remaining satisfies the differential equation
//!
//! ```text
//! ∂P/∂t = H(x,t) − P(x,t),          P(x,0) = 1,
//! H(x,t) = max_{k ∈ [0,x]} a(k) · P(x−k, t),
//! ```
//!
//! where `a(k) = 1 − v·e^{−k}` is the single-encounter survival
//! probability and `K(x,t)` denotes the maximizer. This crate discretizes
//! `(x,t)` on a uniform [`Grid`], marches the classic fourth-order
//! Runge–Kutta scheme in `t`, and re-solves the inner maximization at
//! every stage of every step.
//!
//! # Complement form
//!
//! For small `t` both `P` and `H` approach 1 and their logarithms lose
//! precision, so the solver integrates the complements `Q = 1 − P` and
//! `G = 1 − H` instead:
//!
//! ```text
//! ∂Q/∂t = G − Q,                    Q(x,0) = 0,
//! G(x,t) = min_{k ∈ [0,x]} [ v·e^{−k} + a(k)·Q(x−k, t) ],
//! ```
//!
//! using the exact identity `1 − a(k)(1 − q) = v·e^{−k} + a(k)·q`. No
//! subtraction of nearly-equal quantities occurs anywhere in the march,
//! and quantities such as `log(1 − P)` come straight from stored data.
//!
//! # Modules
//!
//! * [`grid`] — the uniform discretization and its stability guard.
//! * [`optimize`] — the inner maximization: full node scan, largest-k
//!   tie rule, optional golden-section refinement, discrete-unit mode.
//! * [`solve`] — the RK4 march producing a [`SolutionField`].
//! * [`field`] — field storage, accessors, interpolation queries.
//! * [`io`] — binary / JSON / CSV serialization of solved fields.
//!
//! Configuration and domain errors are reported through [`SolverError`];
//! violations of documented function preconditions panic.

pub mod field;
pub mod grid;
pub mod io;
pub mod optimize;
pub mod solve;

mod error;

pub use error::SolverError;
pub use field::{FieldKind, PolicySample, SolutionField, SolveMode};
pub use grid::Grid;
pub use optimize::{conditional_value, optimize_allocation, AllocationChoice};
pub use solve::{solve, solve_with_options};

/// Version string stamped into serialized field headers.
pub const SOLVER_VERSION: &str = env!("CARGO_PKG_VERSION");
