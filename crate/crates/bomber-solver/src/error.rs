use thiserror::Error;

/// Errors reported by solver configuration, queries, and serialization.
#[derive(Debug, Error)]
pub enum SolverError {
    /// Grid parameters violate a structural requirement.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The time step exceeds the explicit-scheme stability guard.
    #[error("time step {dt} exceeds the stability guard {guard}")]
    UnstableTimeStep { dt: f64, guard: f64 },

    /// A discrete-unit step that is not a positive finite real.
    #[error("discrete ammunition step must be positive and finite, got {0}")]
    InvalidStep(f64),

    /// An allocation outside the feasible interval `[0, x]`.
    #[error("allocation {k} lies outside [0, {x}]")]
    AllocationOutOfRange { k: f64, x: f64 },

    /// A field query outside the solved domain.
    #[error("query point ({x}, {t}) lies outside [0, {x_max}] × [0, {t_max}]")]
    OutOfDomain {
        x: f64,
        t: f64,
        x_max: f64,
        t_max: f64,
    },

    /// Underlying I/O failure while reading or writing a container.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A serialized container that does not parse back into a field.
    #[error("malformed field container: {0}")]
    MalformedContainer(String),
}
