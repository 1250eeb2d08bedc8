//! Error type shared by all modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by construction, evaluation, and solver entry points.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Grid construction rejected (too few nodes or empty horizon).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Boundary data inconsistent with the manifold (dimension, unit norm,
    /// tangency, horizon).
    #[error("invalid boundary data: {0}")]
    InvalidBoundary(String),

    /// Manifold parameters violate their invariants (e.g. torus c <= a).
    #[error("invalid manifold: {0}")]
    InvalidManifold(String),

    /// A curve/vector dimension does not match the manifold or grid.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operation received an argument outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The closed-form oracle's 2x2 system is numerically singular
    /// (tau * T^2 too small); callers should use the cubic-polynomial limit.
    #[error("oracle system singular: |Delta| = {delta_abs:e} below threshold (tau_T -> 0); use the cubic-polynomial limit")]
    OracleSingular { delta_abs: f64 },

    /// An NLP solve did not produce a usable point.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// ODE integration produced a non-finite state.
    #[error("non-finite state at integration step {step}")]
    NonFiniteState { step: usize },

    /// Residual evaluation needs more nodes than the curve has.
    #[error("too few nodes: need at least {needed}, got {got}")]
    TooFewNodes { needed: usize, got: usize },

    /// Essential-interval arithmetic hit a non-positive denominator.
    #[error("degenerate scalarization data: {0}")]
    DegenerateScalarization(String),

    /// Analysis input rejected (non-uniform spacing, too few samples, ...).
    #[error("invalid analysis input: {0}")]
    InvalidAnalysisInput(String),
}
