//! Solver library for bi-objective variational curve problems: minimizing
//! velocity energy `F1 = ∫‖ẋ‖²` against covariant-acceleration energy
//! `F2 = ∫‖∇_t ẋ‖²` over curves with fixed endpoint positions and velocities
//! on Euclidean space, the unit sphere, or a torus.
//!
//! The pipeline is: [`transcription`] turns a curve problem into a sparse
//! nonlinear program on nodal states, [`nlp`] solves it with an augmented
//! Lagrangian / L-BFGS method, and [`scalarize`] drives weight sweeps
//! (Chebyshev and weighted-sum) producing Pareto fronts. [`euclid_oracle`]
//! carries the closed-form Euclidean solution used for validation,
//! [`torus_el`] the Euler–Lagrange machinery on the torus, and [`analysis`]
//! the post-processing diagnostics.
//!
//! All numerics are generic over the scalar type through [`Real`]; the
//! crate root re-exports `f64` aliases for the common concrete types.

pub mod analysis;
pub mod error;
pub mod euclid_oracle;
pub mod geometry;
pub mod la;
pub mod nlp;
pub mod real;
pub mod scalarize;
pub mod torus_el;
pub mod transcription;

pub use error::{Error, Result};
pub use real::Real;

/// `f64` manifold description.
pub type Manifold = geometry::ManifoldModel<f64>;
/// `f64` boundary data.
pub type Boundary = transcription::BoundaryData<f64>;
/// `f64` uniform grid.
pub type GridF = transcription::Grid<f64>;
/// `f64` discretized curve.
pub type Curve = transcription::DiscretizedCurve<f64>;
/// `f64` objective pair.
pub type Objectives = transcription::ObjectivePair<f64>;
/// `f64` transcription bundle.
pub type Problem = transcription::Transcription<f64>;
/// `f64` Pareto front.
pub type Front = scalarize::ParetoFront<f64>;
/// `f64` front point.
pub type Point = scalarize::FrontPoint<f64>;
