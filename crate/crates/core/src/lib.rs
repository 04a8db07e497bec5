//! Combinatorial Yamabe flow on triangulated surfaces with piecewise-linear
//! metrics.
//!
//! * [`mesh`] — triangulations, the hexagonal lattice disk, exhaustions, mesh files.
//! * [`conformal`] — conformal scaling, inner/extended angles, curvature,
//!   cotangent weights, Laplacians, margins and energies.
//! * [`flow`] — standard, extended and lattice (semilinear) flows, RK4
//!   integration, existence-time and interpolation-weight estimates.
//! * [`analysis`] — reproducible verification checks and experiments.
//!
//! The numerical core is generic over [`Real`] (implemented for `f32` and
//! `f64`); the `*F64` aliases below fix the scalar to `f64`, which is what the
//! analysis module and the command-line tool use.

// Indexed loops mirror the per-vertex/per-edge formulas; `!(x >= 0)` rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod conformal;
pub mod flow;
pub mod mesh;
pub mod scalar;

pub use conformal::GeometryError;
pub use flow::{FlowError, Variant};
pub use mesh::{MeshError, Triangulation, VertexId};
pub use scalar::Real;

pub type PlMetricF64 = conformal::PlMetric<f64>;
pub type ConformalFactorF64 = conformal::ConformalFactor<f64>;
pub type AngleTripleF64 = conformal::AngleTriple<f64>;
pub type EdgeWeightFieldF64 = conformal::EdgeWeightField<f64>;
pub type CurvatureFieldF64 = conformal::CurvatureField<f64>;
pub type FlowProblemF64 = flow::FlowProblem<f64>;
pub type FlowStateF64 = flow::FlowState<f64>;
pub type FlowRunF64 = flow::FlowRun<f64>;
pub type TimeSeriesF64 = flow::TimeSeries<f64>;
