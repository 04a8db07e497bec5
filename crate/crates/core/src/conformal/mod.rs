//! Metric kernel: conformal scaling, inner and extended angles, curvature,
//! cotangent weights, the weighted graph Laplacian and related margins.

mod angles;
mod fields;
mod io;

use std::ops::{Deref, DerefMut, Index};

use thiserror::Error;

use crate::mesh::{EdgeId, FaceId, Triangulation};
use crate::scalar::Real;

pub use angles::{
    angle_jacobian, cotangents, delta_of_epsilon, extended_angles, in_domain, inner_angles,
    within_domain,
};
pub use fields::{
    conformal_scale, cot_weights, curvature, curvature_from_angles, delaunay_margin,
    dirichlet_energy, extended_curvature, face_angles, laplacian, margins_from_angles,
    nondegeneracy_margin,
};
pub use io::{parse_vertex_values, write_vertex_values};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("lengths ({l1}, {l2}, {l3}) violate a strict triangle inequality")]
    OutsideDomain { l1: f64, l2: f64, l3: f64 },
    #[error("edge lengths must be finite and positive, got {0}")]
    NonPositiveLength(f64),
    #[error(
        "face {face} is degenerate under this metric; use extended_curvature for pseudo metrics"
    )]
    PseudoMetric { face: FaceId },
    #[error("face {face} is degenerate; cotangents of extended angles are undefined")]
    DegenerateFace { face: FaceId },
    #[error("conformal scaling of edge {edge} left the representable range")]
    Overflow { edge: EdgeId },
    #[error("epsilon must lie in (0, pi/3], got {0}")]
    EpsilonOutOfRange(f64),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("conformal factor must be finite (vertex {vertex})")]
    NonFiniteFactor { vertex: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Positive edge lengths on a triangulation, plus a per-face flag recording
/// membership in the strict triangle-inequality cone.
#[derive(Debug, Clone, PartialEq)]
pub struct PlMetric<T> {
    lengths: Vec<T>,
    admissible: Vec<bool>,
}

impl<T: Real> PlMetric<T> {
    pub fn new(mesh: &Triangulation, lengths: Vec<T>) -> Result<Self, GeometryError> {
        if lengths.len() != mesh.num_edges() {
            return Err(GeometryError::LengthMismatch {
                expected: mesh.num_edges(),
                got: lengths.len(),
            });
        }
        if let Some(&bad) = lengths.iter().find(|l| !(l.is_finite() && **l > T::zero())) {
            return Err(GeometryError::NonPositiveLength(bad.to_f64_lossy()));
        }
        Ok(Self::from_checked(mesh, lengths))
    }

    /// Trusts that every length is finite and positive.
    pub(crate) fn from_checked(mesh: &Triangulation, lengths: Vec<T>) -> Self {
        let admissible = (0..mesh.num_faces())
            .map(|f| {
                let [a, b, c] = mesh.face_edges(f);
                in_domain([lengths[a], lengths[b], lengths[c]])
            })
            .collect();
        PlMetric {
            lengths,
            admissible,
        }
    }

    /// Constant metric; `uniform(mesh, 1)` is the regular metric on a lattice disk.
    pub fn uniform(mesh: &Triangulation, value: T) -> Result<Self, GeometryError> {
        Self::new(mesh, vec![value; mesh.num_edges()])
    }

    pub fn lengths(&self) -> &[T] {
        &self.lengths
    }

    pub fn length(&self, e: EdgeId) -> T {
        self.lengths[e]
    }

    /// Lengths of the edges opposite each vertex of `f`.
    pub fn face_lengths(&self, mesh: &Triangulation, f: FaceId) -> [T; 3] {
        let [a, b, c] = mesh.face_edges(f);
        [self.lengths[a], self.lengths[b], self.lengths[c]]
    }

    pub fn is_admissible(&self, f: FaceId) -> bool {
        self.admissible[f]
    }

    /// True when every face satisfies the strict triangle inequalities.
    pub fn is_pl(&self) -> bool {
        self.admissible.iter().all(|&a| a)
    }

    pub fn pseudo_faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.admissible
            .iter()
            .enumerate()
            .filter(|(_, &a)| !a)
            .map(|(f, _)| f)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.lengths.iter().map(|l| l.to_f64_lossy()).collect()
    }
}

/// Per-vertex logarithmic scale factor `u`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConformalFactor<T>(pub Vec<T>);

impl<T: Real> ConformalFactor<T> {
    pub fn zeros(n: usize) -> Self {
        ConformalFactor(vec![T::zero(); n])
    }

    pub fn sup_norm(&self) -> T {
        self.0.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn l2_norm(&self) -> T {
        self.0.iter().map(|&x| x * x).sum::<T>().sqrt()
    }
}

impl<T> Deref for ConformalFactor<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for ConformalFactor<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T> From<Vec<T>> for ConformalFactor<T> {
    fn from(v: Vec<T>) -> Self {
        ConformalFactor(v)
    }
}

/// Angles of one face, indexed like the face's vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleTriple<T>(pub [T; 3]);

impl<T: Real> AngleTriple<T> {
    pub fn sum(&self) -> T {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn min(&self) -> T {
        self.0[0].min(self.0[1]).min(self.0[2])
    }
}

impl<T> Index<usize> for AngleTriple<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Per-edge weights. Cotangent weights go negative on non-Delaunay edges;
/// callers inspect [`EdgeWeightField::min`] when the sign matters.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeightField<T> {
    pub weights: Vec<T>,
}

impl<T: Real> EdgeWeightField<T> {
    pub fn constant(mesh: &Triangulation, c: T) -> Self {
        EdgeWeightField {
            weights: vec![c; mesh.num_edges()],
        }
    }

    pub fn min(&self) -> T {
        self.weights.iter().fold(T::infinity(), |m, &w| m.min(w))
    }

    pub fn max(&self) -> T {
        self.weights
            .iter()
            .fold(T::neg_infinity(), |m, &w| m.max(w))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|&w| w >= T::zero())
    }
}

/// Angle defect `2π - Σθ` at every vertex.
///
/// Boundary vertices use the same formula but are flagged; pinned flows never
/// evolve them and their value is only reported.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField<T> {
    pub values: Vec<T>,
    pub boundary: Vec<bool>,
}

impl<T: Real> CurvatureField<T> {
    pub fn total(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// Largest `|K|` over vertices not flagged boundary.
    pub fn sup_interior(&self) -> T {
        self.values
            .iter()
            .zip(&self.boundary)
            .filter(|(_, &b)| !b)
            .fold(T::zero(), |m, (k, _)| m.max(k.abs()))
    }
}
