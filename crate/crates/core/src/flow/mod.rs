//! Combinatorial Yamabe flow `du/dt = -K(u ∗ d)`: problems, right-hand
//! sides, fixed-step integration and the analytic estimates that accompany it.

mod estimates;
mod init;
mod integrate;
mod rhs;
mod series;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::conformal::{
    conformal_scale, cot_weights, curvature_from_angles, face_angles, margins_from_angles,
    within_domain, CurvatureField, EdgeWeightField, GeometryError, PlMetric,
};
use crate::mesh::{FaceId, Triangulation};
use crate::scalar::Real;

pub use estimates::{existence_time_estimate, interpolation_weights, InterpolatedWeights};
pub use init::random_factor;
pub use integrate::{integrate, rk4_step, step, FlowRun, Schedule, Termination};
pub use rhs::{f_remainder, g_angle, rhs, rhs_extended, rhs_standard, semilinear_rhs, HEX_WEIGHT};
pub use series::{TimeSeries, TraceRow, SERIES_HEADER, TRACE_HEADER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("face {face} left the triangle-inequality region at t = {t}")]
    Degenerated { face: FaceId, t: f64 },
    #[error("initial metric is not a PL metric: face {face} violates a triangle inequality")]
    InitialNotPl { face: FaceId },
    #[error("step size {h} underflows at t = {t}")]
    StepUnderflow { h: f64, t: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid flow problem: {0}")]
    InvalidProblem(String),
    #[error("vertex {vertex} is not a regular lattice vertex (degree 6, unit metric)")]
    NotHexagonal { vertex: usize },
    #[error("arccos argument out of range at vertex {vertex}, face {face}")]
    ArccosDomain { vertex: usize, face: FaceId },
    #[error("interpolated metric degenerates at s = {s} on face {face}")]
    InterpolationDegenerate { s: f64, face: FaceId },
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
}

/// Which right-hand side drives the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `du/dt = -K`; requires every face to stay non-degenerate.
    Standard,
    /// `du/dt = -K̃` with extended angles; total on positive lengths.
    Extended,
    /// Lattice form `du/dt = Δ_c u + F(Du)` on a unit-metric hexagonal truncation.
    SemilinearHex,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Standard => "standard",
            Variant::Extended => "extended",
            Variant::SemilinearHex => "semilinear",
        })
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(Variant::Standard),
            "extended" => Ok(Variant::Extended),
            "semilinear" | "semilinear_hex" => Ok(Variant::SemilinearHex),
            other => Err(format!(
                "unknown variant `{other}` (expected standard, extended or semilinear)"
            )),
        }
    }
}

/// A flow on a fixed mesh and background metric `d`, with pinned vertices
/// held at their initial values.
#[derive(Debug, Clone)]
pub struct FlowProblem<T> {
    mesh: Triangulation,
    base: PlMetric<T>,
    initial: Vec<T>,
    variant: Variant,
    pinned: Vec<bool>,
}

impl<T: Real> FlowProblem<T> {
    /// `initial` defaults to zero; `pinned` lists vertex ids.
    pub fn new(
        mesh: Triangulation,
        base: PlMetric<T>,
        variant: Variant,
        initial: Option<Vec<T>>,
        pinned: &[usize],
    ) -> Result<Self, FlowError> {
        let n = mesh.num_vertices();
        let initial = initial.unwrap_or_else(|| vec![T::zero(); n]);
        if initial.len() != n {
            return Err(FlowError::InvalidProblem(format!(
                "initial factor has {} values, mesh has {n}",
                initial.len()
            )));
        }
        if base.lengths().len() != mesh.num_edges() {
            return Err(FlowError::InvalidProblem(
                "metric does not match mesh".into(),
            ));
        }
        let mut mask = vec![false; n];
        for &v in pinned {
            if v >= n {
                return Err(FlowError::InvalidProblem(format!(
                    "pinned vertex {v} not in mesh"
                )));
            }
            mask[v] = true;
        }
        let scaled = conformal_scale(&mesh, &base, &initial)?;
        match variant {
            Variant::Standard => {
                if let Some(face) = scaled.pseudo_faces().next() {
                    return Err(FlowError::InitialNotPl { face });
                }
            }
            Variant::Extended => {}
            Variant::SemilinearHex => {
                if let Some(face) = scaled.pseudo_faces().next() {
                    return Err(FlowError::InitialNotPl { face });
                }
                check_hexagonal(&mesh, &base, &mask)?;
            }
        }
        Ok(FlowProblem {
            mesh,
            base,
            initial,
            variant,
            pinned: mask,
        })
    }

    /// Pins exactly the mesh's boundary vertices.
    pub fn pinned_boundary(
        mesh: Triangulation,
        base: PlMetric<T>,
        variant: Variant,
        initial: Option<Vec<T>>,
    ) -> Result<Self, FlowError> {
        let boundary = mesh.boundary_vertices();
        Self::new(mesh, base, variant, initial, &boundary)
    }

    pub fn mesh(&self) -> &Triangulation {
        &self.mesh
    }

    pub fn base_metric(&self) -> &PlMetric<T> {
        &self.base
    }

    pub fn initial(&self) -> &[T] {
        &self.initial
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn is_pinned(&self, v: usize) -> bool {
        self.pinned[v]
    }

    pub fn pinned_mask(&self) -> &[bool] {
        &self.pinned
    }

    pub fn free_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.mesh.num_vertices()).filter(|&v| !self.pinned[v])
    }

    /// Same problem driven by a different right-hand side.
    pub fn with_variant(&self, variant: Variant) -> Result<Self, FlowError> {
        let pinned: Vec<usize> = (0..self.pinned.len()).filter(|&v| self.pinned[v]).collect();
        Self::new(
            self.mesh.clone(),
            self.base.clone(),
            variant,
            Some(self.initial.clone()),
            &pinned,
        )
    }

    pub fn initial_state(&self) -> Result<FlowState<T>, FlowError> {
        FlowState::new(self, 0.0, self.initial.clone())
    }
}

fn check_hexagonal<T: Real>(
    mesh: &Triangulation,
    base: &PlMetric<T>,
    pinned: &[bool],
) -> Result<(), FlowError> {
    for v in 0..mesh.num_vertices() {
        if pinned[v] {
            continue;
        }
        let regular = mesh.degree(v) == 6
            && mesh.vertex_faces(v).len() == 6
            && mesh
                .neighbors(v)
                .iter()
                .all(|&(_, e)| base.length(e) == T::one());
        if !regular {
            return Err(FlowError::NotHexagonal { vertex: v });
        }
    }
    Ok(())
}

/// Flow state at time `t` with derived quantities cached for `u`.
#[derive(Debug, Clone)]
pub struct FlowState<T> {
    pub t: f64,
    pub u: Vec<T>,
    /// `u ∗ d`.
    pub metric: PlMetric<T>,
    /// Extended angles per face (equal to the inner angles on PL metrics).
    pub angles: Vec<[T; 3]>,
    pub curvature: CurvatureField<T>,
    /// Cotangent weights, present whenever the metric is PL.
    pub weights: Option<EdgeWeightField<T>>,
}

impl<T: Real> FlowState<T> {
    pub fn new(p: &FlowProblem<T>, t: f64, u: Vec<T>) -> Result<Self, FlowError> {
        let mesh = p.mesh();
        let metric = conformal_scale(mesh, p.base_metric(), &u)?;
        if p.variant() != Variant::Extended {
            check_faces(mesh, &metric, t)?;
        }
        let angles = face_angles(mesh, &metric, true)?;
        let curvature = curvature_from_angles(mesh, &angles);
        let weights = if metric.is_pl() {
            cot_weights(mesh, &metric).ok()
        } else {
            None
        };
        Ok(FlowState {
            t,
            u,
            metric,
            angles,
            curvature,
            weights,
        })
    }

    /// `sup |K|` over vertices the flow evolves.
    pub fn sup_free_curvature(&self, p: &FlowProblem<T>) -> T {
        p.free_vertices()
            .fold(T::zero(), |m, v| m.max(self.curvature.values[v].abs()))
    }

    /// `(nondegeneracy, Delaunay)` margins from the cached extended angles.
    pub fn margins(&self, mesh: &Triangulation) -> (T, T) {
        margins_from_angles(mesh, &self.angles)
    }
}

/// Strict triangle inequalities with the flow's degeneration tolerance.
pub(crate) fn check_faces<T: Real>(
    mesh: &Triangulation,
    l: &PlMetric<T>,
    t: f64,
) -> Result<(), FlowError> {
    for f in 0..mesh.num_faces() {
        if !within_domain(l.face_lengths(mesh, f), T::DOMAIN_TOL) {
            return Err(FlowError::Degenerated { face: f, t });
        }
    }
    Ok(())
}
