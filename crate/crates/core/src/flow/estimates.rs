use super::{FlowError, FlowProblem};
use crate::conformal::{
    conformal_scale, cot_weights, delta_of_epsilon, face_angles, margins_from_angles,
    within_domain, EdgeWeightField,
};
use crate::scalar::Real;

/// Short-time existence window `T₀ = δ(ε) / ((2 + M)π)`: starting from an
/// `ε`-nondegenerate metric on a mesh of maximum degree `M`, the flow's `u`
/// stays in the `δ(ε)` sup-norm ball on `[0, T₀)`.
pub fn existence_time_estimate<T: Real>(eps: T, max_degree: usize) -> Result<T, FlowError> {
    if max_degree < 3 {
        return Err(FlowError::ParameterRange(format!(
            "maximum degree {max_degree} < 3"
        )));
    }
    let delta = delta_of_epsilon(eps).map_err(|_| {
        FlowError::ParameterRange(format!("eps = {} outside (0, π/3]", eps.to_f64_lossy()))
    })?;
    let m = T::from_usize(max_degree).expect("degree fits the scalar type");
    Ok(delta / ((T::lit(2.0) + m) * T::PI()))
}

/// Time-averaged cotangent weights along the segment of conformal factors
/// between two solutions, plus diagnostics of the interpolated metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolatedWeights<T> {
    /// `ω_ij ≈ ∫₀¹ μ_ij(s u + (1 - s) û) ds`.
    pub weights: EdgeWeightField<T>,
    pub min: T,
    pub max: T,
    /// Smallest Delaunay margin over the quadrature nodes (`+∞` without interior edges).
    pub min_delaunay_margin: T,
}

/// Composite midpoint rule with `points` nodes `s = (k + ½)/points` for
/// `ω_ij = ∫₀¹ μ_ij(s u + (1 - s) û) ds`.
pub fn interpolation_weights<T: Real>(
    p: &FlowProblem<T>,
    u: &[T],
    u_hat: &[T],
    points: usize,
) -> Result<InterpolatedWeights<T>, FlowError> {
    let mesh = p.mesh();
    let n = mesh.num_vertices();
    if points == 0 {
        return Err(FlowError::ParameterRange(
            "quadrature needs at least one point".into(),
        ));
    }
    if u.len() != n || u_hat.len() != n {
        return Err(FlowError::InvalidProblem(format!(
            "conformal factors must have {n} values"
        )));
    }
    let count = T::from_usize(points).expect("point count fits the scalar type");
    let mut acc = vec![T::zero(); mesh.num_edges()];
    let mut min_del = T::infinity();
    for k in 0..points {
        let s = (T::from_usize(k).expect("index fits") + T::lit(0.5)) / count;
        let w: Vec<T> = u
            .iter()
            .zip(u_hat)
            .map(|(&a, &b)| s * a + (T::one() - s) * b)
            .collect();
        let l = conformal_scale(mesh, p.base_metric(), &w)?;
        let degenerate = |face| FlowError::InterpolationDegenerate {
            s: s.to_f64_lossy(),
            face,
        };
        if let Some(face) =
            (0..mesh.num_faces()).find(|&f| !within_domain(l.face_lengths(mesh, f), T::DOMAIN_TOL))
        {
            return Err(degenerate(face));
        }
        let angles = face_angles(mesh, &l, false)?;
        min_del = min_del.min(margins_from_angles(mesh, &angles).1);
        let mu = cot_weights(mesh, &l).map_err(|e| match e {
            crate::conformal::GeometryError::DegenerateFace { face } => degenerate(face),
            other => other.into(),
        })?;
        for (a, m) in acc.iter_mut().zip(&mu.weights) {
            *a = *a + *m;
        }
    }
    let weights = EdgeWeightField {
        weights: acc.into_iter().map(|x| x / count).collect(),
    };
    Ok(InterpolatedWeights {
        min: weights.min(),
        max: weights.max(),
        weights,
        min_delaunay_margin: min_del,
    })
}
