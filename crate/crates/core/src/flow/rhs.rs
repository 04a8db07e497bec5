use super::{check_faces, FlowError, FlowProblem, Variant};
use crate::conformal::{conformal_scale, curvature_from_angles, face_angles};
use crate::scalar::{clamped_acos, Real};

/// Constant lattice weight `c = √3/3 = cot(π/3)`.
pub const HEX_WEIGHT: f64 = 0.577_350_269_189_625_8;

/// Derivative of the flow at `u` for the problem's variant; zero at pinned vertices.
pub fn rhs<T: Real>(p: &FlowProblem<T>, u: &[T], t: f64) -> Result<Vec<T>, FlowError> {
    match p.variant() {
        Variant::Standard => rhs_standard(p, u, t),
        Variant::Extended => rhs_extended(p, u),
        Variant::SemilinearHex => semilinear_rhs(p, u),
    }
}

fn negated_defects<T: Real>(
    p: &FlowProblem<T>,
    u: &[T],
    extended: bool,
    t: f64,
) -> Result<Vec<T>, FlowError> {
    let mesh = p.mesh();
    let l = conformal_scale(mesh, p.base_metric(), u)?;
    if !extended {
        check_faces(mesh, &l, t)?;
    }
    let angles = face_angles(mesh, &l, extended)?;
    let k = curvature_from_angles(mesh, &angles);
    Ok(k.values
        .into_iter()
        .enumerate()
        .map(|(v, kv)| if p.is_pinned(v) { T::zero() } else { -kv })
        .collect())
}

/// `du_i/dt = -K_i(u ∗ d)`. Fails with [`FlowError::Degenerated`] (stamped
/// with `t`) once any face leaves the triangle-inequality region.
pub fn rhs_standard<T: Real>(p: &FlowProblem<T>, u: &[T], t: f64) -> Result<Vec<T>, FlowError> {
    negated_defects(p, u, false, t)
}

/// `du_i/dt = -K̃_i(u ∗ d)`, defined for every positive metric.
pub fn rhs_extended<T: Real>(p: &FlowProblem<T>, u: &[T]) -> Result<Vec<T>, FlowError> {
    negated_defects(p, u, true, f64::NAN)
}

/// Angle at `i` of a lattice triangle `ijk` under `u ∗ d_reg`, as a function
/// of `x = u_j - u_i`, `y = u_k - u_i`:
/// `G(x, y) = arccos((eˣ + eʸ - e^{x+y}) / (2 e^{(x+y)/2}))`.
///
/// Returns `None` if the cosine leaves `[-1, 1]` beyond round-off.
pub fn g_angle<T: Real>(x: T, y: T) -> Option<T> {
    let num = x.exp() + y.exp() - (x + y).exp();
    let den = T::lit(2.0) * ((x + y) * T::lit(0.5)).exp();
    clamped_acos(num / den)
}

/// Second-order remainder `G(x, y) - π/3 - (√3/6)(x + y)`.
pub fn f_remainder<T: Real>(x: T, y: T) -> Option<T> {
    let slope = T::lit(3f64.sqrt() / 6.0);
    g_angle(x, y).map(|g| g - T::FRAC_PI_3() - slope * (x + y))
}

/// Lattice form `du_i/dt = Δ_c u_i + Σ_faces F̃(u_j - u_i, u_k - u_i)` with
/// `c = √3/3`, evaluated at every free vertex (all of degree 6 on a unit
/// metric); pinned vertices get zero.
pub fn semilinear_rhs<T: Real>(p: &FlowProblem<T>, u: &[T]) -> Result<Vec<T>, FlowError> {
    let mesh = p.mesh();
    let c = T::lit(HEX_WEIGHT);
    let mut out = vec![T::zero(); mesh.num_vertices()];
    for i in p.free_vertices() {
        if mesh.degree(i) != 6 || mesh.vertex_faces(i).len() != 6 {
            return Err(FlowError::NotHexagonal { vertex: i });
        }
        let lap = mesh
            .neighbors(i)
            .iter()
            .fold(T::zero(), |acc, &(j, _)| acc + c * (u[j] - u[i]));
        let mut rem = T::zero();
        for &f in mesh.vertex_faces(i) {
            let face = mesh.face(f);
            let mut others = face.iter().filter(|&&w| w != i);
            let (j, k) = (
                *others.next().expect("face has three vertices"),
                *others.next().expect("face has three vertices"),
            );
            rem = rem
                + f_remainder(u[j] - u[i], u[k] - u[i])
                    .ok_or(FlowError::ArccosDomain { vertex: i, face: f })?;
        }
        out[i] = lap + rem;
    }
    Ok(out)
}
