use rayon::prelude::*;

use super::angles::{cotangents, extended_angles, inner_angles};
use super::{CurvatureField, EdgeWeightField, GeometryError, PlMetric};
use crate::mesh::Triangulation;
use crate::scalar::Real;

/// Face counts above which per-face kernels fan out over the rayon pool.
/// Per-face results are independent, so the output does not depend on the
/// worker count.
const PAR_FACES: usize = 4096;

/// `l̃_ij = exp((u_i + u_j)/2) · d_ij` on every edge.
pub fn conformal_scale<T: Real>(
    mesh: &Triangulation,
    d: &PlMetric<T>,
    u: &[T],
) -> Result<PlMetric<T>, GeometryError> {
    if u.len() != mesh.num_vertices() {
        return Err(GeometryError::LengthMismatch {
            expected: mesh.num_vertices(),
            got: u.len(),
        });
    }
    if let Some(v) = u.iter().position(|x| !x.is_finite()) {
        return Err(GeometryError::NonFiniteFactor { vertex: v });
    }
    let half = T::lit(0.5);
    let mut lengths = Vec::with_capacity(mesh.num_edges());
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let l = ((u[a] + u[b]) * half).exp() * d.length(e);
        if !(l.is_finite() && l > T::zero()) {
            return Err(GeometryError::Overflow { edge: e });
        }
        lengths.push(l);
    }
    Ok(PlMetric::from_checked(mesh, lengths))
}

/// Angles of every face, ordered like the face's vertices.
///
/// With `extended` unset, a face outside the triangle-inequality cone is an
/// error; with it set, such faces get the degenerate `(π, 0, 0)` assignment.
pub fn face_angles<T: Real>(
    mesh: &Triangulation,
    l: &PlMetric<T>,
    extended: bool,
) -> Result<Vec<[T; 3]>, GeometryError> {
    let one = |f: usize| -> Result<[T; 3], GeometryError> {
        let lens = l.face_lengths(mesh, f);
        if extended {
            extended_angles(lens).map(|t| t.0)
        } else {
            inner_angles(lens)
                .map(|t| t.0)
                .map_err(|_| GeometryError::PseudoMetric { face: f })
        }
    };
    if mesh.num_faces() >= PAR_FACES {
        (0..mesh.num_faces()).into_par_iter().map(one).collect()
    } else {
        (0..mesh.num_faces()).map(one).collect()
    }
}

fn defects<T: Real>(mesh: &Triangulation, angles: &[[T; 3]]) -> CurvatureField<T> {
    let two_pi = T::lit(2.0) * T::PI();
    let values = (0..mesh.num_vertices())
        .map(|v| {
            let mut sum = T::zero();
            for &f in mesh.vertex_faces(v) {
                let c = mesh.corner_of(f, v).expect("incident face contains vertex");
                sum = sum + angles[f][c];
            }
            two_pi - sum
        })
        .collect();
    let boundary = (0..mesh.num_vertices())
        .map(|v| mesh.is_boundary_vertex(v))
        .collect();
    CurvatureField { values, boundary }
}

/// `K_i = 2π - Σ θ_i` over faces at `i`; fails on pseudo metrics.
pub fn curvature<T: Real>(
    mesh: &Triangulation,
    l: &PlMetric<T>,
) -> Result<CurvatureField<T>, GeometryError> {
    Ok(defects(mesh, &face_angles(mesh, l, false)?))
}

/// Curvature from extended angles; total on any positive lengths.
pub fn extended_curvature<T: Real>(
    mesh: &Triangulation,
    l: &PlMetric<T>,
) -> Result<CurvatureField<T>, GeometryError> {
    Ok(defects(mesh, &face_angles(mesh, l, true)?))
}

/// Angle defects from precomputed per-face angles.
pub fn curvature_from_angles<T: Real>(
    mesh: &Triangulation,
    angles: &[[T; 3]],
) -> CurvatureField<T> {
    defects(mesh, angles)
}

/// `μ_ij = ½ Σ cot θ` over the angles opposite `ij`: two terms on interior
/// edges, one on boundary edges.
pub fn cot_weights<T: Real>(
    mesh: &Triangulation,
    l: &PlMetric<T>,
) -> Result<EdgeWeightField<T>, GeometryError> {
    let mut weights = vec![T::zero(); mesh.num_edges()];
    let half = T::lit(0.5);
    for f in 0..mesh.num_faces() {
        let cot = cotangents(l.face_lengths(mesh, f))
            .map_err(|_| GeometryError::DegenerateFace { face: f })?;
        for (a, &e) in mesh.face_edges(f).iter().enumerate() {
            weights[e] = weights[e] + half * cot[a];
        }
    }
    Ok(EdgeWeightField { weights })
}

/// `Δ_ω f_i = Σ_j ω_ij (f_j - f_i)`, summed in ascending neighbor order.
pub fn laplacian<T: Real>(
    mesh: &Triangulation,
    w: &EdgeWeightField<T>,
    f: &[T],
) -> Result<Vec<T>, GeometryError> {
    if w.weights.len() != mesh.num_edges() {
        return Err(GeometryError::LengthMismatch {
            expected: mesh.num_edges(),
            got: w.weights.len(),
        });
    }
    if f.len() != mesh.num_vertices() {
        return Err(GeometryError::LengthMismatch {
            expected: mesh.num_vertices(),
            got: f.len(),
        });
    }
    Ok((0..mesh.num_vertices())
        .map(|i| {
            mesh.neighbors(i)
                .iter()
                .fold(T::zero(), |acc, &(j, e)| acc + w.weights[e] * (f[j] - f[i]))
        })
        .collect())
}

/// `(min corner angle, min over interior edges of π - (θ_k1 + θ_k2))`.
///
/// Either margin is `+∞` when there is nothing to minimize over.
pub fn margins_from_angles<T: Real>(mesh: &Triangulation, angles: &[[T; 3]]) -> (T, T) {
    let ndg = angles
        .iter()
        .flatten()
        .fold(T::infinity(), |m, &a| m.min(a));
    let mut del = T::infinity();
    for e in 0..mesh.num_edges() {
        let faces = mesh.edge_faces(e);
        if faces.len() != 2 {
            continue;
        }
        let opposite = |f: usize| {
            let slot = mesh
                .face_edges(f)
                .iter()
                .position(|&x| x == e)
                .expect("edge on face");
            angles[f][slot]
        };
        del = del.min(T::PI() - (opposite(faces[0]) + opposite(faces[1])));
    }
    (ndg, del)
}

/// Smallest inner angle over all faces.
pub fn nondegeneracy_margin<T: Real>(
    mesh: &Triangulation,
    l: &PlMetric<T>,
) -> Result<T, GeometryError> {
    let angles = face_angles(mesh, l, false).map_err(degenerate)?;
    Ok(margins_from_angles(mesh, &angles).0)
}

/// Smallest `π - (θ_k1 + θ_k2)` over interior edges.
pub fn delaunay_margin<T: Real>(mesh: &Triangulation, l: &PlMetric<T>) -> Result<T, GeometryError> {
    let angles = face_angles(mesh, l, false).map_err(degenerate)?;
    Ok(margins_from_angles(mesh, &angles).1)
}

fn degenerate(e: GeometryError) -> GeometryError {
    match e {
        GeometryError::PseudoMetric { face } => GeometryError::DegenerateFace { face },
        other => other,
    }
}

/// `E(u) = Σ_edges (u_i - u_j)²`.
pub fn dirichlet_energy<T: Real>(mesh: &Triangulation, u: &[T]) -> T {
    mesh.edges().iter().fold(T::zero(), |acc, &[a, b]| {
        let d = u[a] - u[b];
        acc + d * d
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_3, PI};

    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::mesh::{hexagonal_disk, tetrahedron};

    fn unit(mesh: &Triangulation) -> PlMetric<f64> {
        PlMetric::uniform(mesh, 1.0).unwrap()
    }

    #[test]
    fn identity_and_power_of_two_scaling() {
        let t = hexagonal_disk(2);
        let d = unit(&t);
        let same = conformal_scale(&t, &d, &vec![0.0; t.num_vertices()]).unwrap();
        assert_eq!(same, d);
        let u = vec![2.0 * 2f64.ln(); t.num_vertices()];
        let l = conformal_scale(&t, &d, &u).unwrap();
        for &x in l.lengths() {
            assert_abs_diff_eq!(x, 4.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn scaling_overflow_names_the_edge() {
        let t = hexagonal_disk(1);
        let d = unit(&t);
        let mut u = vec![0.0; 7];
        u[3] = 2000.0;
        assert!(matches!(
            conformal_scale(&t, &d, &u),
            Err(GeometryError::Overflow { .. })
        ));
        u[3] = f64::NAN;
        assert_eq!(
            conformal_scale(&t, &d, &u),
            Err(GeometryError::NonFiniteFactor { vertex: 3 })
        );
    }

    #[test]
    fn geometric_mean_along_segment() {
        let t = hexagonal_disk(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = PlMetric::new(
            &t,
            (0..t.num_edges())
                .map(|_| rng.gen_range(0.9..1.1))
                .collect(),
        )
        .unwrap();
        let u: Vec<f64> = (0..t.num_vertices())
            .map(|_| rng.gen_range(-0.5..0.5))
            .collect();
        let uh: Vec<f64> = (0..t.num_vertices())
            .map(|_| rng.gen_range(-0.5..0.5))
            .collect();
        let s = 0.37;
        let mix: Vec<f64> = u
            .iter()
            .zip(&uh)
            .map(|(a, b)| s * a + (1.0 - s) * b)
            .collect();
        let lhs = conformal_scale(&t, &d, &mix).unwrap();
        let l = conformal_scale(&t, &d, &u).unwrap();
        let lh = conformal_scale(&t, &d, &uh).unwrap();
        for e in 0..t.num_edges() {
            let rhs = l.length(e).powf(s) * lh.length(e).powf(1.0 - s);
            assert_abs_diff_eq!(lhs.length(e), rhs, epsilon = 1e-13);
        }
    }

    #[test]
    fn regular_lattice_is_flat_inside() {
        let t = hexagonal_disk(3);
        let k = curvature(&t, &unit(&t)).unwrap();
        for v in 0..t.num_vertices() {
            if !t.is_boundary_vertex(v) {
                assert_abs_diff_eq!(k.values[v], 0.0, epsilon = 1e-14);
            }
        }
        assert!(k.sup_interior() < 1e-14);
        // boundary values follow the same defect formula
        assert!(k.boundary[t.num_vertices() - 1]);
    }

    #[test]
    fn equilateral_tetrahedron_gauss_bonnet() {
        let t = tetrahedron();
        let k = curvature(&t, &unit(&t)).unwrap();
        for &x in &k.values {
            assert_abs_diff_eq!(x, PI, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(
            k.total(),
            2.0 * PI * t.euler_characteristic() as f64,
            epsilon = 1e-12
        );
    }

    #[test]
    fn degenerate_face_curvature() {
        // Star of six faces around vertex 0. Face [0,1,2] gets a long spoke
        // edge 1-2 so that the angle at the center is pi.
        let t = hexagonal_disk(1);
        let mut lengths = vec![1.0; t.num_edges()];
        let f0 = t.vertex_faces(0)[0];
        let opposite = t.face_edges(f0)[t.corner_of(f0, 0).unwrap()];
        lengths[opposite] = 2.0;
        // The other face on that rim edge does not exist (it is a boundary edge).
        assert!(t.is_boundary_edge(opposite));
        let l = PlMetric::new(&t, lengths).unwrap();
        assert!(!l.is_pl());
        assert_eq!(
            curvature(&t, &l),
            Err(GeometryError::PseudoMetric { face: f0 })
        );
        let k = extended_curvature(&t, &l).unwrap();
        assert_abs_diff_eq!(
            k.values[0],
            2.0 * PI - (PI + 5.0 * FRAC_PI_3),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(k.values[0], -2.0 * PI / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn regular_cot_weight_is_one_over_sqrt3() {
        let t = hexagonal_disk(2);
        let w = cot_weights(&t, &unit(&t)).unwrap();
        for e in 0..t.num_edges() {
            let expect = if t.is_boundary_edge(e) {
                0.5 / 3f64.sqrt()
            } else {
                3f64.sqrt() / 3.0
            };
            assert_abs_diff_eq!(w.weights[e], expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn right_angles_opposite_give_zero_weight() {
        // Unit square split along a diagonal: both angles opposite the diagonal are pi/2.
        let t = Triangulation::from_faces(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let diag = t.edge_between(0, 2).unwrap();
        let lengths: Vec<f64> = (0..t.num_edges())
            .map(|e| if e == diag { 2f64.sqrt() } else { 1.0 })
            .collect();
        let w = cot_weights(&t, &PlMetric::new(&t, lengths).unwrap()).unwrap();
        assert_abs_diff_eq!(w.weights[diag], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn weights_reject_degenerate_faces() {
        let t = Triangulation::from_faces(3, &[[0, 1, 2]]).unwrap();
        let l = PlMetric::new(&t, vec![2.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            cot_weights(&t, &l),
            Err(GeometryError::DegenerateFace { face: 0 })
        );
        assert_eq!(
            nondegeneracy_margin(&t, &l),
            Err(GeometryError::DegenerateFace { face: 0 })
        );
    }

    #[test]
    fn laplacian_basic_cases() {
        let t = hexagonal_disk(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = EdgeWeightField {
            weights: (0..t.num_edges())
                .map(|_| rng.gen_range(0.0..2.0))
                .collect(),
        };
        let zero = laplacian(&t, &w, &vec![3.5; t.num_vertices()]).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
        let j = 4;
        let mut ind = vec![0.0; t.num_vertices()];
        ind[j] = 1.0;
        let lap = laplacian(&t, &w, &ind).unwrap();
        for &(i, e) in t.neighbors(j) {
            assert_eq!(lap[i], w.weights[e]);
        }
        assert!(laplacian(&t, &EdgeWeightField { weights: vec![1.0] }, &ind).is_err());
    }

    #[test]
    fn laplacian_sums_to_zero_against_double_loop() {
        let t = tetrahedron();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = EdgeWeightField {
            weights: (0..6)
                .map(|_| rng.gen_range(0.0..2.0))
                .collect::<Vec<f64>>(),
        };
        let f: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lap = laplacian(&t, &w, &f).unwrap();
        // brute force over all ordered vertex pairs
        let mut brute = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if let Some(e) = t.edge_between(i, j).filter(|_| i != j) {
                    brute += w.weights[e] * (f[j] - f[i]);
                }
            }
        }
        assert_abs_diff_eq!(lap.iter().sum::<f64>(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(brute, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn margins_on_regular_and_right_triangles() {
        let t = hexagonal_disk(3);
        let d = unit(&t);
        assert_abs_diff_eq!(
            nondegeneracy_margin(&t, &d).unwrap(),
            FRAC_PI_3,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(delaunay_margin(&t, &d).unwrap(), FRAC_PI_3, epsilon = 1e-14);
        let single = Triangulation::from_faces(3, &[[0, 1, 2]]).unwrap();
        let l = PlMetric::new(&single, vec![5.0, 4.0, 3.0]).unwrap();
        assert_abs_diff_eq!(
            nondegeneracy_margin(&single, &l).unwrap(),
            0.6435011087932844,
            epsilon = 1e-14
        );
        assert_eq!(delaunay_margin(&single, &l).unwrap(), f64::INFINITY);
    }

    #[test]
    fn dirichlet_energy_cases() {
        let t = hexagonal_disk(3);
        assert_eq!(dirichlet_energy(&t, &vec![0.7; t.num_vertices()]), 0.0);
        let one = Triangulation::from_faces(3, &[[0, 1, 2]]).unwrap();
        // edges 0-1 and 0-2 each contribute 1
        assert_eq!(dirichlet_energy(&one, &[0.0, 1.0, 1.0]), 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = (0..t.num_vertices())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let mut brute = 0.0;
        for i in 0..t.num_vertices() {
            for j in (i + 1)..t.num_vertices() {
                if t.edge_between(i, j).is_some() {
                    brute += (u[i] - u[j]).powi(2);
                }
            }
        }
        assert_abs_diff_eq!(dirichlet_energy(&t, &u), brute, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn composition_of_scalings(seed in any::<u64>()) {
            let t = hexagonal_disk(2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = PlMetric::new(&t, (0..t.num_edges()).map(|_| rng.gen_range(0.5..2.0)).collect()).unwrap();
            let u: Vec<f64> = (0..t.num_vertices()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..t.num_vertices()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let uv: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            let twice = conformal_scale(&t, &conformal_scale(&t, &d, &u).unwrap(), &v).unwrap();
            let once = conformal_scale(&t, &d, &uv).unwrap();
            for e in 0..t.num_edges() {
                prop_assert!((twice.length(e) - once.length(e)).abs() <= 1e-12 * once.length(e));
            }
        }

        #[test]
        fn gauss_bonnet_with_pseudo_metrics(seed in any::<u64>()) {
            let t = tetrahedron();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let l = conformal_scale(&t, &unit(&t), &u).unwrap();
            let k = extended_curvature(&t, &l).unwrap();
            prop_assert!((k.total() - 4.0 * PI).abs() < 1e-9);
        }

        #[test]
        fn delaunay_iff_interior_weights_nonnegative(seed in any::<u64>()) {
            let t = hexagonal_disk(2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<f64> = (0..t.num_vertices()).map(|_| rng.gen_range(-0.6..0.6)).collect();
            let l = conformal_scale(&t, &unit(&t), &u).unwrap();
            prop_assume!(l.is_pl());
            let w = cot_weights(&t, &l).unwrap();
            let interior_ok = (0..t.num_edges()).filter(|&e| !t.is_boundary_edge(e)).all(|e| w.weights[e] >= 0.0);
            prop_assert_eq!(delaunay_margin(&t, &l).unwrap() >= 0.0, interior_ok);
        }
    }
}
