//! Checks of pointwise identities and bounds: no time integration involved.

use std::f64::consts::{FRAC_PI_3, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{random_triangle, AnalysisError, CheckReport};
use crate::conformal::{
    angle_jacobian, conformal_scale, curvature, delta_of_epsilon, extended_angles,
    extended_curvature, inner_angles, PlMetric,
};
use crate::flow::{rhs_standard, semilinear_rhs, FlowProblem, Variant};
use crate::mesh::{hexagonal_disk, tetrahedron};

/// Lengths after scaling vertex `j` of a face by `e^{s}`: every side except
/// the one opposite `j` picks up `e^{s/2}`.
fn scale_vertex(l: [f64; 3], j: usize, s: f64) -> [f64; 3] {
    let f = (0.5 * s).exp();
    let mut out = l;
    for (k, x) in out.iter_mut().enumerate() {
        if k != j {
            *x *= f;
        }
    }
    out
}

/// Closed-form angle Jacobian against central differences (step `1e-5`) of
/// the inner angles under single-vertex conformal perturbations, over
/// `samples` random triangles with every angle ≥ 0.05; plus the equilateral
/// closed form and symmetry.
///
/// The difference quotient is the five-point central stencil
/// `(8(f(h) - f(-h)) - (f(2h) - f(-2h))) / 12h`: on near-flat triangles
/// (two angles close to 0.05) the third `u`-derivative of an angle reaches
/// ~1e6, so the three-point quotient alone carries ~1.6e-5 of truncation
/// error at this step.
pub fn check_variational_identity(samples: usize, seed: u64) -> CheckReport {
    const STEP: f64 = 1e-5;
    const MARGIN: f64 = 0.05;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fd_dev = 0.0f64;
    let mut sym_dev = 0.0f64;
    for _ in 0..samples {
        let l = random_triangle(&mut rng, MARGIN);
        let jac = match angle_jacobian(l) {
            Ok(j) => j,
            Err(_) => {
                fd_dev = f64::NAN;
                continue;
            }
        };
        for j in 0..3 {
            let at = |k: f64| inner_angles(scale_vertex(l, j, k * STEP));
            let (Ok(p1), Ok(m1), Ok(p2), Ok(m2)) = (at(1.0), at(-1.0), at(2.0), at(-2.0)) else {
                fd_dev = f64::NAN;
                continue;
            };
            for i in 0..3 {
                let fd = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * STEP);
                fd_dev = fd_dev.max((fd - jac[i][j]).abs());
                sym_dev = sym_dev.max((jac[i][j] - jac[j][i]).abs());
            }
        }
    }
    let eq = angle_jacobian([1.0f64; 3]).expect("equilateral face");
    let target = 1.0 / (2.0 * 3f64.sqrt());
    let eq_dev = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max((eq[i][j] - target).abs()));
    CheckReport::combine(
        "variational_identity",
        vec![
            CheckReport::new("finite_difference", fd_dev, 1e-6, samples),
            CheckReport::new("symmetry", sym_dev, 0.0, samples),
            CheckReport::new("equilateral", eq_dev, 1e-8, 1),
        ],
    )
    .with_seed(seed)
    .param("samples", samples)
    .param("fd_step", STEP)
    .param("margin", MARGIN)
}

/// Extension consistency and continuity at the boundary of the
/// triangle-inequality region.
///
/// * `extended_angles == inner_angles` bit-for-bit on random triangles;
/// * along `paths` random approaches `l_i = (1 - 10⁻ᵏ)(l_j + l_k)`,
///   `k = 3..=9`, each component moves monotonically toward `(π, 0, 0)`
///   (recorded as the number of violations);
/// * on and beyond the boundary the value is exactly `(π, 0, 0)`;
/// * angle sums are `π` within `1e-10` everywhere.
pub fn check_angle_continuity(paths: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    let mut violations = 0usize;
    let mut boundary_dev = 0.0f64;
    let mut sum_dev = 0.0f64;
    let mut modulus = 0.0f64;
    let mut evaluations = 0usize;

    for _ in 0..paths * 100 {
        let l = random_triangle(&mut rng, 1e-3);
        let (a, b) = (inner_angles(l), extended_angles(l));
        match (a, b) {
            (Ok(a), Ok(b)) if a == b => sum_dev = sum_dev.max((b.sum() - PI).abs()),
            _ => mismatches += 1,
        }
        evaluations += 1;
    }

    for _ in 0..paths {
        let i = rng.gen_range(0..3usize);
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut l = [0.0f64; 3];
        l[j] = rng.gen_range(0.2..1.0);
        l[k] = rng.gen_range(0.2..1.0);
        let target = |t: &[f64; 3]| {
            let mut d = [0.0f64; 3];
            for (c, x) in t.iter().enumerate() {
                d[c] = (x - if c == i { PI } else { 0.0 }).abs();
            }
            d
        };
        let mut prev: Option<[f64; 3]> = None;
        for e in 3..=9 {
            l[i] = (1.0 - 10f64.powi(-e)) * (l[j] + l[k]);
            let Ok(t) = extended_angles(l) else {
                violations += 1;
                continue;
            };
            evaluations += 1;
            sum_dev = sum_dev.max((t.sum() - PI).abs());
            let d = target(&t.0);
            if let Some(p) = prev {
                if (0..3).any(|c| d[c] > p[c]) {
                    violations += 1;
                }
            }
            prev = Some(d);
        }
        if let Some(p) = prev {
            modulus = modulus.max(p.iter().cloned().fold(0.0, f64::max));
        }
        for factor in [1.0, 1.0 + 1e-12, 1.5, 10.0] {
            l[i] = factor * (l[j] + l[k]);
            if let Ok(t) = extended_angles(l) {
                evaluations += 1;
                boundary_dev = boundary_dev.max(target(&t.0).iter().cloned().fold(0.0, f64::max));
                sum_dev = sum_dev.max((t.sum() - PI).abs());
            } else {
                boundary_dev = f64::INFINITY;
            }
        }
    }

    CheckReport::combine(
        "angle_continuity",
        vec![
            CheckReport::new("extension_consistency", mismatches as f64, 0.0, paths * 100),
            CheckReport::new("monotone_approach", violations as f64, 0.0, paths * 7),
            CheckReport::new("boundary_value", boundary_dev, 0.0, paths * 4),
            CheckReport::new("angle_sum", sum_dev, 1e-10, evaluations),
            // Distance to (π, 0, 0) at relative gap 1e-9: O(√gap).
            CheckReport::new("modulus_at_1e-9", modulus, 1e-3, paths),
        ],
    )
    .with_seed(seed)
    .param("paths", paths)
}

/// `Σ K_i = 2πχ` on the tetrahedron fixture and on `samples` random
/// conformal rescalings of it (`u_i ∈ [-2, 2]`, which produces pseudo
/// metrics), using extended curvature; standard curvature is compared too
/// whenever the rescaled metric is PL.
pub fn gauss_bonnet_check(samples: usize, seed: u64) -> CheckReport {
    let mesh = tetrahedron();
    let base = PlMetric::uniform(&mesh, 1.0f64).expect("unit metric");
    let target = 2.0 * PI * mesh.euler_characteristic() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = 0.0f64;
    let mut pseudo = 0usize;
    let total = |u: &[f64], dev: &mut f64, pseudo: &mut usize| {
        let Ok(l) = conformal_scale(&mesh, &base, u) else {
            *dev = f64::NAN;
            return;
        };
        match extended_curvature(&mesh, &l) {
            Ok(k) => *dev = dev.max((k.total() - target).abs()),
            Err(_) => *dev = f64::NAN,
        }
        if l.is_pl() {
            match curvature(&mesh, &l) {
                Ok(k) => *dev = dev.max((k.total() - target).abs()),
                Err(_) => *dev = f64::NAN,
            }
        } else {
            *pseudo += 1;
        }
    };
    total(&[0.0; 4], &mut dev, &mut pseudo);
    for _ in 0..samples {
        let u: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        total(&u, &mut dev, &mut pseudo);
    }
    CheckReport::new("gauss_bonnet", dev, 1e-9, samples + 1)
        .with_seed(seed)
        .param("samples", samples)
        .param("pseudo_metrics", pseudo)
        .note(format!(
            "{pseudo} of {} rescalings were pseudo metrics",
            samples + 1
        ))
}

/// The closed form `δ(π/3) ≈ 4.2234e-3` and the guarantee behind it: for
/// `samples` random `ε`-nondegenerate triangles and factors with
/// `‖u‖_∞ = δ(ε)`, every angle moves by at most `ε/2`.
///
/// The sampled deviation is the worst `|Δθ| / (ε/2)`, so it passes at 1.
pub fn delta_guarantee_check(samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let closed = delta_of_epsilon(FRAC_PI_3).map_or(f64::NAN, |d: f64| (d - 4.2234e-3).abs());
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    for _ in 0..samples {
        let eps = rng.gen_range(0.01..FRAC_PI_3);
        let l = random_triangle(&mut rng, eps);
        let delta: f64 = delta_of_epsilon(eps).expect("eps in range");
        let mut u = [0.0f64; 3];
        for x in &mut u {
            *x = rng.gen_range(-delta..=delta);
        }
        let pick = rng.gen_range(0..3usize);
        u[pick] = if rng.gen::<bool>() { delta } else { -delta };
        let scaled = [
            l[0] * (0.5 * (u[1] + u[2])).exp(),
            l[1] * (0.5 * (u[0] + u[2])).exp(),
            l[2] * (0.5 * (u[0] + u[1])).exp(),
        ];
        let (Ok(a), Ok(b)) = (inner_angles(l), inner_angles(scaled)) else {
            violations += 1;
            continue;
        };
        let change = (0..3).fold(0.0f64, |m, c| m.max((a[c] - b[c]).abs()));
        let ratio = change / (0.5 * eps);
        worst = worst.max(ratio);
        if ratio > 1.0 {
            violations += 1;
        }
    }
    CheckReport::combine(
        "delta_guarantee",
        vec![
            CheckReport::new("closed_form_pi_over_3", closed, 1e-7, 1),
            CheckReport::new("perturbation_ratio", worst, 1.0, samples),
            CheckReport::new("violations", violations as f64, 0.0, samples),
        ],
    )
    .with_seed(seed)
    .param("samples", samples)
}

/// `Δ_c u + Σ F̃(u_j - u_i, u_k - u_i) = -K_i(u ∗ d_reg)` at interior
/// vertices of a radius-`radius` lattice disk, for `samples` random `u`
/// with `‖u‖_∞ ≤ amplitude`.
pub fn semilinear_identity_check(
    radius: usize,
    samples: usize,
    amplitude: f64,
    seed: u64,
) -> Result<CheckReport, AnalysisError> {
    if radius < 1 || !(amplitude >= 0.0) {
        return Err(AnalysisError::InvalidParameter(
            "radius ≥ 1 and amplitude ≥ 0 required".into(),
        ));
    }
    let mesh = hexagonal_disk(radius);
    let base = PlMetric::uniform(&mesh, 1.0f64).map_err(crate::flow::FlowError::from)?;
    let standard = FlowProblem::pinned_boundary(mesh, base, Variant::Standard, None)?;
    let lattice = standard.with_variant(Variant::SemilinearHex)?;
    let n = standard.mesh().num_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = 0.0f64;
    for _ in 0..samples {
        let u: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(-amplitude..=amplitude))
            .collect();
        let a = rhs_standard(&standard, &u, 0.0)?;
        let b = semilinear_rhs(&lattice, &u)?;
        for v in standard.free_vertices() {
            dev = dev.max((a[v] - b[v]).abs());
        }
    }
    Ok(CheckReport::new("semilinear_identity", dev, 1e-10, samples)
        .with_seed(seed)
        .param("radius", radius)
        .param("samples", samples)
        .param("amplitude", amplitude))
}
