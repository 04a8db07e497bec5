//! Checks that integrate the flow and inspect the resulting runs.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sup_diff, AnalysisError, CheckReport};
use crate::conformal::delta_of_epsilon;
use crate::conformal::{laplacian, nondegeneracy_margin, PlMetric};
use crate::flow::{
    existence_time_estimate, integrate, interpolation_weights, random_factor, FlowError,
    FlowProblem, FlowRun, FlowState, Schedule, Termination, Variant, HEX_WEIGHT,
};
use crate::mesh::hexagonal_disk;

fn fields(run: &FlowRun<f64>) -> Result<&[Vec<f64>], AnalysisError> {
    run.series
        .fields
        .as_deref()
        .ok_or(AnalysisError::MissingFields)
}

/// Indices `k` whose neighbors `k ± 1` are equally spaced (to `1e-9`
/// relative), so the centered difference at `k` is second order.
fn centered_samples(times: &[f64]) -> impl Iterator<Item = usize> + '_ {
    (1..times.len().saturating_sub(1)).filter(move |&k| {
        let (a, b) = (times[k] - times[k - 1], times[k + 1] - times[k]);
        (a - b).abs() <= 1e-9 * a.max(b)
    })
}

/// Lattice disk of radius `radius`, pinned rim, start `φ` supported on the
/// ball of radius `⌊radius/2⌋` with `‖φ‖_{l²} = phi_norm`.
fn perturbed_disk(
    radius: usize,
    phi_norm: f64,
    seed: u64,
    variant: Variant,
) -> Result<FlowProblem<f64>, AnalysisError> {
    let mesh = hexagonal_disk(radius);
    let phi = random_factor(&mesh, 0, radius / 2, phi_norm, seed);
    let d = PlMetric::uniform(&mesh, 1.0).map_err(FlowError::from)?;
    Ok(FlowProblem::pinned_boundary(mesh, d, variant, Some(phi))?)
}

/// Curvature evolution `dK_i/dt = Δ_{μ(t)} K_i` along a recorded run: the
/// centered time difference of `K` against the cotangent Laplacian of `K`
/// at every vertex two or more layers from the pinned set.
///
/// Deviation is the sup over interior samples; tolerance `1e-4`.
pub fn check_curvature_evolution(
    p: &FlowProblem<f64>,
    run: &FlowRun<f64>,
) -> Result<CheckReport, AnalysisError> {
    let us = fields(run)?;
    let times = &run.series.times;
    if us.len() < 3 {
        return Err(AnalysisError::RunTooShort {
            samples: us.len(),
            needed: 3,
        });
    }
    let mesh = p.mesh();
    let pinned: Vec<usize> = (0..mesh.num_vertices())
        .filter(|&v| p.is_pinned(v))
        .collect();
    let dist = mesh.distances_to_set(&pinned);
    let deep: Vec<usize> = (0..mesh.num_vertices())
        .filter(|&v| dist[v].is_none_or(|d| d >= 2))
        .collect();

    let states: Vec<FlowState<f64>> = us
        .iter()
        .zip(times)
        .map(|(u, &t)| FlowState::new(p, t, u.clone()))
        .collect::<Result<_, _>>()?;
    let mut dev = 0.0f64;
    let mut count = 0usize;
    for k in centered_samples(times) {
        let s = &states[k];
        let w = s
            .weights
            .as_ref()
            .ok_or(FlowError::Degenerated { face: 0, t: s.t })?;
        let lap = laplacian(mesh, w, &s.curvature.values).map_err(FlowError::from)?;
        let dt = times[k + 1] - times[k - 1];
        for &v in &deep {
            let dk = (states[k + 1].curvature.values[v] - states[k - 1].curvature.values[v]) / dt;
            dev = dev.max((dk - lap[v]).abs());
        }
        count += 1;
    }
    Ok(CheckReport::new("curvature_evolution", dev, 1e-4, count)
        .param("deep_vertices", deep.len())
        .param("samples", us.len()))
}

/// Curvature evolution at step `h` and `h/2` on a perturbed lattice disk:
/// the deviation at `h` is below `1e-4` and halving `h` divides it by
/// `4 ± 0.5` (second-order centered differences).
pub fn curvature_evolution_refinement(
    radius: usize,
    phi_norm: f64,
    seed: u64,
    h: f64,
    t_max: f64,
) -> Result<CheckReport, AnalysisError> {
    let p = perturbed_disk(radius, phi_norm, seed, Variant::Standard)?;
    let check = |h: f64| -> Result<CheckReport, AnalysisError> {
        let run = integrate(&p, &Schedule::new(h, t_max).stop_tol(0.0).with_fields())?;
        check_curvature_evolution(&p, &run)
    };
    let coarse = check(h)?;
    let fine = check(0.5 * h)?;
    let ratio = coarse.deviation / fine.deviation;
    let mut at_h = coarse.clone();
    at_h.name = "deviation_at_h".into();
    let mut at_half = fine;
    at_half.name = "deviation_at_h_over_2".into();
    Ok(CheckReport::combine(
        "curvature_evolution",
        vec![
            at_h,
            at_half,
            CheckReport::new("halving_ratio_minus_4", (ratio - 4.0).abs(), 0.5, 2)
                .param("ratio", ratio),
        ],
    )
    .with_seed(seed)
    .param("radius", radius)
    .param("phi_norm", phi_norm)
    .param("h", h)
    .param("t_max", t_max)
    .param("ratio", ratio))
}

/// Pairs of sample indices of `a` and `b` at equal times.
fn common_samples(a: &[f64], b: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let tol = 1e-12 * a[i].abs().max(1.0);
        if (a[i] - b[j]).abs() <= tol {
            out.push((i, j));
            i += 1;
            j += 1;
        } else if a[i] < b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// `sup_t sup_v |u_a - u_b|` over the common sample times of two runs of
/// `p`, against `tolerance`.
///
/// The uniqueness hypothesis is checked at up to 32 evenly spread common
/// samples: interpolated metrics `(s u_a + (1-s) u_b) ∗ d` must stay in the
/// triangle-inequality region and be Delaunay at every quadrature node
/// (16 midpoint nodes). If not, the report is flagged inapplicable.
pub fn uniqueness_gap(
    p: &FlowProblem<f64>,
    run_a: &FlowRun<f64>,
    run_b: &FlowRun<f64>,
    tolerance: f64,
) -> Result<CheckReport, AnalysisError> {
    let (ua, ub) = (fields(run_a)?, fields(run_b)?);
    let pairs = common_samples(&run_a.series.times, &run_b.series.times);
    if pairs.is_empty() {
        return Err(AnalysisError::NoCommonSamples);
    }
    let gap = pairs
        .iter()
        .fold(0.0f64, |m, &(i, j)| m.max(sup_diff(&ua[i], &ub[j])));
    let stride = pairs.len().div_ceil(32);
    let mut min_margin = f64::INFINITY;
    let mut min_weight = f64::INFINITY;
    let mut failure = None;
    for &(i, j) in pairs.iter().step_by(stride) {
        match interpolation_weights(p, &ua[i], &ub[j], 16) {
            Ok(w) => {
                min_margin = min_margin.min(w.min_delaunay_margin);
                min_weight = min_weight.min(w.min);
            }
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        }
    }
    let applicable = failure.is_none() && min_margin > 0.0;
    let mut report = CheckReport::new("uniqueness_gap", gap, tolerance, pairs.len())
        .param("min_interpolated_delaunay_margin", min_margin)
        .param("min_interpolated_weight", min_weight);
    report.applicable = applicable;
    if let Some(f) = failure {
        report = report.note(format!("interpolation hypothesis failed: {f}"));
    } else if !applicable {
        report = report.note("interpolated metrics are not Delaunay");
    }
    Ok(report)
}

/// Uniqueness surrogate on a perturbed lattice disk.
///
/// * Order: runs at `coarse_h`, `coarse_h/2`, `coarse_h/4`; the ratio of
///   successive gaps must lie in `[12, 20]` (fourth order).
/// * Size: runs at `fine_h` and `fine_h/2` differ by less than `1e-8`.
///
/// All runs go to `t_max` with stopping disabled. The order test uses a
/// coarser step than the size test because at `fine_h` the gaps are near
/// round-off, where ratios are meaningless.
pub fn uniqueness_refinement(
    radius: usize,
    phi_norm: f64,
    seed: u64,
    coarse_h: f64,
    fine_h: f64,
    t_max: f64,
) -> Result<CheckReport, AnalysisError> {
    let p = perturbed_disk(radius, phi_norm, seed, Variant::Standard)?;
    let run = |h: f64, stride: usize| {
        integrate(
            &p,
            &Schedule::new(h, t_max)
                .stop_tol(0.0)
                .stride(stride)
                .with_fields(),
        )
    };
    let (c1, c2, c4) = (
        run(coarse_h, 1)?,
        run(0.5 * coarse_h, 2)?,
        run(0.25 * coarse_h, 4)?,
    );
    let g1 = uniqueness_gap(&p, &c1, &c2, f64::INFINITY)?;
    let g2 = uniqueness_gap(&p, &c2, &c4, f64::INFINITY)?;
    let ratio = g1.deviation / g2.deviation;
    let (f1, f2) = (run(fine_h, 1)?, run(0.5 * fine_h, 2)?);
    let mut fine = uniqueness_gap(&p, &f1, &f2, 1e-8)?;
    fine.name = "gap_at_fine_h".into();
    let mut order = CheckReport::new(
        "gap_ratio_distance_from_16",
        (ratio - 16.0).abs(),
        4.0,
        g1.samples,
    )
    .param("ratio", ratio)
    .param("gap_h", g1.deviation)
    .param("gap_h_over_2", g2.deviation);
    order.applicable = g1.applicable && g2.applicable;
    Ok(CheckReport::combine("uniqueness", vec![order, fine])
        .with_seed(seed)
        .param("radius", radius)
        .param("phi_norm", phi_norm)
        .param("coarse_h", coarse_h)
        .param("fine_h", fine_h)
        .param("t_max", t_max)
        .param("ratio", ratio))
}

/// Energy inequality `d/dt ‖u‖² + (√3/3) E(u) ≤ 0` along a lattice run,
/// and `‖u(t)‖_{l²}` non-increasing.
///
/// The centered difference of `‖u‖²` at interior samples may exceed the
/// exact derivative by `(Δt²/6)|N'''|`, bounded by `(4/3)Δt² λ³ ‖u(0)‖²`
/// with `λ = 12c` the Gershgorin bound of `Δ_c`; the tolerance is that
/// allowance plus `1e-8`.
pub fn energy_monotonicity_check(
    p: &FlowProblem<f64>,
    run: &FlowRun<f64>,
) -> Result<CheckReport, AnalysisError> {
    p.with_variant(Variant::SemilinearHex)
        .map_err(|e| AnalysisError::NotHexagonal(e.to_string()))?;
    let s = &run.series;
    let norm_sq: Vec<f64> = s.l2_u.iter().map(|x| x * x).collect();
    let c = HEX_WEIGHT;
    let lambda = 12.0 * c;
    let mut worst = f64::NEG_INFINITY;
    let mut dt_max = 0.0f64;
    let mut count = 0usize;
    for k in centered_samples(&s.times) {
        let dt = s.times[k + 1] - s.times[k - 1];
        let value = (norm_sq[k + 1] - norm_sq[k - 1]) / dt + c * s.dirichlet[k];
        worst = worst.max(value);
        dt_max = dt_max.max(0.5 * dt);
        count += 1;
    }
    let n0 = norm_sq.first().copied().unwrap_or(0.0);
    let slack = 1e-8 + (4.0 / 3.0) * dt_max * dt_max * lambda.powi(3) * n0;
    let energy =
        CheckReport::new("energy_inequality", worst.max(0.0), slack, count).param("max_lhs", worst);
    let rise = s.l2_u.windows(2).fold(0.0f64, |m, w| m.max(w[1] - w[0]));
    let monotone = CheckReport::new("l2_non_increasing", rise, 1e-15, s.l2_u.len());
    Ok(
        CheckReport::combine("energy_monotonicity", vec![energy, monotone])
            .param("samples", s.len()),
    )
}

/// Result of [`convergence_experiment`].
#[derive(Debug, Clone)]
pub struct ConvergenceOutcome {
    pub report: CheckReport,
    pub problem: FlowProblem<f64>,
    pub run: FlowRun<f64>,
}

/// Desk-scale convergence to the regular metric on the lattice disk of
/// radius `radius` from `φ` supported on the ball of radius `⌊radius/2⌋`
/// with `‖φ‖_{l²} = phi_norm`, integrated with the standard flow.
///
/// Asserts: every sampled metric keeps all angles ≥ π/6 and every pair of
/// angles opposite an interior edge ≤ 5π/6; `E(u)` ends below `1e-8`;
/// `sup |K|` ends below `1e-6`; the energy inequality and `l²` monotonicity
/// hold ([`energy_monotonicity_check`]); and `c ∫ E dt ≤ ‖φ‖²`
/// (integrated energy inequality, trapezoid rule).
pub fn convergence_experiment(
    radius: usize,
    phi_norm: f64,
    seed: u64,
    schedule: &Schedule,
) -> Result<ConvergenceOutcome, AnalysisError> {
    if radius < 2 {
        return Err(AnalysisError::InvalidParameter(
            "radius must be at least 2".into(),
        ));
    }
    let p = perturbed_disk(radius, phi_norm, seed, Variant::Standard)?;
    let run = integrate(&p, schedule)?;
    let s = &run.series;
    let min_ndg = s.ndg_margin.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_del = s.del_margin.iter().cloned().fold(f64::INFINITY, f64::min);
    let margin_violation = (FRAC_PI_6 - min_ndg).max(FRAC_PI_6 - min_del).max(0.0);
    let mut parts = Vec::new();
    let degenerated = matches!(run.termination, Termination::Degenerated { .. });
    parts.push(CheckReport::new(
        "no_degeneration",
        if degenerated { 1.0 } else { 0.0 },
        0.0,
        1,
    ));
    parts.push(
        CheckReport::new("margins_3_18_3_19", margin_violation, 0.0, s.len())
            .param("min_angle", min_ndg)
            .param("min_delaunay_margin", min_del),
    );
    let final_e = s.dirichlet.last().copied().unwrap_or(f64::NAN);
    let final_k = s.sup_k.last().copied().unwrap_or(f64::NAN);
    parts.push(CheckReport::new("final_energy", final_e, 1e-8, 1));
    parts.push(CheckReport::new("final_sup_curvature", final_k, 1e-6, 1));
    parts.push(energy_monotonicity_check(&p, &run)?);
    let integral: f64 = s
        .times
        .windows(2)
        .zip(s.dirichlet.windows(2))
        .map(|(t, e)| 0.5 * (t[1] - t[0]) * (e[0] + e[1]))
        .sum();
    let phi_sq = phi_norm * phi_norm;
    parts.push(
        CheckReport::new(
            "integrated_energy",
            HEX_WEIGHT * integral,
            phi_sq * (1.0 + 1e-6) + 1e-12,
            s.len(),
        )
        .param("integral", integral),
    );
    let t_end = s.times.last().copied().unwrap_or(0.0);
    let report = CheckReport::combine("convergence", parts)
        .with_seed(seed)
        .param("radius", radius)
        .param("phi_norm", phi_norm)
        .param("h", schedule.h)
        .param("t_max", schedule.t_max)
        .param("t_end", t_end)
        .param("termination", format!("{:?}", run.termination));
    Ok(ConvergenceOutcome {
        report,
        problem: p,
        run,
    })
}

/// Short-time existence estimate.
///
/// * `T₀(π/3, 6)` matches `1.6805e-4` within `1e-8`.
/// * For `experiments` random PL metrics on the lattice disk (edge lengths
///   `1 ± 0.15`, all vertices free) with `u(0) = 0`: the standard flow never
///   degenerates on `[0, T₀(ε, M)]` with `ε` the initial minimum angle and
///   `M` the maximum degree; `‖u(t)‖_∞ ≤ (2+M)π t ≤ δ(ε)`; and every angle
///   stays at least `ε/2`.
pub fn existence_time_check(
    radius: usize,
    experiments: usize,
    seed: u64,
) -> Result<CheckReport, AnalysisError> {
    let closed =
        existence_time_estimate(FRAC_PI_3, 6).map_or(f64::NAN, |t: f64| (t - 1.6805e-4).abs());
    let mesh = hexagonal_disk(radius);
    let m = mesh.max_degree().max(3);
    let mut degenerations = 0usize;
    let mut ball_ratio = 0.0f64;
    let mut angle_violation = 0.0f64;
    let mut speed_violation = 0.0f64;
    for k in 0..experiments as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
        let lengths: Vec<f64> = (0..mesh.num_edges())
            .map(|_| 1.0 + rng.gen_range(-0.15..0.15))
            .collect();
        let d = PlMetric::new(&mesh, lengths).map_err(FlowError::from)?;
        let eps = nondegeneracy_margin(&mesh, &d)
            .map_err(FlowError::from)?
            .min(FRAC_PI_3);
        let delta: f64 = delta_of_epsilon(eps).map_err(FlowError::from)?;
        let t0 = existence_time_estimate(eps, m)?;
        let p = FlowProblem::new(mesh.clone(), d, Variant::Standard, None, &[])?;
        let run = integrate(
            &p,
            &Schedule::new(t0 / 16.0, t0).stop_tol(0.0).with_fields(),
        )?;
        if matches!(run.termination, Termination::Degenerated { .. }) {
            degenerations += 1;
            continue;
        }
        let us = fields(&run)?;
        for (u, &t) in us.iter().zip(&run.series.times) {
            let sup = u.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            ball_ratio = ball_ratio.max(sup / delta);
            speed_violation = speed_violation.max(sup - (2.0 + m as f64) * PI * t);
        }
        let min_angle = run
            .series
            .ndg_margin
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        angle_violation = angle_violation.max(0.5 * eps - min_angle);
    }
    Ok(CheckReport::combine(
        "existence_time",
        vec![
            CheckReport::new("closed_form_pi_over_3_deg_6", closed, 1e-8, 1),
            CheckReport::new("degenerations", degenerations as f64, 0.0, experiments),
            CheckReport::new("sup_u_over_delta", ball_ratio, 1.0, experiments),
            CheckReport::new(
                "speed_bound_excess",
                speed_violation.max(0.0),
                1e-15,
                experiments,
            ),
            CheckReport::new(
                "angle_below_half_eps",
                angle_violation.max(0.0),
                0.0,
                experiments,
            ),
        ],
    )
    .with_seed(seed)
    .param("radius", radius)
    .param("experiments", experiments)
    .param("max_degree", m))
}

/// Extended flow from a pseudo metric: the lattice disk of radius `radius`
/// with one rim edge stretched to length 2, so its face is `(2, 1, 1)`.
/// The pinned extended flow must reach `t_max` and keep every face's
/// extended angle sum at `π` within `1e-9`.
pub fn extended_global_existence_check(
    radius: usize,
    t_max: f64,
    h: f64,
) -> Result<CheckReport, AnalysisError> {
    if radius < 2 {
        return Err(AnalysisError::InvalidParameter(
            "radius must be at least 2".into(),
        ));
    }
    let mesh = hexagonal_disk(radius);
    let rim = (0..mesh.num_edges())
        .find(|&e| mesh.edge_faces(e).len() == 1)
        .ok_or_else(|| AnalysisError::InvalidParameter("mesh has no boundary edge".into()))?;
    let mut lengths = vec![1.0; mesh.num_edges()];
    lengths[rim] = 2.0;
    let d = PlMetric::new(&mesh, lengths).map_err(FlowError::from)?;
    let pseudo = d.pseudo_faces().count();
    let p = FlowProblem::pinned_boundary(mesh, d, Variant::Extended, None)?;
    let stride = ((t_max / h) / 200.0).ceil().max(1.0) as usize;
    let run = integrate(
        &p,
        &Schedule::new(h, t_max)
            .stop_tol(0.0)
            .stride(stride)
            .with_fields(),
    )?;
    let us = fields(&run)?;
    let mut sum_dev = 0.0f64;
    for (u, &t) in us.iter().zip(&run.series.times) {
        let s = FlowState::new(&p, t, u.clone())?;
        for a in &s.angles {
            sum_dev = sum_dev.max((a[0] + a[1] + a[2] - PI).abs());
        }
    }
    let t_end = run.series.times.last().copied().unwrap_or(0.0);
    Ok(CheckReport::combine(
        "extended_global_existence",
        vec![
            CheckReport::new(
                "initial_pseudo_metric",
                if pseudo > 0 { 0.0 } else { 1.0 },
                0.0,
                1,
            )
            .param("pseudo_faces", pseudo),
            CheckReport::new("time_short_of_t_max", t_max - t_end, 0.0, 1),
            CheckReport::new("angle_sum", sum_dev, 1e-9, us.len()),
        ],
    )
    .param("radius", radius)
    .param("t_max", t_max)
    .param("h", h))
}
