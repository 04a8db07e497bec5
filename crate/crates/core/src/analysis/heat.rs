//! Linear heat flow `df/dt = Δ_{ω(t)} f` with time-dependent edge weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AnalysisError, CheckReport};
use crate::flow::rk4_step;
use crate::mesh::{hexagonal_disk, Triangulation};

/// Per-edge weights `ω_e(t) = a_e + b_e (1 + sin(f_e t + φ_e)) / 2`, so
/// `a_e ≤ ω_e(t) ≤ a_e + b_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSchedule {
    pub base: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub frequency: Vec<f64>,
    pub phase: Vec<f64>,
}

impl WeightSchedule {
    /// Constant weights `ω_e(t) = w_e`.
    pub fn constant(weights: Vec<f64>) -> Self {
        let n = weights.len();
        WeightSchedule {
            base: weights,
            amplitude: vec![0.0; n],
            frequency: vec![0.0; n],
            phase: vec![0.0; n],
        }
    }

    /// Random schedule whose largest possible vertex row sum is `row_cap`.
    pub fn random(graph: &Triangulation, row_cap: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = graph.num_edges();
        let mut s = WeightSchedule {
            base: (0..m).map(|_| rng.gen_range(0.0..1.0)).collect(),
            amplitude: (0..m).map(|_| rng.gen_range(0.0..1.0)).collect(),
            frequency: (0..m).map(|_| rng.gen_range(0.1..5.0)).collect(),
            phase: (0..m)
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect(),
        };
        let worst = s.max_row_sum(graph);
        if worst > 0.0 {
            let k = row_cap / worst;
            s.base
                .iter_mut()
                .chain(s.amplitude.iter_mut())
                .for_each(|x| *x *= k);
        }
        s
    }

    pub fn at(&self, e: usize, t: f64) -> f64 {
        self.base[e]
            + self.amplitude[e] * 0.5 * (1.0 + (self.frequency[e] * t + self.phase[e]).sin())
    }

    /// `max_i Σ_j (a_ij + b_ij)`, an upper bound on every row sum at every time.
    pub fn max_row_sum(&self, graph: &Triangulation) -> f64 {
        (0..graph.num_vertices())
            .map(|v| {
                graph
                    .neighbors(v)
                    .iter()
                    .map(|&(_, e)| self.base[e] + self.amplitude[e])
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    fn validate(&self, graph: &Triangulation, row_cap: f64) -> Result<(), AnalysisError> {
        let m = graph.num_edges();
        if [&self.base, &self.amplitude, &self.frequency, &self.phase]
            .iter()
            .any(|v| v.len() != m)
        {
            return Err(AnalysisError::InadmissibleWeights(format!(
                "schedule must have {m} edges"
            )));
        }
        if self
            .base
            .iter()
            .chain(&self.amplitude)
            .any(|&x| !(x >= 0.0 && x.is_finite()))
        {
            return Err(AnalysisError::InadmissibleWeights(
                "weights must be finite and nonnegative".into(),
            ));
        }
        if self
            .frequency
            .iter()
            .chain(&self.phase)
            .any(|x| !x.is_finite())
        {
            return Err(AnalysisError::InadmissibleWeights(
                "frequencies and phases must be finite".into(),
            ));
        }
        let worst = self.max_row_sum(graph);
        if worst > row_cap * (1.0 + 1e-12) {
            return Err(AnalysisError::InadmissibleWeights(format!(
                "row sum {worst} exceeds cap {row_cap}"
            )));
        }
        Ok(())
    }
}

fn heat_rhs(graph: &Triangulation, w: &WeightSchedule, t: f64, f: &[f64]) -> Vec<f64> {
    (0..graph.num_vertices())
        .map(|i| {
            graph
                .neighbors(i)
                .iter()
                .fold(0.0, |acc, &(j, e)| acc + w.at(e, t) * (f[j] - f[i]))
        })
        .collect()
}

/// RK4 solution of `df/dt = Δ_{ω(t)} f` on `[0, horizon]` with step `h`
/// (last step shortened); returns the state after every step, starting with `f0`.
pub fn heat_run(
    graph: &Triangulation,
    w: &WeightSchedule,
    f0: &[f64],
    horizon: f64,
    h: f64,
) -> Vec<Vec<f64>> {
    let n = (horizon / h - 1e-9).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(n + 1);
    out.push(f0.to_vec());
    let mut t = 0.0;
    for k in 0..n {
        let next_t = if k + 1 == n {
            horizon
        } else {
            (k + 1) as f64 * h
        };
        let f = out.last().expect("nonempty");
        let next = rk4_step(t, f, next_t - t, |s, x| {
            Ok::<_, ()>(heat_rhs(graph, w, s, x))
        })
        .expect("infallible");
        out.push(next);
        t = next_t;
    }
    out
}

/// Discrete maximum principle for `df/dt = Δ_{ω(t)} f`.
///
/// With `f0 ≡ 0` the deviation is `sup_t ‖f(t)‖_∞` against `1e-10`;
/// otherwise it is `max(0, sup_t max f(t) - max(0, max f0))` against `1e-8`
/// (the comparison form).
pub fn max_principle_test(
    graph: &Triangulation,
    schedule: &WeightSchedule,
    row_cap: f64,
    f0: &[f64],
    horizon: f64,
    h: f64,
) -> Result<CheckReport, AnalysisError> {
    schedule.validate(graph, row_cap)?;
    if f0.len() != graph.num_vertices() {
        return Err(AnalysisError::InvalidParameter(format!(
            "f0 must have {} values",
            graph.num_vertices()
        )));
    }
    if !(h > 0.0 && horizon >= 0.0) {
        return Err(AnalysisError::InvalidParameter(
            "h > 0 and horizon ≥ 0 required".into(),
        ));
    }
    let states = heat_run(graph, schedule, f0, horizon, h);
    let zero = f0.iter().all(|&x| x == 0.0);
    let report = if zero {
        let sup = states.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        CheckReport::new("max_principle_zero", sup, 1e-10, states.len())
    } else {
        let bound = f0.iter().cloned().fold(0.0f64, f64::max);
        let top = states
            .iter()
            .flatten()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        CheckReport::new(
            "max_principle_comparison",
            (top - bound).max(0.0),
            1e-8,
            states.len(),
        )
    };
    Ok(report
        .param("horizon", horizon)
        .param("h", h)
        .param("row_cap", row_cap))
}

/// Both forms of the maximum principle on the radius-4 lattice disk for
/// `seeds` random schedules (row sums ≤ 10), `f0 ≡ 0` and random `f0 ≤ 0`.
pub fn max_principle_suite(
    seeds: usize,
    seed: u64,
    horizon: f64,
    h: f64,
) -> Result<CheckReport, AnalysisError> {
    const ROW_CAP: f64 = 10.0;
    let graph = hexagonal_disk(4);
    let n = graph.num_vertices();
    let mut zero_parts = Vec::new();
    let mut cmp_parts = Vec::new();
    for k in 0..seeds as u64 {
        let s = seed.wrapping_add(k);
        let w = WeightSchedule::random(&graph, ROW_CAP, s);
        zero_parts.push(max_principle_test(
            &graph,
            &w,
            ROW_CAP,
            &vec![0.0; n],
            horizon,
            h,
        )?);
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x9e37_79b9_7f4a_7c15);
        let f0: Vec<f64> = (0..n).map(|_| -rng.gen_range(0.0..1.0)).collect();
        cmp_parts.push(max_principle_test(&graph, &w, ROW_CAP, &f0, horizon, h)?);
    }
    Ok(CheckReport::combine(
        "max_principle",
        vec![
            CheckReport::combine("zero_initial", zero_parts),
            CheckReport::combine("comparison", cmp_parts),
        ],
    )
    .with_seed(seed)
    .param("seeds", seeds)
    .param("horizon", horizon)
    .param("h", h)
    .param("row_cap", ROW_CAP))
}
