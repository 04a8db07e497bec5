//! Pinned flows on nested levels of an exhaustion, compared on a common grid.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::conformal::{nondegeneracy_margin, PlMetric};
use crate::flow::{
    existence_time_estimate, integrate, FlowProblem, Schedule, Termination, Variant,
};
use crate::mesh::{exhaustion, Triangulation, VertexId};

/// Traces of one level's pinned flow at the tracked base vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub radius: usize,
    pub vertices: usize,
    /// Per tracked vertex: whether the level holds it fixed (or lacks it, in
    /// which case the trace is the initial value).
    pub pinned: Vec<bool>,
    /// `traces[j][k]` is `u` at tracked vertex `j` and sample `k`.
    pub traces: Vec<Vec<f64>>,
}

/// Successive-level differences of pinned flows on a common time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    pub center: usize,
    pub tracked: Vec<usize>,
    pub times: Vec<f64>,
    pub levels: Vec<LevelTrace>,
    /// `diffs[j][k] = sup_t |u^{k+1}_j(t) - u^k_j(t)|` for tracked vertex `j`.
    pub diffs: Vec<Vec<f64>>,
    /// Same, restricted to `t ≤ existence_time`.
    pub diffs_in_window: Vec<Vec<f64>>,
    /// Short-time window `T₀(ε, M)` of the base metric.
    pub existence_time: f64,
    /// Expectation (not asserted): differences at the first tracked vertex
    /// are non-increasing in the level.
    pub monotone_decreasing: bool,
}

impl ExhaustionReport {
    /// `t,level_<radius>…` rows for the first tracked vertex.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for l in &self.levels {
            out.push_str(&format!(",level_{}", l.radius));
        }
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            out.push_str(&t.to_string());
            for l in &self.levels {
                out.push_str(&format!(
                    ",{}",
                    l.traces.first().map_or(f64::NAN, |tr| tr[k])
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the standard pinned flow on every exhaustion level whose radius lies
/// in `radii` and tracks `u` at `tracked` base vertices.
///
/// The schedule's stop tolerance is ignored (every level runs to `t_max` so
/// the grids coincide). A degenerating level is an error.
pub fn exhaustion_convergence_report(
    base: &Triangulation,
    metric: &PlMetric<f64>,
    center: usize,
    radii: RangeInclusive<usize>,
    initial: &[f64],
    tracked: &[usize],
    schedule: &Schedule,
) -> Result<ExhaustionReport, AnalysisError> {
    let n = base.num_vertices();
    if initial.len() != n {
        return Err(AnalysisError::InvalidParameter(format!(
            "initial factor must have {n} values"
        )));
    }
    if let Some(&v) = tracked.iter().find(|&&v| v >= n) {
        return Err(AnalysisError::InvalidParameter(format!(
            "tracked vertex {v} not in mesh"
        )));
    }
    if radii.is_empty() || *radii.start() == 0 {
        return Err(AnalysisError::InvalidParameter(
            "level radii must be a nonempty range of positive radii".into(),
        ));
    }
    let ex = exhaustion(base, VertexId(center), *radii.end())?;
    let mut sched = schedule.clone();
    sched.stop_tol = 0.0;
    sched.record_fields = true;
    sched.trace.clear();

    let mut times: Option<Vec<f64>> = None;
    let mut levels = Vec::new();
    for level in ex.levels.iter().filter(|l| radii.contains(&l.radius)) {
        let lengths: Vec<f64> = level.base_edges.iter().map(|&e| metric.length(e)).collect();
        let d = PlMetric::new(&level.mesh, lengths).map_err(crate::flow::FlowError::from)?;
        let u0: Vec<f64> = level.global.iter().map(|&g| initial[g]).collect();
        let p = FlowProblem::new(
            level.mesh.clone(),
            d,
            Variant::Standard,
            Some(u0),
            &level.pinned(),
        )?;
        let run = integrate(&p, &sched)?;
        if let Termination::Degenerated { t_lo, .. } = run.termination {
            return Err(AnalysisError::LevelDegenerated {
                radius: level.radius,
                t: t_lo,
            });
        }
        let fields = run
            .series
            .fields
            .as_ref()
            .ok_or(AnalysisError::MissingFields)?;
        let mut pinned = Vec::new();
        let mut traces = Vec::new();
        for &g in tracked {
            match level.local_of(g) {
                Some(local) => {
                    pinned.push(p.is_pinned(local));
                    traces.push(fields.iter().map(|u| u[local]).collect());
                }
                None => {
                    pinned.push(true);
                    traces.push(vec![initial[g]; fields.len()]);
                }
            }
        }
        match &times {
            None => times = Some(run.series.times.clone()),
            Some(t) if *t != run.series.times => {
                return Err(AnalysisError::InvalidParameter(
                    "levels produced different time grids".into(),
                ))
            }
            Some(_) => {}
        }
        levels.push(LevelTrace {
            radius: level.radius,
            vertices: level.mesh.num_vertices(),
            pinned,
            traces,
        });
    }
    let times = times
        .ok_or_else(|| AnalysisError::InvalidParameter("no level has a radius in range".into()))?;

    let eps = nondegeneracy_margin(base, &metric.clone()).map_err(crate::flow::FlowError::from)?;
    let existence_time = existence_time_estimate(
        eps.min(std::f64::consts::FRAC_PI_3),
        base.max_degree().max(3),
    )?;
    let sup_between = |a: &[f64], b: &[f64], window: f64| {
        times
            .iter()
            .enumerate()
            .filter(|(_, &t)| t <= window)
            .fold(0.0f64, |m, (k, _)| m.max((a[k] - b[k]).abs()))
    };
    let pairwise = |window: f64| -> Vec<Vec<f64>> {
        (0..tracked.len())
            .map(|j| {
                levels
                    .windows(2)
                    .map(|w| sup_between(&w[1].traces[j], &w[0].traces[j], window))
                    .collect()
            })
            .collect()
    };
    let diffs = pairwise(f64::INFINITY);
    let diffs_in_window = pairwise(existence_time);
    let monotone_decreasing = diffs
        .first()
        .is_none_or(|d| d.windows(2).all(|w| w[1] <= w[0]));
    Ok(ExhaustionReport {
        center,
        tracked: tracked.to_vec(),
        times,
        levels,
        diffs,
        diffs_in_window,
        existence_time,
        monotone_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::random_factor;
    use crate::mesh::hexagonal_disk;

    #[test]
    fn regular_metric_levels_stay_zero() {
        let t = hexagonal_disk(5);
        let d = PlMetric::uniform(&t, 1.0).unwrap();
        let u0 = vec![0.0; t.num_vertices()];
        let r =
            exhaustion_convergence_report(&t, &d, 0, 2..=4, &u0, &[0], &Schedule::new(0.05, 0.5))
                .unwrap();
        assert_eq!(r.levels.len(), 3);
        assert!(r
            .levels
            .iter()
            .all(|l| l.traces[0].iter().all(|&x| x.abs() < 1e-14)));
        assert!(r.diffs[0].iter().all(|&x| x < 1e-14));
    }

    #[test]
    fn boundary_tracked_vertex_is_constant() {
        let t = hexagonal_disk(6);
        let d = PlMetric::uniform(&t, 1.0).unwrap();
        let u0 = random_factor(&t, 0, 2, 0.05, 3);
        // Vertex 7 is on ring 2, the rim of level 2.
        let r = exhaustion_convergence_report(
            &t,
            &d,
            0,
            2..=4,
            &u0,
            &[0, 7],
            &Schedule::new(0.05, 1.0),
        )
        .unwrap();
        assert!(r.levels[0].pinned[1]);
        assert!(r.levels[0].traces[1].iter().all(|&x| x == u0[7]));
        assert!(!r.levels[2].pinned[1]);
        assert_eq!(r.times.len(), 21);
        let csv = r.to_csv();
        assert!(csv.starts_with("t,level_2,level_3,level_4\n"));
        assert!(r.existence_time > 0.0);
    }

    #[test]
    fn bad_inputs() {
        let t = hexagonal_disk(3);
        let d = PlMetric::uniform(&t, 1.0).unwrap();
        let u0 = vec![0.0; t.num_vertices()];
        let s = Schedule::new(0.1, 0.2);
        assert!(exhaustion_convergence_report(&t, &d, 0, 1..=2, &u0[1..], &[0], &s).is_err());
        assert!(exhaustion_convergence_report(&t, &d, 0, 1..=2, &u0, &[99], &s).is_err());
        assert!(exhaustion_convergence_report(&t, &d, 0, 0..=2, &u0, &[0], &s).is_err());
    }
}
