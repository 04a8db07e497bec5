//! Named groups of checks with default sizes (the whole suite runs in well
//! under two minutes in an optimized build).

use std::fmt;
use std::str::FromStr;

use super::{
    check_angle_continuity, check_variational_identity, convergence_experiment,
    curvature_evolution_refinement, delta_guarantee_check, energy_monotonicity_check,
    exhaustion_convergence_report, existence_time_check, extended_global_existence_check,
    gauss_bonnet_check, max_principle_suite, semilinear_identity_check, uniqueness_refinement,
    AnalysisError, CheckReport,
};
use crate::conformal::PlMetric;
use crate::flow::{integrate, random_factor, FlowError, FlowProblem, Schedule, Variant};
use crate::mesh::hexagonal_disk;

/// Suite selector accepted by [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    All,
    Variational,
    Evolution,
    Continuity,
    MaxPrinciple,
    Energy,
    Exhaustion,
    Convergence,
    GaussBonnet,
    Delta,
    Existence,
    Extended,
    Uniqueness,
    Semilinear,
}

/// Selector names in the order `all` runs them.
pub const SELECTORS: [&str; 14] = [
    "all",
    "variational",
    "evolution",
    "continuity",
    "maxprinciple",
    "energy",
    "exhaustion",
    "convergence",
    "gaussbonnet",
    "delta",
    "existence",
    "extended",
    "uniqueness",
    "semilinear",
];

const ORDER: [Selector; 13] = [
    Selector::Variational,
    Selector::Evolution,
    Selector::Continuity,
    Selector::MaxPrinciple,
    Selector::Energy,
    Selector::Exhaustion,
    Selector::Convergence,
    Selector::GaussBonnet,
    Selector::Delta,
    Selector::Existence,
    Selector::Extended,
    Selector::Uniqueness,
    Selector::Semilinear,
];

impl FromStr for Selector {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let pos = SELECTORS.iter().position(|&n| n == s).ok_or_else(|| {
            format!(
                "unknown suite `{s}`; expected one of: {}",
                SELECTORS.join(", ")
            )
        })?;
        Ok(if pos == 0 {
            Selector::All
        } else {
            ORDER[pos - 1]
        })
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Selector::All => "all",
            other => SELECTORS[1 + ORDER.iter().position(|s| s == other).expect("listed")],
        };
        f.write_str(name)
    }
}

/// Runs the selected checks with their default parameters.
pub fn run_suite(selector: Selector, seed: u64) -> Result<Vec<CheckReport>, AnalysisError> {
    match selector {
        Selector::All => {
            let mut out = Vec::new();
            for s in ORDER {
                out.extend(run_suite(s, seed)?);
            }
            Ok(out)
        }
        one => Ok(vec![run_one(one, seed)?]),
    }
}

fn run_one(selector: Selector, seed: u64) -> Result<CheckReport, AnalysisError> {
    Ok(match selector {
        Selector::All => unreachable!("expanded by run_suite"),
        Selector::Variational => check_variational_identity(10_000, seed),
        Selector::Evolution => curvature_evolution_refinement(6, 0.1, seed, 1e-3, 0.5)?,
        Selector::Continuity => check_angle_continuity(10, seed),
        Selector::MaxPrinciple => max_principle_suite(20, seed, 10.0, 5e-3)?,
        Selector::Energy => {
            let mesh = hexagonal_disk(6);
            let phi = random_factor(&mesh, 0, 3, 0.01, seed);
            let d = PlMetric::uniform(&mesh, 1.0).map_err(FlowError::from)?;
            let p = FlowProblem::pinned_boundary(mesh, d, Variant::Standard, Some(phi))?;
            let run = integrate(&p, &Schedule::new(1e-2, 20.0).stop_tol(0.0))?;
            energy_monotonicity_check(&p, &run)?
                .with_seed(seed)
                .param("radius", 6)
                .param("phi_norm", 0.01)
        }
        Selector::Exhaustion => exhaustion_check(seed)?,
        Selector::Convergence => {
            convergence_experiment(10, 0.01, seed, &Schedule::new(1e-2, 100.0))?.report
        }
        Selector::GaussBonnet => gauss_bonnet_check(100, seed),
        Selector::Delta => delta_guarantee_check(10_000, seed),
        Selector::Existence => existence_time_check(4, 50, seed)?,
        Selector::Extended => extended_global_existence_check(4, 10.0, 1e-2)?,
        Selector::Uniqueness => uniqueness_refinement(6, 0.1, seed, 0.04, 1e-3, 5.0)?,
        Selector::Semilinear => semilinear_identity_check(6, 1000, 0.3, seed)?,
    })
}

/// Exhaustion levels 3..=8 of the radius-10 lattice disk. Decay across
/// levels is recorded, not asserted; the check asserts that tracked
/// vertices pinned on a level keep their initial value exactly.
fn exhaustion_check(seed: u64) -> Result<CheckReport, AnalysisError> {
    let base = hexagonal_disk(10);
    let d = PlMetric::uniform(&base, 1.0).map_err(FlowError::from)?;
    let phi = random_factor(&base, 0, 2, 0.05, seed);
    // Center and a ring-3 vertex (on the rim of level 3).
    let ring3 = 1 + 3 * 2 * 3;
    let tracked = [0, ring3];
    let r = exhaustion_convergence_report(
        &base,
        &d,
        0,
        3..=8,
        &phi,
        &tracked,
        &Schedule::new(1e-2, 2.0),
    )?;
    let mut pinned_drift = 0.0f64;
    for level in &r.levels {
        for (j, &g) in tracked.iter().enumerate() {
            if level.pinned[j] {
                let drift = level.traces[j]
                    .iter()
                    .fold(0.0f64, |m, x| m.max((x - phi[g]).abs()));
                pinned_drift = pinned_drift.max(drift);
            }
        }
    }
    Ok(CheckReport::new("exhaustion", pinned_drift, 0.0, r.levels.len())
        .with_seed(seed)
        .param("levels", r.levels.iter().map(|l| l.radius).collect::<Vec<_>>())
        .param("center_diffs", &r.diffs[0])
        .param("center_diffs_in_window", &r.diffs_in_window[0])
        .param("existence_time", r.existence_time)
        .param("monotone_decreasing", r.monotone_decreasing)
        .note(format!(
            "successive-level differences at the center are {}monotone decreasing (expectation, not asserted)",
            if r.monotone_decreasing { "" } else { "not " }
        )))
}
