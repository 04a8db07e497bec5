//! Reproducible verification checks and desk-scale experiments.
//!
//! Every check returns a [`CheckReport`] whose verdict is `deviation ≤
//! tolerance`; composite checks fold their parts into a normalized
//! deviation (worst `deviation / tolerance` ratio) against tolerance 1.
//! Randomized checks draw from a `ChaCha8` stream seeded with the logged
//! 64-bit seed, so a report is reproducible from its name, parameters and seed.

mod exhaust;
mod heat;
mod identities;
mod runs;
mod suite;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::flow::FlowError;
use crate::mesh::MeshError;

pub use exhaust::{exhaustion_convergence_report, ExhaustionReport, LevelTrace};
pub use heat::{heat_run, max_principle_suite, max_principle_test, WeightSchedule};
pub use identities::{
    check_angle_continuity, check_variational_identity, delta_guarantee_check, gauss_bonnet_check,
    semilinear_identity_check,
};
pub use runs::{
    check_curvature_evolution, convergence_experiment, curvature_evolution_refinement,
    energy_monotonicity_check, existence_time_check, extended_global_existence_check,
    uniqueness_gap, uniqueness_refinement, ConvergenceOutcome,
};
pub use suite::{run_suite, Selector, SELECTORS};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("run has {samples} samples; at least {needed} are required")]
    RunTooShort { samples: usize, needed: usize },
    #[error("run did not record per-sample conformal factors")]
    MissingFields,
    #[error("runs share no sample times")]
    NoCommonSamples,
    #[error("inadmissible weight schedule: {0}")]
    InadmissibleWeights(String),
    #[error("problem is not a regular hexagonal lattice problem: {0}")]
    NotHexagonal(String),
    #[error("level {radius} degenerated at t = {t}")]
    LevelDegenerated { radius: usize, t: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Outcome of one check. `pass` is exactly `deviation ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    /// Largest observed deviation (NaN never passes).
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    /// `false` when the check's hypothesis did not hold; the verdict is then
    /// informational.
    pub applicable: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<CheckReport>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, deviation: f64, tolerance: f64, samples: usize) -> Self {
        CheckReport {
            name: name.into(),
            params: BTreeMap::new(),
            seed: None,
            deviation,
            tolerance,
            pass: deviation <= tolerance,
            samples,
            applicable: true,
            notes: Vec::new(),
            parts: Vec::new(),
        }
    }

    /// Folds sub-checks: deviation is the worst `deviation / tolerance`
    /// (`∞` for a failing part with zero tolerance), tolerance is 1.
    pub fn combine(name: impl Into<String>, parts: Vec<CheckReport>) -> Self {
        let deviation = parts
            .iter()
            .map(CheckReport::normalized)
            .fold(0.0f64, |m, x| {
                if x.is_nan() || m.is_nan() {
                    f64::NAN
                } else {
                    m.max(x)
                }
            });
        let samples = parts.iter().map(|p| p.samples).sum();
        let mut report = CheckReport::new(name, deviation, 1.0, samples);
        report.applicable = parts.iter().all(|p| p.applicable);
        report.parts = parts;
        report
    }

    fn normalized(&self) -> f64 {
        if self.tolerance > 0.0 {
            self.deviation / self.tolerance
        } else if self.deviation <= 0.0 {
            0.0
        } else if self.deviation.is_nan() {
            f64::NAN
        } else {
            f64::INFINITY
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(
            key.to_owned(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn part(&self, name: &str) -> Option<&CheckReport> {
        self.parts.iter().find(|p| p.name == name)
    }

    /// `PASS name deviation=… tolerance=…` (or `FAIL`, `N/A`).
    pub fn summary_line(&self) -> String {
        let verdict = match (self.applicable, self.pass) {
            (false, _) => "N/A ",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        format!(
            "{verdict} {:<28} deviation={:.3e} tolerance={:.3e} samples={}",
            self.name, self.deviation, self.tolerance, self.samples
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Sup-norm of `a - b`.
pub(crate) fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Random triangle side lengths whose three angles are all at least `margin`
/// (radians, `margin < π/3`), with a random overall scale in `[e⁻¹, e]`.
pub(crate) fn random_triangle<R: Rng>(rng: &mut R, margin: f64) -> [f64; 3] {
    use std::f64::consts::PI;
    let spare = PI - 3.0 * margin;
    // Uniform on the simplex of angle triples with every angle ≥ margin.
    let (mut x, mut y): (f64, f64) = (rng.gen(), rng.gen());
    if x + y > 1.0 {
        x = 1.0 - x;
        y = 1.0 - y;
    }
    let angles = [
        margin + spare * x,
        margin + spare * y,
        margin + spare * (1.0 - x - y),
    ];
    let scale = rng.gen_range(-1.0f64..1.0).exp();
    angles.map(|a| scale * a.sin())
}
