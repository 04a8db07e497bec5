//! Flow run configuration: a JSON file (`--config`) merged with flags, flags
//! taking precedence field by field.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use yamabe::conformal::{parse_vertex_values, PlMetric};
use yamabe::flow::{random_factor, FlowProblem, Schedule};
use yamabe::mesh::{hexagonal_disk, load_mesh, tetrahedron};
use yamabe::{Triangulation, Variant};

use crate::CliError;

/// Where the mesh (and its background metric) comes from.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeshSource {
    /// Hexagonal lattice disk with unit lengths.
    Hex { radius: usize },
    /// Unit-length tetrahedron boundary.
    Tetra,
    /// Mesh file; edges without a `len` section get unit lengths.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Zero,
    File,
    Random,
}

/// Initial conformal factor; fields not used by `kind` are ignored.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    pub kind: Option<InitKind>,
    pub path: Option<PathBuf>,
    pub norm: Option<f64>,
    pub seed: Option<u64>,
    pub support: Option<usize>,
    pub center: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pinning {
    Boundary,
    None,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub h: Option<f64>,
    pub t_max: Option<f64>,
    pub stop_tol: Option<f64>,
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Time-series CSV; standard output when absent.
    pub series: Option<PathBuf>,
    /// Final conformal factor (`<id> <value>` lines).
    pub final_state: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub trace_vertices: Option<Vec<usize>>,
}

/// Everything a `flow` run needs. Every field is optional here; see
/// [`RunConfig::resolve`] for defaults and requirements.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: Option<MeshSource>,
    pub variant: Option<String>,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    pub pin: Option<Pinning>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

/// A validated run: problem, schedule and output paths.
#[derive(Debug)]
pub struct ResolvedRun {
    pub problem: FlowProblem<f64>,
    pub schedule: Schedule,
    pub outputs: OutputSpec,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| config_err(format!("invalid config {}: {e}", path.display())))
    }

    /// Field-wise override: every `Some` in `flags` replaces the value here.
    pub fn merge(mut self, flags: RunConfig) -> Self {
        fn take<T>(dst: &mut Option<T>, src: Option<T>) {
            if src.is_some() {
                *dst = src;
            }
        }
        take(&mut self.mesh, flags.mesh);
        take(&mut self.variant, flags.variant);
        take(&mut self.init.kind, flags.init.kind);
        take(&mut self.init.path, flags.init.path);
        take(&mut self.init.norm, flags.init.norm);
        take(&mut self.init.seed, flags.init.seed);
        take(&mut self.init.support, flags.init.support);
        take(&mut self.init.center, flags.init.center);
        take(&mut self.schedule.h, flags.schedule.h);
        take(&mut self.schedule.t_max, flags.schedule.t_max);
        take(&mut self.schedule.stop_tol, flags.schedule.stop_tol);
        take(&mut self.schedule.stride, flags.schedule.stride);
        take(&mut self.pin, flags.pin);
        take(&mut self.outputs.series, flags.outputs.series);
        take(&mut self.outputs.final_state, flags.outputs.final_state);
        take(&mut self.outputs.trace, flags.outputs.trace);
        take(
            &mut self.outputs.trace_vertices,
            flags.outputs.trace_vertices,
        );
        self
    }

    /// Builds the problem. Defaults: variant `standard`, zero initial
    /// factor, boundary pinned, schedule `h = 0.01`, `t_max = 10`,
    /// `stop_tol = 1e-6`, stride 1; random factors default to norm 0.01,
    /// support radius 2 around vertex 0. A random factor needs a seed.
    pub fn resolve(self) -> Result<ResolvedRun, CliError> {
        let source = self.mesh.ok_or_else(|| {
            config_err("no mesh source: give --hex, --tetra, --mesh or `mesh` in the config")
        })?;
        let (mesh, lengths) = load_source(&source)?;
        let variant: Variant = self
            .variant
            .as_deref()
            .unwrap_or("standard")
            .parse()
            .map_err(config_err)?;
        let n = mesh.num_vertices();
        let initial = match self.init.kind.unwrap_or(InitKind::Zero) {
            InitKind::Zero => vec![0.0; n],
            InitKind::File => {
                let path = self
                    .init
                    .path
                    .ok_or_else(|| config_err("init kind `file` needs a path (--init-file)"))?;
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
                parse_vertex_values(&text, n)
                    .map_err(|e| config_err(format!("{}: {e}", path.display())))?
            }
            InitKind::Random => {
                let seed = self
                    .init
                    .seed
                    .ok_or_else(|| config_err("random initial factor needs a seed (--seed)"))?;
                let center = self.init.center.unwrap_or(0);
                if center >= n {
                    return Err(config_err(format!(
                        "random factor center {center} not in mesh"
                    )));
                }
                let norm = self.init.norm.unwrap_or(0.01);
                if !(norm >= 0.0 && norm.is_finite()) {
                    return Err(config_err(
                        "random factor norm must be finite and nonnegative",
                    ));
                }
                random_factor(&mesh, center, self.init.support.unwrap_or(2), norm, seed)
            }
        };
        let metric = PlMetric::new(&mesh, lengths)
            .map_err(|e| config_err(format!("invalid metric: {e}")))?;
        let pinned = match self.pin.unwrap_or(Pinning::Boundary) {
            Pinning::Boundary => mesh.boundary_vertices(),
            Pinning::None => Vec::new(),
        };
        let problem = FlowProblem::new(mesh, metric, variant, Some(initial), &pinned)
            .map_err(|e| config_err(format!("invalid flow problem: {e}")))?;
        let defaults = Schedule::default();
        let mut schedule = Schedule::new(
            self.schedule.h.unwrap_or(defaults.h),
            self.schedule.t_max.unwrap_or(defaults.t_max),
        )
        .stop_tol(self.schedule.stop_tol.unwrap_or(defaults.stop_tol))
        .stride(self.schedule.stride.unwrap_or(defaults.sample_stride));
        if let Some(v) = &self.outputs.trace_vertices {
            schedule = schedule.trace(v.clone());
        }
        Ok(ResolvedRun {
            problem,
            schedule,
            outputs: self.outputs,
        })
    }
}

/// Mesh and per-edge lengths for a source.
pub fn load_source(source: &MeshSource) -> Result<(Triangulation, Vec<f64>), CliError> {
    let mesh = match source {
        MeshSource::Hex { radius } => hexagonal_disk(*radius),
        MeshSource::Tetra => tetrahedron(),
        MeshSource::File { path } => {
            let doc =
                load_mesh(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            let lengths = doc
                .lengths
                .unwrap_or_else(|| vec![1.0; doc.mesh.num_edges()]);
            return Ok((doc.mesh, lengths));
        }
    };
    let lengths = vec![1.0; mesh.num_edges()];
    Ok((mesh, lengths))
}
