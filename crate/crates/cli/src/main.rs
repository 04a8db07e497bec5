//! `yamabe`: generate meshes, run flows, run verification suites and
//! exhaustion experiments.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 the standard flow
//! degenerated, 3 a verification check failed.

mod config;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use yamabe::analysis::{
    exhaustion_convergence_report, run_suite, CheckReport, Selector, SELECTORS,
};
use yamabe::conformal::{write_vertex_values, PlMetric};
use yamabe::flow::{integrate, random_factor, Schedule, Termination};
use yamabe::mesh::{hexagonal_disk, tetrahedron, write_mesh};

use config::{InitKind, InitSpec, MeshSource, OutputSpec, Pinning, RunConfig, ScheduleSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("flow degenerated: face {face} left the triangle-inequality region between t = {t_lo} and t = {t_hi}")]
    Degenerated { face: usize, t_lo: f64, t_hi: f64 },
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Degenerated { .. } => 2,
            CliError::ChecksFailed { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "yamabe",
    version,
    about = "Combinatorial Yamabe flow on triangulated surfaces"
)]
struct Cli {
    /// Worker threads for parallel face loops (default: all cores).
    #[arg(long, global = true, env = "YAMABE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a built-in mesh with unit edge lengths.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Integrate a flow and write its time series as CSV.
    Flow(Box<FlowArgs>),
    /// Run verification checks and print one PASS/FAIL line per check.
    Verify {
        /// One of: all, variational, evolution, continuity, maxprinciple,
        /// energy, exhaustion, convergence, gaussbonnet, delta, existence,
        /// extended, uniqueness, semilinear.
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Write the JSON report bundle here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pinned flows on nested exhaustion levels of a lattice disk.
    Exhaust(ExhaustArgs),
}

#[derive(Debug, Subcommand)]
enum GenerateKind {
    /// Hexagonal lattice disk of the given graph radius.
    Hex {
        #[arg(long)]
        radius: usize,
        /// Output path (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary of the tetrahedron.
    Tetra {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct FlowArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mesh file (unit lengths unless it has a `len` section).
    #[arg(long, group = "source")]
    mesh: Option<PathBuf>,
    /// Hexagonal lattice disk of this radius.
    #[arg(long, group = "source")]
    hex: Option<usize>,
    /// Tetrahedron fixture.
    #[arg(long, group = "source")]
    tetra: bool,
    /// standard, extended or semilinear.
    #[arg(long)]
    variant: Option<String>,
    /// Initial factor: zero, file or random.
    #[arg(long, value_parser = parse_init_kind)]
    init: Option<InitKind>,
    #[arg(long)]
    init_file: Option<PathBuf>,
    /// l² norm of a random initial factor.
    #[arg(long)]
    norm: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Graph radius of a random factor's support.
    #[arg(long)]
    support: Option<usize>,
    /// Center vertex of a random factor's support.
    #[arg(long)]
    center: Option<usize>,
    /// Pinned vertices: boundary or none.
    #[arg(long, value_parser = parse_pinning)]
    pin: Option<Pinning>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    stop_tol: Option<f64>,
    #[arg(long)]
    stride: Option<usize>,
    /// Time-series CSV (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Final conformal factor.
    #[arg(long = "final")]
    final_state: Option<PathBuf>,
    /// Per-vertex trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Comma-separated vertices for the trace.
    #[arg(long, value_delimiter = ',')]
    trace_vertices: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct ExhaustArgs {
    /// Radius of the base lattice disk.
    #[arg(long, default_value_t = 10)]
    radius: usize,
    #[arg(long, default_value_t = 3)]
    min_level: usize,
    #[arg(long, default_value_t = 8)]
    max_level: usize,
    /// l² norm of the random initial factor.
    #[arg(long, default_value_t = 0.05)]
    norm: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    support: usize,
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    #[arg(long, default_value_t = 2.0)]
    t_max: f64,
    /// Comma-separated base vertices to track (the center first).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    track: Vec<usize>,
    /// Center-trace CSV (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full JSON report.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_init_kind(s: &str) -> Result<InitKind, String> {
    match s {
        "zero" => Ok(InitKind::Zero),
        "file" => Ok(InitKind::File),
        "random" => Ok(InitKind::Random),
        _ => Err(format!(
            "unknown initial factor `{s}` (expected zero, file or random)"
        )),
    }
}

fn parse_pinning(s: &str) -> Result<Pinning, String> {
    match s {
        "boundary" => Ok(Pinning::Boundary),
        "none" => Ok(Pinning::None),
        _ => Err(format!("unknown pinning `{s}` (expected boundary or none)")),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}"))),
    }
}

fn cmd_generate(kind: GenerateKind) -> Result<(), CliError> {
    let (mesh, out) = match kind {
        GenerateKind::Hex { radius, out } => (hexagonal_disk(radius), out),
        GenerateKind::Tetra { out } => (tetrahedron(), out),
    };
    let lengths = vec![1.0; mesh.num_edges()];
    write_output(out.as_deref(), &write_mesh(&mesh, Some(&lengths)))
}

fn flow_flags(a: FlowArgs) -> RunConfig {
    let mesh = match (a.mesh, a.hex, a.tetra) {
        (Some(path), _, _) => Some(MeshSource::File { path }),
        (_, Some(radius), _) => Some(MeshSource::Hex { radius }),
        (_, _, true) => Some(MeshSource::Tetra),
        _ => None,
    };
    RunConfig {
        mesh,
        variant: a.variant,
        init: InitSpec {
            kind: a.init,
            path: a.init_file,
            norm: a.norm,
            seed: a.seed,
            support: a.support,
            center: a.center,
        },
        schedule: ScheduleSpec {
            h: a.h,
            t_max: a.t_max,
            stop_tol: a.stop_tol,
            stride: a.stride,
        },
        pin: a.pin,
        outputs: OutputSpec {
            series: a.out,
            final_state: a.final_state,
            trace: a.trace,
            trace_vertices: a.trace_vertices,
        },
    }
}

fn cmd_flow(args: FlowArgs) -> Result<(), CliError> {
    let base = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let run = base.merge(flow_flags(args)).resolve()?;
    let result =
        integrate(&run.problem, &run.schedule).map_err(|e| CliError::Config(e.to_string()))?;
    let series = &result.series;
    write_output(run.outputs.series.as_deref(), &series.to_csv())?;
    if let Some(path) = &run.outputs.trace {
        write_output(Some(path), &series.traces_csv())?;
    }
    if let Some(path) = &run.outputs.final_state {
        write_output(Some(path), &write_vertex_values(&result.final_state.u))?;
    }
    match result.termination {
        Termination::Degenerated { face, t_lo, t_hi } => {
            Err(CliError::Degenerated { face, t_lo, t_hi })
        }
        Termination::Converged { t } => {
            eprintln!("converged at t = {t} after {} steps", result.steps);
            Ok(())
        }
        Termination::ReachedEnd => {
            eprintln!(
                "reached t = {} after {} steps",
                run.schedule.t_max, result.steps
            );
            Ok(())
        }
    }
}

fn cmd_verify(suite: &str, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let selector: Selector = suite.parse().map_err(|_| {
        CliError::Config(format!(
            "unknown suite `{suite}`; expected one of: {}",
            SELECTORS.join(", ")
        ))
    })?;
    let reports = run_suite(selector, seed).map_err(|e| CliError::Config(e.to_string()))?;
    for r in &reports {
        println!("{}", r.summary_line());
    }
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
        write_output(Some(path), &(json + "\n"))?;
    }
    let failed = reports
        .iter()
        .filter(|r: &&CheckReport| r.applicable && !r.pass)
        .count();
    if failed > 0 {
        return Err(CliError::ChecksFailed {
            failed,
            total: reports.len(),
        });
    }
    Ok(())
}

fn cmd_exhaust(a: ExhaustArgs) -> Result<(), CliError> {
    if a.min_level == 0 || a.min_level > a.max_level {
        return Err(CliError::Config(
            "need 1 ≤ --min-level ≤ --max-level".into(),
        ));
    }
    let base = hexagonal_disk(a.radius);
    let metric = PlMetric::uniform(&base, 1.0).map_err(|e| CliError::Config(e.to_string()))?;
    let phi = random_factor(&base, 0, a.support, a.norm, a.seed);
    let report = exhaustion_convergence_report(
        &base,
        &metric,
        0,
        a.min_level..=a.max_level,
        &phi,
        &a.track,
        &Schedule::new(a.h, a.t_max),
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    write_output(a.out.as_deref(), &report.to_csv())?;
    if let Some(path) = &a.json {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_output(Some(path), &(json + "\n"))?;
    }
    for (j, diffs) in report.diffs.iter().enumerate() {
        let list: Vec<String> = diffs.iter().map(|d| format!("{d:.3e}")).collect();
        eprintln!(
            "vertex {}: successive-level sup differences [{}]",
            report.tracked[j],
            list.join(", ")
        );
    }
    eprintln!(
        "existence window T0 = {:.4e}; center differences {}monotone decreasing",
        report.existence_time,
        if report.monotone_decreasing {
            ""
        } else {
            "not "
        }
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure thread pool: {e}")))?;
    }
    match cli.command {
        Command::Generate { kind } => cmd_generate(kind),
        Command::Flow(args) => cmd_flow(*args),
        Command::Verify { suite, seed, out } => cmd_verify(&suite, seed, out.as_deref()),
        Command::Exhaust(args) => cmd_exhaust(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
