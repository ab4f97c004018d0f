//! The `brst` command line.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::diffpoly::{euler_operator, parse, parse_params, variational_derivative};
use crate::error::{Error, Result};
use crate::reductions::{
    build_system, catalog, ckdv_to_mkdv, miura_map, miura_u_of_r, v_of_w, ConservedDensity, EvolutionSystem,
    SystemManifest, SINGULARITY_THRESHOLD,
};
use crate::solver::spectral::Spectral;
use crate::solver::{evolve_with, soliton_initial, FieldState, GhostProfile, SolverOptions, Trajectory};
use crate::verify::{self, check_conservation, CheckReport, BRST_DRIFT_TOLERANCE, CLASSICAL_DRIFT_TOLERANCE};

pub use config::{parse_config, GhostSpec, InitSpec, PartialConfig, RunConfig, CONFIG_KEYS};

#[derive(Parser, Debug)]
#[command(
    name = "brst",
    version,
    about = "BRST-extended integrable systems: exact identities and periodic simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in systems.
    ListSystems {
        #[arg(long)]
        json: bool,
    },
    /// Integrate a system on a periodic grid and write CSV and JSON outputs.
    Simulate(Box<SimulateArgs>),
    /// Run a named check, or `all`, and print JSON reports.
    Verify {
        /// Check name, or `all`.
        check: String,
        /// Also write report.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the Miura maps symbolically or to sampled data.
    Miura(MiuraArgs),
    /// List a system's conserved densities and re-check their conservation.
    Conserved(SystemArgs),
    /// Variational derivative of a density.
    Euler {
        #[arg(long)]
        density: String,
        #[arg(long)]
        field: String,
    },
}

#[derive(Args, Debug, Default)]
struct SystemArgs {
    /// Catalog system name.
    #[arg(long)]
    system: Option<String>,
    /// Parameters, e.g. `beta=1/2,s=1`.
    #[arg(long)]
    params: Option<String>,
    /// JSON system manifest instead of a catalog name.
    #[arg(long)]
    system_file: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug, Default)]
struct SimulateArgs {
    /// key = value file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    system_file: Option<PathBuf>,
    /// Period L of the domain [0, L).
    #[arg(long, alias = "L")]
    length: Option<f64>,
    /// Grid points (power of two).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Built-in soliton data, `k=0.7` or `k=0.7,x0=12`.
    #[arg(long)]
    soliton: Option<String>,
    /// Initial field as an expression in `x`, `L` and `pi`.
    #[arg(long)]
    init: Option<String>,
    /// Initial field values, one per grid point.
    #[arg(long)]
    init_file: Option<PathBuf>,
    /// derivative | field | zero | random | expression in `x`, `L` and `pi`.
    #[arg(long)]
    ghost: Option<String>,
    /// Densities to track, comma separated, or `all`.
    #[arg(long, value_delimiter = ',')]
    diag: Option<Vec<String>>,
    #[arg(long)]
    record_every: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct MiuraArgs {
    /// Source system: `mkdv` (R to u) or `ckdv` (w to v).
    #[arg(long, default_value = "mkdv")]
    from: String,
    /// Source field as an expression in `x`, `L` and `pi`; without it the map is shown symbolically.
    #[arg(long)]
    expr: Option<String>,
    #[arg(long, default_value_t = 40.0)]
    length: f64,
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the CLI with process stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Exit codes: 0 success, 1 check or runtime failure, 2 usage error.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::ListSystems { json } => list_systems(json, out),
        Command::Simulate(a) => simulate(*a, out, err),
        Command::Verify { check, out: dir } => run_verify(&check, dir.as_deref(), out),
        Command::Miura(a) => miura(a, out),
        Command::Conserved(a) => conserved(a, out),
        Command::Euler { density, field } => euler(&density, &field, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Argument(_)
        | Error::UnknownSystem(_)
        | Error::UnknownCheck(_)
        | Error::UnknownDensity(_)
        | Error::NotNumeric(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn list_systems(json: bool, out: &mut dyn Write) -> Result<i32> {
    let systems = catalog();
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&systems)?)?;
    } else {
        for s in systems {
            let params = if s.params.is_empty() { "-" } else { s.params };
            writeln!(out, "{:<11} {:<32} {}", s.name, params, s.summary)?;
        }
    }
    Ok(0)
}

/// Loads a system manifest; a `manifest.json` written by `simulate` also
/// works, through its `system` entry.
fn load_system_file(path: &Path) -> Result<EvolutionSystem> {
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let value = match value.get("system") {
        Some(inner) if inner.is_object() => inner.clone(),
        _ => value,
    };
    let manifest: SystemManifest = serde_json::from_value(value)?;
    EvolutionSystem::from_manifest(&manifest)
}

fn load_system(name: Option<&str>, params: Option<&str>, file: Option<&Path>) -> Result<EvolutionSystem> {
    match file {
        Some(path) => {
            if name.is_some() || params.is_some() {
                return Err(Error::arg("--system-file cannot be combined with --system or --params"));
            }
            load_system_file(path)
        }
        None => build_system(name.unwrap_or("kdv"), &parse_params(params.unwrap_or(""))?),
    }
}

impl SimulateArgs {
    fn partial(self) -> (Option<PathBuf>, PartialConfig) {
        let c = PartialConfig {
            system: self.system,
            params: self.params,
            system_file: self.system_file,
            length: self.length,
            n: self.n,
            dt: self.dt,
            t_end: self.t_end,
            soliton: self.soliton,
            init: self.init,
            init_file: self.init_file,
            ghost: self.ghost,
            diag: self.diag,
            record_every: self.record_every,
            out: self.out,
            seed: self.seed,
        };
        (self.config, c)
    }
}

fn initial_state(cfg: &RunConfig, system: &EvolutionSystem) -> Result<FieldState> {
    let &[field] = system.even_fields().as_slice() else {
        return Err(Error::arg(format!("system `{}` needs exactly one evolved even field", system.name)));
    };
    let state = FieldState::new(cfg.length, cfg.n)?;
    let values = match &cfg.init {
        InitSpec::Soliton { k, x0 } => {
            soliton_initial(system, *k, *x0, cfg.length, cfg.n, &GhostProfile::Zero)?.field(field)?.to_vec()
        }
        InitSpec::Expr(e) => config::sample_expression(e, &state)?,
        InitSpec::File(p) => config::read_values(p, cfg.n)?,
    };
    let ghost = match &cfg.ghost {
        GhostSpec::Derivative => Spectral::new(cfg.n, cfg.length)?.derivative(&values, 1)?,
        GhostSpec::Field => values.clone(),
        GhostSpec::Zero => vec![0.0; cfg.n],
        GhostSpec::Random => config::random_profile(&state, cfg.seed),
        GhostSpec::Expr(e) => config::sample_expression(e, &state)?,
    };
    let mut state = state.with_field(field, values)?;
    for g in system.ghost_fields() {
        state = state.with_field(g, ghost.clone())?;
    }
    Ok(state)
}

fn diagnostics(names: &[String], system: &EvolutionSystem) -> Result<Vec<ConservedDensity>> {
    if names.iter().any(|n| n == "all") {
        return Ok(system.densities.clone());
    }
    // Aliases such as H3 keep the name that was asked for.
    names.iter().map(|n| system.density(n).map(|d| ConservedDensity { name: n.clone(), ..d.clone() })).collect()
}

#[derive(Serialize)]
struct SolverInfo {
    scheme: &'static str,
    steps: usize,
    dt_effective: f64,
    stability_limit: f64,
    floor: f64,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    system: SystemManifest,
    solver: SolverInfo,
    outputs: [&'static str; 3],
}

#[derive(Serialize)]
struct RunReport<'a> {
    system: &'a str,
    times: Vec<f64>,
    diagnostics: std::collections::BTreeMap<String, Vec<f64>>,
    checks: Vec<CheckReport>,
}

fn conservation_reports(traj: &Trajectory, densities: &[ConservedDensity]) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (kind, tol) in [
        (crate::DensityKind::Classical, CLASSICAL_DRIFT_TOLERANCE),
        (crate::DensityKind::BrstInvariant, BRST_DRIFT_TOLERANCE),
    ] {
        let subset: Vec<ConservedDensity> = densities.iter().filter(|d| d.kind == kind).cloned().collect();
        if !subset.is_empty() {
            out.push(check_conservation(traj, &subset, tol)?);
        }
    }
    Ok(out)
}

fn simulate(args: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (config_path, flags) = args.partial();
    let file = match config_path {
        Some(p) => PartialConfig::from_map(&parse_config(&std::fs::read_to_string(&p)?)?)?,
        None => PartialConfig::default(),
    };
    let merged = flags.over(file);
    let system = load_system(merged.system.as_deref(), merged.params.as_deref(), merged.system_file.as_deref())?;
    let mut cfg = merged.resolve(matches!(system.name.as_str(), "kdv" | "mkdv"))?;
    cfg.system = system.name.clone();

    let init = initial_state(&cfg, &system)?;
    let densities = diagnostics(&cfg.diagnostics, &system)?;
    let options = SolverOptions::default();
    let traj = evolve_with(&init, &system, cfg.t_end, cfg.dt, cfg.record_every, &densities, &options)?;

    std::fs::create_dir_all(&cfg.out)?;
    let csv = std::io::BufWriter::new(std::fs::File::create(cfg.out.join("trajectory.csv"))?);
    traj.write_csv(csv)?;

    let steps = ((cfg.t_end / traj.dt).round()) as usize;
    let manifest = RunManifest {
        tool: "brst",
        version: env!("CARGO_PKG_VERSION"),
        config: &cfg,
        system: system.to_manifest(),
        solver: SolverInfo {
            scheme: "integrating-factor RK4, 2/3-rule dealiasing",
            steps,
            dt_effective: traj.dt,
            stability_limit: options.stability_limit,
            floor: options.floor,
        },
        outputs: ["trajectory.csv", "manifest.json", "report.json"],
    };
    std::fs::write(cfg.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;

    let checks = conservation_reports(&traj, &densities)?;
    for c in checks.iter().filter(|c| !c.passed()) {
        writeln!(err, "warning: drift above {:e}: {:?}", c.tolerance, c.metrics)?;
    }
    let report = RunReport {
        system: &system.name,
        times: traj.times(),
        diagnostics: traj.diagnostic_names.iter().map(|n| (n.clone(), traj.series(n).unwrap_or_default())).collect(),
        checks,
    };
    std::fs::write(cfg.out.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;

    writeln!(out, "{}: {} steps to t = {}, {} snapshots", system.name, steps, traj.last().t, traj.snapshots.len())?;
    for (name, series) in &report.diagnostics {
        if let (Some(first), Some(last)) = (series.first(), series.last()) {
            writeln!(out, "  {name}: {first:.12e} -> {last:.12e}")?;
        }
    }
    writeln!(out, "wrote trajectory.csv, manifest.json, report.json to {}", cfg.out.display())?;
    Ok(0)
}

fn run_verify(check: &str, dir: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let reports = if check == "all" { verify::run_all()? } else { verify::run_check(check)? };
    let json = serde_json::to_string_pretty(&reports)?;
    writeln!(out, "{json}")?;
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
        std::fs::write(d.join("report.json"), json + "\n")?;
    }
    Ok(if reports.iter().all(CheckReport::passed) { 0 } else { 1 })
}

fn miura(args: MiuraArgs, out: &mut dyn Write) -> Result<i32> {
    let (source, target, image) = match args.from.as_str() {
        "mkdv" => ("R", "u", miura_u_of_r("R")),
        "ckdv" => ("w", "v", v_of_w()),
        other => return Err(Error::arg(format!("--from must be mkdv or ckdv, got `{other}`"))),
    };
    let Some(expr) = args.expr else {
        let system = build_system(&args.from, &Default::default())?;
        let residual = match args.from.as_str() {
            "mkdv" => {
                image.dt_formal().sub(&image.mul(&image.dx()).scale_q(&crate::diffpoly::q(3))).sub(&image.dx_n(3))
            }
            _ => image
                .dt_formal()
                .sub(&image.dx_n(3))
                .add(&image.pow(2).mul(&image.dx()).scale_q(&crate::diffpoly::q(6))),
        };
        let target_eq = if target == "u" { "KdV" } else { "mKdV" };
        writeln!(out, "{target} = {image}")?;
        writeln!(out, "{target_eq} residual on {} solutions: {}", args.from, system.reduce_on_shell(&residual)?)?;
        return Ok(0);
    };
    let state = FieldState::new(args.length, args.n)?;
    let values = config::sample_expression(&expr, &state)?;
    let mapped = match args.from.as_str() {
        "mkdv" => miura_map(&values, args.length)?,
        _ => ckdv_to_mkdv(&values, args.length, SINGULARITY_THRESHOLD)?,
    };
    let mut text = format!("x,{source},{target}\n");
    for ((x, a), b) in state.grid().iter().zip(&values).zip(&mapped) {
        text.push_str(&format!("{x},{a:e},{b:e}\n"));
    }
    match args.out {
        Some(p) => std::fs::write(p, text)?,
        None => write!(out, "{text}")?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct DensityLine {
    name: String,
    kind: crate::DensityKind,
    density: String,
    conserved: bool,
}

fn conserved(args: SystemArgs, out: &mut dyn Write) -> Result<i32> {
    let system = load_system(args.system.as_deref(), args.params.as_deref(), args.system_file.as_deref())?;
    let mut lines = Vec::new();
    for d in &system.densities {
        let dt = system.reduce_on_shell(&d.density.dt_formal())?;
        let conserved = system.equations.iter().all(|e| variational_derivative(&dt, &e.field, e.odd).is_zero());
        lines.push(DensityLine { name: d.name.clone(), kind: d.kind, density: d.density.to_string(), conserved });
    }
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&lines)?)?;
    } else {
        for l in &lines {
            let kind = match l.kind {
                crate::DensityKind::Classical => "classical",
                crate::DensityKind::BrstInvariant => "brst-invariant",
            };
            let status = if l.conserved { "conserved" } else { "NOT conserved" };
            writeln!(out, "{:<4} {:<15} {:<13} {}", l.name, kind, status, l.density)?;
        }
    }
    Ok(if lines.iter().all(|l| l.conserved) { 0 } else { 1 })
}

fn euler(density: &str, field: &str, out: &mut dyn Write) -> Result<i32> {
    let d = parse(density)?;
    writeln!(out, "{}", euler_operator(&d, field)?)?;
    Ok(0)
}
