//! The `fracgeo` command line: evaluations, continuation runs and the
//! verification suites, written as CSV or JSON tables.

mod doc;
mod suites;
mod table;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::FracError;
use crate::geometry::Lattice;
use crate::nmc::{classical_limit_check, extrapolate_to_one, nmc_boundary_batch};
use crate::perimeter::frac_perimeter;
use crate::quadrature::{FracOrder, QuadSpec};
use crate::solver::{bifurcation_radius, lattice_correction, resume_continuation, BranchPoint};

pub use doc::SurfaceDoc;
pub use suites::{random_field, verify_suites, SuiteEntry, SUITES};
pub use table::{write_atomic, Cell, Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const DEFAULT_ALPHAS: [f64; 5] = [0.9, 0.92, 0.94, 0.96, 0.98];

#[derive(Debug, Parser)]
#[command(name = "fracgeo", version, about = "Nonlocal mean curvature and fractional perimeter tables")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// JSON surface document.
    #[arg(long, global = true)]
    pub surface: Option<PathBuf>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Number of evaluation points on the surface.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true)]
    pub quad_rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub trunc_radius: Option<f64>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Nonlocal mean curvature at sample points of the surface.
    Nmc,
    /// Fractional perimeter of the region bounded by the surface.
    Perimeter,
    /// Normalized curvature as alpha -> 1, with the extrapolated limit.
    Limit {
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
    },
    /// Unduloid branch from the bifurcating cylinder.
    Branch {
        /// Target amplitude as a fraction of the bifurcation radius.
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        a_max: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 16)]
        modes: usize,
        /// Resume from, and keep updating, this JSON file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Corrections of a row of spheres at several spacings.
    Lattice {
        #[arg(long, value_delimiter = ',', default_value = "8,12,16")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 8)]
        degree: usize,
    },
    /// Runs the named verification suite, or all of them.
    Verify {
        #[arg(long)]
        suite: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Nmc => "nmc",
            Command::Perimeter => "perimeter",
            Command::Limit { .. } => "limit",
            Command::Branch { .. } => "branch",
            Command::Lattice { .. } => "lattice",
            Command::Verify { .. } => "verify",
        }
    }

    fn wants_precise(&self) -> bool {
        matches!(self, Command::Branch { .. } | Command::Lattice { .. })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadOverrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub trunc_radius: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub surface: Option<SurfaceDoc>,
    pub alpha: Option<f64>,
    pub dim: Option<usize>,
    pub points: Option<usize>,
    pub quad: Option<QuadOverrides>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

/// Effective values after flags, config file and defaults are merged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub command: String,
    pub surface: SurfaceDoc,
    pub alpha: f64,
    pub dim: usize,
    pub points: usize,
    pub quad: QuadSpec,
    pub format: Format,
    pub seed: u64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Io(String),
    Compute { operation: String, error: FracError, inputs: Value },
}

impl Failure {
    fn compute(operation: &str, inputs: Value) -> impl FnOnce(FracError) -> Failure + '_ {
        move |error| Failure::Compute {
            operation: operation.to_string(),
            error,
            inputs,
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn surface_dim(doc: &SurfaceDoc) -> Option<usize> {
    match doc {
        SurfaceDoc::Sphere { center, .. } => Some(center.len()),
        SurfaceDoc::Hyperplane { point, .. } => Some(point.len()),
        SurfaceDoc::Cylinder { dim, .. } => Some(*dim),
        SurfaceDoc::Ellipse { .. } | SurfaceDoc::Star { .. } => Some(2),
        SurfaceDoc::Union { parts } => parts.first().and_then(surface_dim),
    }
}

/// Merges flags over the config file over defaults and validates the result.
fn settings(g: &GlobalArgs, cmd: &Command) -> Result<Settings, Failure> {
    let cfg: ConfigFile = match &g.config {
        Some(p) => read_json(p)?,
        None => ConfigFile::default(),
    };
    let surface_doc = match &g.surface {
        Some(p) => Some(read_json::<SurfaceDoc>(p)?),
        None => cfg.surface,
    };
    let dim = g.dim.or(cfg.dim).or_else(|| surface_doc.as_ref().and_then(surface_dim)).unwrap_or(2);
    let surface = surface_doc.unwrap_or_else(|| SurfaceDoc::unit_sphere(dim));
    if surface_dim(&surface) != Some(dim) {
        return Err(Failure::Invalid(format!("surface dimension does not match dim = {dim}")));
    }
    let mut quad = if cmd.wants_precise() { QuadSpec::precise() } else { QuadSpec::default() };
    let o = cfg.quad.unwrap_or_default();
    if let Some(v) = g.quad_rel_tol.or(o.rel_tol) {
        quad.rel_tol = v;
    }
    if let Some(v) = o.abs_tol {
        quad.abs_tol = v;
    }
    if let Some(v) = g.trunc_radius.or(o.trunc_radius) {
        quad.trunc_radius = v;
    }
    if let Some(v) = o.max_subdivisions {
        quad.max_subdivisions = v;
    }
    let s = Settings {
        command: cmd.name().to_string(),
        surface,
        alpha: g.alpha.or(cfg.alpha).unwrap_or(0.5),
        dim,
        points: g.points.or(cfg.points).unwrap_or(32),
        quad,
        format: g.format.or(cfg.format).unwrap_or(Format::Csv),
        seed: g.seed.or(cfg.seed).unwrap_or(0),
        output: g.output.clone().or(cfg.output),
    };
    let invalid = |e: FracError| Failure::Invalid(e.to_string());
    s.quad.validate().map_err(invalid)?;
    FracOrder::new(s.dim, s.alpha).map_err(invalid)?;
    if s.points == 0 {
        return Err(Failure::Invalid("points must be positive".into()));
    }
    Ok(s)
}

fn fo(s: &Settings) -> FracOrder {
    FracOrder::new(s.dim, s.alpha).expect("validated in settings")
}

fn nmc_table(s: &Settings) -> Result<(Table, Value), Failure> {
    let surf = s.surface.to_surface().map_err(|e| Failure::Invalid(e.to_string()))?;
    let pts = surf.sample_points(s.points);
    let mut t = Table::new(
        std::iter::once("point".to_string())
            .chain((0..s.dim).map(|i| format!("x{i}")))
            .chain(["nmc", "quad_err", "tail_err"].map(String::from)),
    );
    for (i, (x, r)) in pts.iter().zip(nmc_boundary_batch(&surf, &pts, &fo(s), &s.quad)).enumerate() {
        let r = r.map_err(Failure::compute("nmc_boundary", json!({ "point": x })))?;
        let mut row = vec![Cell::from(i)];
        row.extend(x.iter().map(|&v| Cell::from(v)));
        row.extend([r.value, r.quad_err, r.tail_err].map(Cell::from));
        t.push(row);
    }
    Ok((t, json!({})))
}

fn perimeter_table(s: &Settings) -> Result<(Table, Value), Failure> {
    let surf = s.surface.to_surface().map_err(|e| Failure::Invalid(e.to_string()))?;
    let p = frac_perimeter(&surf.to_region(), &fo(s), &s.quad).map_err(Failure::compute("frac_perimeter", json!({})))?;
    let mut t = Table::new(["term", "value", "quad_err", "tail_err"]);
    let mut push = |name: &str, r: &crate::EvalResult| t.push(vec![name.into(), r.value.into(), r.quad_err.into(), r.tail_err.into()]);
    push("total", &p.total);
    if let Some(terms) = &p.terms {
        for (name, r) in ["inside", "inside_outside", "outside_inside"].iter().zip(terms) {
            push(name, r);
        }
    }
    Ok((t, json!({})))
}

fn limit_table(s: &Settings, alphas: &[f64]) -> Result<(Table, Value), Failure> {
    let surf = s.surface.to_surface().map_err(|e| Failure::Invalid(e.to_string()))?;
    let x = surf
        .sample_points(1)
        .pop()
        .ok_or_else(|| Failure::Invalid("surface has no sample point".into()))?;
    let inputs = json!({ "point": x, "alphas": alphas });
    let v = classical_limit_check(&surf, &x, alphas, &s.quad).map_err(Failure::compute("classical_limit_check", inputs.clone()))?;
    let lim = extrapolate_to_one(alphas, &v).map_err(Failure::compute("extrapolate_to_one", inputs))?;
    let mut t = Table::new(["alpha", "normalized_nmc"]);
    for (a, h) in alphas.iter().zip(&v) {
        t.push(vec![(*a).into(), (*h).into()]);
    }
    t.push(vec![1.0.into(), lim.into()]);
    Ok((t, json!({ "alphas": alphas, "point": x })))
}

/// Checkpoint of a branch run, rewritten after every accepted point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchCheckpoint {
    pub alpha: f64,
    pub radius: f64,
    pub a_target: f64,
    pub steps: usize,
    pub modes: usize,
    pub points: Vec<BranchPoint>,
}

fn branch_table(s: &Settings, a_max: f64, steps: usize, modes: usize, checkpoint: Option<&Path>) -> Result<(Table, Value), Failure> {
    let fo = fo(s);
    let previous: Option<BranchCheckpoint> = match checkpoint {
        Some(p) if p.exists() => Some(read_json(p)?),
        _ => None,
    };
    let radius = match &previous {
        Some(c) => c.radius,
        None => bifurcation_radius(&fo, &s.quad).map_err(Failure::compute("bifurcation_radius", json!({})))?,
    };
    let a_target = a_max * radius;
    let mut state = BranchCheckpoint {
        alpha: s.alpha,
        radius,
        a_target,
        steps,
        modes,
        points: Vec::new(),
    };
    if let Some(c) = previous {
        if (c.alpha, c.a_target, c.steps, c.modes) != (s.alpha, a_target, steps, modes) {
            return Err(Failure::Invalid("checkpoint belongs to a different run".into()));
        }
        state.points = c.points;
    }
    let done = state.points.clone();
    let mut io_error = None;
    let mut save = |p: &BranchPoint| -> crate::Result<()> {
        if let Some(path) = checkpoint {
            state.points.push(p.clone());
            let text = serde_json::to_string_pretty(&state).unwrap_or_default();
            if let Err(e) = write_atomic(path, &text) {
                io_error = Some(format!("{}: {e}", path.display()));
                return Err(FracError::InvalidParameter("checkpoint write failed".into()));
            }
        }
        Ok(())
    };
    let inputs = json!({ "radius": radius, "a_target": a_target, "steps": steps, "modes": modes });
    let branch = resume_continuation(radius, &done, a_target, steps, &fo, &s.quad, modes, &mut save);
    if let Some(e) = io_error {
        return Err(Failure::Io(e));
    }
    let branch = branch.map_err(Failure::compute("unduloid_continuation", inputs))?;
    let mut t = Table::new(
        ["a", "lambda", "residual", "nmc", "v_norm"]
            .map(String::from)
            .into_iter()
            .chain((0..=modes).map(|i| format!("c{i}"))),
    );
    for p in &branch {
        let mut row: Vec<Cell> = [p.amplitude, p.lambda, p.residual, p.nmc, p.v_norm()].map(Cell::from).to_vec();
        row.extend(p.profile.coefficients().iter().map(|&c| Cell::from(c)));
        t.push(row);
    }
    Ok((t, json!({ "a_max": a_max, "bifurcation_radius": radius, "steps": steps, "modes": modes })))
}

fn lattice_table(s: &Settings, radii: &[f64], degree: usize) -> Result<(Table, Value), Failure> {
    let fo = fo(s);
    let lattice = Lattice::axis(s.dim, 1.0).map_err(|e| Failure::Invalid(e.to_string()))?;
    let mut t = Table::new(
        ["r", "mean", "h_target", "residual", "iterations"]
            .map(String::from)
            .into_iter()
            .chain((0..=degree / 2).map(|j| format!("c{}", 2 * j))),
    );
    for &r in radii {
        let c = lattice_correction(&lattice, r, &fo, &s.quad, degree)
            .map_err(Failure::compute("lattice_correction", json!({ "r": r, "degree": degree })))?;
        let mut row: Vec<Cell> = vec![r.into(), c.phi.mean().into(), c.h_target.into(), c.residual.into(), c.iterations.into()];
        row.extend(c.phi.coefficients().iter().map(|&v| Cell::from(v)));
        t.push(row);
    }
    Ok((t, json!({ "radii": radii, "degree": degree, "lattice": "axis" })))
}

fn verify_table(s: &Settings, suite: Option<&str>) -> Result<(Table, Value), Failure> {
    let entries = verify_suites(suite, s.alpha, s.seed, &s.quad).map_err(|e| Failure::Invalid(e.to_string()))?;
    let mut t = Table::new(["suite", "property", "measured", "tolerance", "pass"]);
    for e in &entries {
        let pass = if e.pass { "true" } else { "false" };
        t.push(vec![e.suite.as_str().into(), e.property.as_str().into(), e.measured.into(), e.tolerance.into(), pass.into()]);
    }
    let failed = entries.iter().filter(|e| !e.pass).count();
    Ok((t, json!({ "suite": suite.unwrap_or(""), "failed": failed })))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("FRACGEO_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Invalid(format!("FRACGEO_THREADS must be a positive integer, got {v:?}")))?;
    // a pool that already exists is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn execute(cli: &Cli) -> Result<Settings, (Option<Settings>, Failure)> {
    configure_threads().map_err(|f| (None, f))?;
    let s = settings(&cli.global, &cli.command).map_err(|f| (None, f))?;
    let result = match &cli.command {
        Command::Nmc => nmc_table(&s),
        Command::Perimeter => perimeter_table(&s),
        Command::Limit { alphas } => limit_table(&s, alphas.as_deref().unwrap_or(&DEFAULT_ALPHAS)),
        Command::Branch {
            a_max,
            steps,
            modes,
            checkpoint,
        } => branch_table(&s, *a_max, *steps, *modes, checkpoint.as_deref()),
        Command::Lattice { radii, degree } => lattice_table(&s, radii, *degree),
        Command::Verify { suite } => verify_table(&s, suite.as_deref()),
    };
    let (table, extra) = result.map_err(|f| (Some(s.clone()), f))?;
    let metadata = json!({ "settings": s, "command_args": extra });
    let text = table.render(s.format, &metadata);
    match &s.output {
        Some(path) => {
            let io = |e: std::io::Error| (Some(s.clone()), Failure::Io(format!("{}: {e}", path.display())));
            write_atomic(path, &text).map_err(io)?;
            if s.format == Format::Csv {
                let meta = serde_json::to_string_pretty(&metadata).unwrap_or_default() + "\n";
                write_atomic(&sidecar(path, ".meta.json"), &meta).map_err(io)?;
            }
        }
        None => print!("{text}"),
    }
    Ok(s)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(_) => EXIT_OK,
        Err((_, Failure::Invalid(m))) => {
            eprintln!("error: {m}");
            EXIT_INVALID
        }
        Err((_, Failure::Io(m))) => {
            eprintln!("error: {m}");
            EXIT_IO
        }
        Err((s, Failure::Compute { operation, error, inputs })) => {
            if !error.is_numerical() {
                eprintln!("error: {operation}: {error}");
                return EXIT_INVALID;
            }
            let diag = json!({
                "operation": operation,
                "error": error.to_string(),
                "inputs": inputs,
                "settings": s,
            });
            let text = serde_json::to_string_pretty(&diag).unwrap_or_default() + "\n";
            eprint!("{text}");
            if let Some(path) = s.as_ref().and_then(|s| s.output.as_ref()) {
                let _ = write_atomic(&sidecar(path, ".diagnostic.json"), &text);
            }
            EXIT_NUMERICAL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("fracgeo").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_config_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, r#"{"alpha":0.3,"points":5,"quad":{"rel_tol":1e-5},"seed":9}"#).unwrap();
        let cli = parse(&["nmc", "--config", cfg.to_str().unwrap(), "--alpha", "0.7"]);
        let s = settings(&cli.global, &cli.command).unwrap();
        assert_eq!(s.alpha, 0.7);
        assert_eq!(s.points, 5);
        assert_eq!(s.seed, 9);
        assert_eq!(s.quad.rel_tol, 1e-5);
        assert_eq!(s.dim, 2);
        assert_eq!(s.format, Format::Csv);
        let b = parse(&["branch"]);
        assert_eq!(settings(&b.global, &b.command).unwrap().quad, QuadSpec::precise());
    }

    #[test]
    fn strict_config_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, r#"{"alpha":0.3,"colour":"red"}"#).unwrap();
        let cli = parse(&["nmc", "--config", cfg.to_str().unwrap()]);
        assert!(matches!(settings(&cli.global, &cli.command), Err(Failure::Invalid(_))));
        for bad in ["--alpha=1.5", "--points=0", "--quad-rel-tol=-1"] {
            let cli = parse(&["nmc", bad]);
            assert!(matches!(settings(&cli.global, &cli.command), Err(Failure::Invalid(_))), "{bad:?}");
        }
        let cli = parse(&["nmc", "--dim", "3"]);
        assert_eq!(settings(&cli.global, &cli.command).unwrap().surface, SurfaceDoc::unit_sphere(3));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["fracgeo", "--alpha", "2", "nmc"]), EXIT_INVALID);
        assert_eq!(run(["fracgeo", "frobnicate"]), EXIT_INVALID);
        assert_eq!(run(["fracgeo", "verify", "--suite", "nope"]), EXIT_INVALID);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("h.csv");
        let code = run(["fracgeo", "nmc", "--points", "4", "--output", out.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
        let csv = std::fs::read_to_string(&out).unwrap();
        assert_eq!(csv.lines().next(), Some("point,x0,x1,nmc,quad_err,tail_err"));
        assert_eq!(csv.lines().count(), 5);
        let meta: Value = serde_json::from_str(&std::fs::read_to_string(sidecar(&out, ".meta.json")).unwrap()).unwrap();
        assert_eq!(meta["settings"]["alpha"], 0.5);
        // a subdivision budget of one cell cannot be met
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, r#"{"quad":{"max_subdivisions":1,"rel_tol":1e-12}}"#).unwrap();
        let fail = dir.path().join("f.csv");
        let code = run(["fracgeo", "perimeter", "--config", cfg.to_str().unwrap(), "--output", fail.to_str().unwrap()]);
        assert_eq!(code, EXIT_NUMERICAL);
        assert!(!fail.exists());
        let diag: Value = serde_json::from_str(&std::fs::read_to_string(sidecar(&fail, ".diagnostic.json")).unwrap()).unwrap();
        assert_eq!(diag["operation"], "frac_perimeter");
    }
}
