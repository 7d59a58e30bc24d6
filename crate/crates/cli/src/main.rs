use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ptspec::basis::auto_scale_gaussian;
use ptspec::trace::{CrossingEvent, ExceptionalPoint, SWEEP_SCAN_POINTS};
use ptspec::validate::{self, Fault, Options};
use ptspec::{detect_crossings, locate_eps, real_spectrum, sweep, Method, Model, PotentialSpec, SolverSettings, SpectralCurves, SweepConfig};

mod format;
mod svg;

use format::{fmt_sig, round_sig};

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "ptspec", version, about = "Real spectra and exceptional points of PT-symmetric wells")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Real eigenvalues at one value of V2, as JSON on standard output
    Spectrum(SpectrumArgs),
    /// Sweep V2 and write branch curves (CSV), exceptional points (JSON) and a plot (SVG)
    Sweep(SweepArgs),
    /// Sweep V2 and report the exceptional points as JSON
    Eps(ReportArgs),
    /// Sweep V2 and report real-to-real level crossings as JSON
    Crossings(ReportArgs),
    /// Run the self-check suite
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Potential: rect, scarf2, gaussian, quartic, sech or wigner-coulomb
    #[arg(long)]
    potential: Model,
    /// Depth V1 of the real well
    #[arg(long)]
    v1: f64,
    /// Half-width of the rectangular well
    #[arg(long)]
    a: Option<f64>,
    /// Solver: shooting, analytic, ho-basis or wc-pencil
    #[arg(long)]
    method: Method,
    /// Basis size for the matrix methods
    #[arg(long)]
    n_basis: Option<usize>,
    /// Basis length scale, or `auto` to pick it for the Gaussian well
    #[arg(long)]
    scale: Option<String>,
    /// Matching distance of the shooting method
    #[arg(long = "L")]
    length: Option<f64>,
    /// Integration step of the shooting method
    #[arg(long)]
    step: Option<f64>,
    /// Energy grid density of the root scans
    #[arg(long)]
    e_scan_points: Option<usize>,
    /// Leave the wall-clock timestamp out of the manifest
    #[arg(long)]
    reproducible: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Strength V2 of the imaginary part
    #[arg(long)]
    v2: f64,
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long)]
    v2_min: f64,
    #[arg(long)]
    v2_max: f64,
    /// Number of grid intervals
    #[arg(long)]
    steps: Option<usize>,
    /// Width of the final V2 bracket of each exceptional point
    #[arg(long)]
    ep_tol: Option<f64>,
    /// Largest energy jump linking roots at neighbouring grid points
    #[arg(long)]
    match_gap: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long)]
    out_csv: PathBuf,
    #[arg(long)]
    out_json: PathBuf,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    range: RangeArgs,
    /// Write the JSON here instead of standard output
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    GaussElement,
}

#[derive(Args)]
struct ValidateArgs {
    /// Reduced grids; skips the published exceptional-point sweeps
    #[arg(long)]
    fast: bool,
    #[arg(long, hide = true)]
    inject_fault: Option<FaultArg>,
}

/// Everything needed to rerun a command bit for bit.
#[derive(Debug, Clone, Serialize)]
struct RunManifest {
    command: String,
    arguments: Vec<String>,
    spec: PotentialSpec,
    method: Method,
    solver: SolverSettings,
    sweep: Option<SweepConfig>,
    /// Only present in the SVG, and absent there under `--reproducible`.
    timestamp: Option<String>,
    version: String,
    /// Settings that were not given on the command line, as resolved.
    defaults: BTreeMap<String, Value>,
}

impl RunManifest {
    fn to_value(&self) -> Value {
        round_json(serde_json::to_value(self).expect("manifest serializes"))
    }

    fn stamped(&self, reproducible: bool) -> Self {
        let mut m = self.clone();
        if !reproducible {
            m.timestamp = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
        }
        m
    }
}

/// Rounds every float in `v` to the output precision.
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            json!(round_sig(x))
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

struct Resolved {
    spec: PotentialSpec,
    solver: SolverSettings,
    defaults: BTreeMap<String, Value>,
}

fn resolve(args: &ModelArgs, v2: f64, sweeping: bool) -> Result<Resolved> {
    let mut defaults = BTreeMap::new();
    let mut spec = PotentialSpec::new(args.potential, args.v1, v2);
    match args.a {
        Some(a) => spec.a = a,
        None if args.potential == Model::Rect => {
            defaults.insert("a".into(), json!(spec.a));
        }
        None => {}
    }
    spec.validate()?;
    args.method.check(args.potential)?;

    let mut solver = SolverSettings::for_spec(&spec);
    if sweeping {
        solver.shooting.e_scan_points = SWEEP_SCAN_POINTS;
    }
    let matrix = matches!(args.method, Method::HoBasis | Method::WcPencil);
    let shooting = args.method == Method::Shooting;
    macro_rules! setting {
        ($arg:expr, $field:expr, $name:literal, $relevant:expr) => {
            match $arg {
                Some(v) => $field = v,
                None if $relevant => {
                    defaults.insert($name.into(), json!($field));
                }
                None => {}
            }
        };
    }
    setting!(args.n_basis, solver.basis.n_basis, "n_basis", matrix);
    setting!(args.length, solver.shooting.length, "L", shooting);
    setting!(args.step, solver.shooting.step, "step", shooting);
    setting!(args.e_scan_points, solver.shooting.e_scan_points, "e_scan_points", shooting);

    let auto = args.method == Method::HoBasis;
    solver.basis.scale = match args.scale.as_deref() {
        Some("auto") if auto => auto_scale_gaussian(spec.v1, solver.basis.n_basis),
        Some("auto") => bail!(ptspec::Error::Config("--scale auto applies only to the ho-basis method".into())),
        Some(s) => s
            .parse()
            .map_err(|_| ptspec::Error::Config(format!("--scale expects a number or `auto`, got `{s}`")))?,
        None if auto => auto_scale_gaussian(spec.v1, solver.basis.n_basis),
        None => 1.0,
    };
    if matrix && args.scale.is_none() {
        defaults.insert("scale".into(), json!(solver.basis.scale));
    }
    solver.shooting.validate()?;
    solver.basis.validate()?;
    Ok(Resolved { spec, solver, defaults })
}

fn sweep_config(r: &mut Resolved, method: Method, range: &RangeArgs) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::new(&r.spec, method, range.v2_min, range.v2_max).with_solver(r.solver);
    match range.steps {
        Some(s) => cfg.steps = s,
        None => {
            r.defaults.insert("steps".into(), json!(cfg.steps));
        }
    }
    match range.ep_tol {
        Some(t) => cfg.ep_tol_v2 = t,
        None => {
            r.defaults.insert("ep_tol".into(), json!(cfg.ep_tol_v2));
        }
    }
    cfg.match_gap = range.match_gap;
    cfg.validate(&r.spec)?;
    Ok(cfg)
}

fn manifest(command: &str, r: &Resolved, method: Method, sweep: Option<SweepConfig>) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        arguments: std::env::args().skip(1).collect(),
        spec: r.spec,
        method,
        solver: r.solver,
        sweep,
        timestamp: None,
        version: env!("CARGO_PKG_VERSION").to_string(),
        defaults: r.defaults.clone(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn emit_json(value: &Value, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) => write_file(p, &text),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn eps_json(eps: &[ExceptionalPoint]) -> Value {
    let list: Vec<Value> = eps
        .iter()
        .map(|e| {
            json!({
                "v2c": e.v2c,
                "e_c": e.e_c,
                "branches": [e.branch_pair.0, e.branch_pair.1],
                "bracket": [e.bracket.0, e.bracket.1],
                "ambiguous": e.ambiguous,
            })
        })
        .collect();
    round_json(Value::Array(list))
}

fn crossings_json(crossings: &[CrossingEvent]) -> Value {
    let list: Vec<Value> = crossings
        .iter()
        .map(|c| json!({"v2_star": c.v2_star, "e_star": c.e_star, "branches": [c.branch_pair.0, c.branch_pair.1]}))
        .collect();
    round_json(Value::Array(list))
}

fn exits_json(curves: &SpectralCurves) -> Value {
    let list: Vec<Value> = curves
        .exits
        .iter()
        .map(|x| json!({"branch": x.label, "interval": [x.interval.0, x.interval.1], "energy": x.energy}))
        .collect();
    round_json(Value::Array(list))
}

/// Long-format curve table sorted by `v2`, then branch label.
fn curves_csv(curves: &SpectralCurves) -> String {
    let mut rows: Vec<(f64, usize, f64)> = curves
        .branches
        .iter()
        .flat_map(|b| b.points.iter().map(move |&(v, e)| (v, b.label, e)))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = String::from("v2,branch_label,energy\n");
    for (v, l, e) in rows {
        out.push_str(&format!("{},{l},{}\n", fmt_sig(v), fmt_sig(e)));
    }
    out
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<()> {
    let r = resolve(&args.model, args.v2, false)?;
    let res = real_spectrum(&r.spec, args.model.method, &r.solver)?;
    let out = json!({
        "eigenvalues": round_json(json!(res.eigenvalues)),
        "residuals": round_json(json!(res.residuals)),
        "method": args.model.method,
        "manifest": manifest("spectrum", &r, args.model.method, None).to_value(),
    });
    emit_json(&out, None)
}

struct SweepRun {
    resolved: Resolved,
    cfg: SweepConfig,
    curves: SpectralCurves,
}

fn run_sweep(model: &ModelArgs, range: &RangeArgs) -> Result<SweepRun> {
    let mut resolved = resolve(model, range.v2_min, true)?;
    let cfg = sweep_config(&mut resolved, model.method, range)?;
    let curves = sweep(&resolved.spec, &cfg)?;
    for d in &curves.diagnostics {
        eprintln!("note: {d}");
    }
    Ok(SweepRun { resolved, cfg, curves })
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let run = run_sweep(&args.model, &args.range)?;
    let eps = locate_eps(&run.resolved.spec, &run.curves, &run.cfg)?;
    let crossings = detect_crossings(&run.curves);
    let m = manifest("sweep", &run.resolved, args.model.method, Some(run.cfg));
    write_file(&args.out_csv, &curves_csv(&run.curves))?;
    let out = json!({
        "eps": eps_json(&eps),
        "crossings": crossings_json(&crossings),
        "exits": exits_json(&run.curves),
        "diagnostics": run.curves.diagnostics,
        "manifest": m.to_value(),
    });
    emit_json(&out, Some(&args.out_json))?;
    if let Some(path) = &args.out_svg {
        let meta = serde_json::to_string(&m.stamped(args.model.reproducible).to_value())?;
        write_file(path, &svg::render(&run.curves, &eps, &meta))?;
    }
    Ok(())
}

fn cmd_eps(args: &ReportArgs) -> Result<()> {
    let run = run_sweep(&args.model, &args.range)?;
    let eps = locate_eps(&run.resolved.spec, &run.curves, &run.cfg)?;
    let out = json!({
        "eps": eps_json(&eps),
        "exits": exits_json(&run.curves),
        "manifest": manifest("eps", &run.resolved, args.model.method, Some(run.cfg)).to_value(),
    });
    emit_json(&out, args.out_json.as_deref())
}

fn cmd_crossings(args: &ReportArgs) -> Result<()> {
    let run = run_sweep(&args.model, &args.range)?;
    let out = json!({
        "crossings": crossings_json(&detect_crossings(&run.curves)),
        "manifest": manifest("crossings", &run.resolved, args.model.method, Some(run.cfg)).to_value(),
    });
    emit_json(&out, args.out_json.as_deref())
}

fn cmd_validate(args: &ValidateArgs) -> Result<bool> {
    let opts = Options {
        fast: args.fast,
        fault: args.inject_fault.map(|f| match f {
            FaultArg::GaussElement => Fault::GaussElement,
        }),
    };
    let t = std::time::Instant::now();
    let report = validate::run(opts, |c| {
        println!(
            "{:<4}  {:<28} {:>7.1}s  {}",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.seconds,
            c.detail
        );
    });
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    println!(
        "{} checks, {} failed, {:.1}s",
        report.checks.len(),
        failed.len(),
        t.elapsed().as_secs_f64()
    );
    for name in &failed {
        eprintln!("failed: {name}");
    }
    Ok(failed.is_empty())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<ptspec::Error>() {
        Some(ptspec::Error::NoConvergence { .. } | ptspec::Error::PencilDegenerate { .. } | ptspec::Error::Overflow { .. } | ptspec::Error::Inconsistent { .. }) => {
            EXIT_NUMERICAL
        }
        _ => EXIT_USAGE,
    }
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("PTSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| ptspec::Error::Config(format!("PTSPEC_THREADS must be a count, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a).map(|()| true),
        Command::Sweep(a) => cmd_sweep(a).map(|()| true),
        Command::Eps(a) => cmd_eps(a).map(|()| true),
        Command::Crossings(a) => cmd_crossings(a).map(|()| true),
        Command::Validate(a) => cmd_validate(a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VALIDATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
