//! Command-line frontend: `approximate`, `sweep`, `identity-curve`,
//! `young-check` and `eval`.
//!
//! Exit codes: 0 on success, 2 on usage errors (message on stderr), 1 on
//! runtime failures (JSON error document on stderr, carrying the partial
//! report when one exists).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixturecraft::analysis::{
    approximate_identity_curve, convergence_sweep, format_g17, young_inequality_check, SweepTarget,
};
use mixturecraft::constructor::{approximate_lp, approximate_uniform, BandwidthNorm};
use mixturecraft::{ApproxOptions, ApproxReport, BoxRegion, DensitySpec, Error, Mixture};
use serde_json::json;

/// Environment variable overriding the per-cell Gauss-Legendre order.
pub const QUAD_ORDER_ENV: &str = "MIXTURECRAFT_QUAD_ORDER";

#[derive(Parser, Debug)]
#[command(name = "mixturecraft", version, about = "Location-scale mixture approximation of densities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a mixture approximating the target within eps.
    Approximate(ApproximateArgs),
    /// Run the constructor over a list of (k, delta) settings and write a CSV table.
    Sweep(SweepArgs),
    /// Measure ||g_k * f - f|| for a list of k and write a CSV table.
    IdentityCurve(IdentityArgs),
    /// Compare ||f * g||_p with ||f||_p ||g||_1; prints JSON.
    YoungCheck(YoungArgs),
    /// Evaluate a mixture file at one point; prints the value.
    Eval(EvalArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Mode {
    Uniform,
    Lp,
}

#[derive(Args, Debug)]
struct Pair {
    /// Target density, e.g. `gaussian:0,1`.
    #[arg(long, allow_hyphen_values = true)]
    target: String,
    /// Kernel density, e.g. `gaussian:0,1`.
    #[arg(long, allow_hyphen_values = true)]
    kernel: String,
}

#[derive(Args, Debug)]
struct Tuning {
    #[arg(long, allow_hyphen_values = true)]
    margin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    #[arg(long = "max-components")]
    max_components: Option<usize>,
    #[arg(long = "mass-tail", allow_hyphen_values = true)]
    mass_tail: Option<f64>,
    /// Grid points per axis for sup-norm measurements.
    #[arg(long = "grid-points")]
    grid_points: Option<usize>,
    /// Construct relative to this point, e.g. the lower corner of K.
    #[arg(long, allow_hyphen_values = true)]
    anchor: Option<String>,
    /// Write zero for every elapsed time so output files are reproducible.
    #[arg(long = "no-timing")]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct ApproximateArgs {
    #[command(flatten)]
    pair: Pair,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Compact set for uniform mode: `lo,hi` or `lo_x,hi_x,lo_y,hi_y`.
    #[arg(long = "K", allow_hyphen_values = true)]
    k_box: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eps: f64,
    /// Mixture output file.
    #[arg(long)]
    out: PathBuf,
    /// Report output file.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    pair: Pair,
    #[arg(long = "K", allow_hyphen_values = true, conflicts_with = "p", required_unless_present = "p")]
    k_box: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Settings as `k:delta` pairs separated by commas, e.g. `4:0.2,8:0.05`.
    #[arg(long, allow_hyphen_values = true)]
    settings: String,
    /// CSV output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args, Debug)]
struct IdentityArgs {
    #[command(flatten)]
    pair: Pair,
    #[arg(long = "K", allow_hyphen_values = true, conflicts_with = "p", required_unless_present = "p")]
    k_box: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Increasing bandwidths, e.g. `1,2,4,8`.
    #[arg(long, allow_hyphen_values = true)]
    ks: String,
    #[arg(long = "grid-points")]
    grid_points: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "no-timing")]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct YoungArgs {
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    #[arg(long, allow_hyphen_values = true)]
    p: f64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    mixture: PathBuf,
    /// Point, comma separated in two dimensions.
    #[arg(long, allow_hyphen_values = true)]
    at: String,
}

enum Failure {
    Usage(String),
    Runtime(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Approximate(a) => approximate(a),
        Command::Sweep(a) => sweep(a),
        Command::IdentityCurve(a) => identity_curve(a),
        Command::YoungCheck(a) => young_check(a),
        Command::Eval(a) => eval(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{}", json!({ "error": "Io", "message": msg }));
            1
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("{}", error_json(&e));
            1
        }
    }
}

fn error_json(e: &Error) -> serde_json::Value {
    let mut doc = json!({ "error": e.kind(), "message": e.to_string() });
    match e {
        Error::ToleranceNotMet { report, .. } => doc["report"] = serde_json::to_value(report.as_ref()).unwrap_or_default(),
        Error::BudgetExceeded { budget, needed, delta } => {
            doc["budget"] = json!(budget);
            doc["needed"] = json!(needed);
            doc["delta"] = json!(delta);
        }
        Error::BandwidthNotFound { last_k, last_error } => {
            doc["last_k"] = json!(last_k);
            doc["last_error"] = json!(last_error);
        }
        _ => {}
    }
    doc
}

fn density(flag: &str, text: &str) -> std::result::Result<DensitySpec, Failure> {
    DensitySpec::parse(text).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn region(text: &str) -> std::result::Result<BoxRegion, Failure> {
    BoxRegion::parse(text).map_err(|e| Failure::Usage(format!("--K: {e}")))
}

fn numbers(flag: &str, text: &str) -> std::result::Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Failure::Usage(format!("--{flag}: `{s}` is not a number")))
        })
        .collect()
}

fn positive(flag: &str, v: f64) -> std::result::Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Usage(format!("--{flag} must be positive, got {v}")))
    }
}

fn exponent(p: f64) -> std::result::Result<f64, Failure> {
    if p >= 1.0 && p.is_finite() {
        Ok(p)
    } else {
        Err(Failure::Usage(format!("--p must lie in [1, inf), got {p}")))
    }
}

fn quad_order() -> std::result::Result<Option<usize>, Failure> {
    match std::env::var(QUAD_ORDER_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 2 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!("{QUAD_ORDER_ENV} must be an integer >= 2, got `{s}`"))),
        },
    }
}

fn options(t: &Tuning) -> std::result::Result<ApproxOptions, Failure> {
    let mut opts = ApproxOptions::default();
    if let Some(v) = t.margin {
        opts.margin = positive("margin", v)?;
    }
    if let Some(v) = t.tau {
        opts.tau = positive("tau", v)?;
    }
    if let Some(v) = t.max_components {
        opts.max_components = v;
    }
    if let Some(v) = t.mass_tail {
        opts.mass_tail = positive("mass-tail", v)?;
    }
    if let Some(v) = t.grid_points {
        if v < 2 {
            return Err(Failure::Usage("--grid-points must be at least 2".into()));
        }
        opts.grid_points = Some(v);
    }
    if let Some(a) = &t.anchor {
        opts.anchor = Some(numbers("anchor", a)?);
    }
    if let Some(order) = quad_order()? {
        opts.quad_order = order;
    }
    Ok(opts)
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn report_bytes(report: &ApproxReport) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
    out.push(b'\n');
    out
}

fn approximate(a: ApproximateArgs) -> Outcome {
    let eps = positive("eps", a.eps)?;
    let f = density("target", &a.pair.target)?;
    let g = density("kernel", &a.pair.kernel)?;
    let opts = options(&a.tuning)?;
    let result = match a.mode {
        Mode::Uniform => {
            let text = a.k_box.as_deref().ok_or_else(|| Failure::Usage("--K is required in uniform mode".into()))?;
            approximate_uniform(&f, &g, &region(text)?, eps, &opts)
        }
        Mode::Lp => {
            let p = exponent(a.p.ok_or_else(|| Failure::Usage("--p is required in lp mode".into()))?)?;
            approximate_lp(&f, &g, p, eps, &opts)
        }
    };
    let (mix, mut report) = match result {
        Ok(out) => out,
        Err(Error::ToleranceNotMet { measured, eps, mut report }) => {
            if a.tuning.no_timing {
                report.elapsed_s = 0.0;
            }
            return Err(Failure::Runtime(Error::ToleranceNotMet { measured, eps, report }));
        }
        Err(e) => return Err(e.into()),
    };
    if a.tuning.no_timing {
        report.elapsed_s = 0.0;
    }
    write_file(&a.out, &mix.to_json())?;
    if let Some(path) = &a.report {
        write_file(path, &report_bytes(&report))?;
    }
    Ok(())
}

fn settings(text: &str) -> std::result::Result<Vec<(f64, f64)>, Failure> {
    text.split(',')
        .map(|pair| {
            let bad = || Failure::Usage(format!("--settings: `{pair}` is not a k:delta pair"));
            let (k, d) = pair.split_once(':').ok_or_else(bad)?;
            let k = k.trim().parse::<f64>().map_err(|_| bad())?;
            let d = d.trim().parse::<f64>().map_err(|_| bad())?;
            Ok((k, d))
        })
        .collect()
}

fn sweep(a: SweepArgs) -> Outcome {
    let f = density("target", &a.pair.target)?;
    let g = density("kernel", &a.pair.kernel)?;
    let opts = options(&a.tuning)?;
    let target = match (&a.k_box, a.p) {
        (Some(text), _) => SweepTarget::Uniform(region(text)?),
        (None, Some(p)) => SweepTarget::Lp { p: exponent(p)? },
        (None, None) => return Err(Failure::Usage("one of --K or --p is required".into())),
    };
    let rows = settings(&a.settings)?;
    let mut table = convergence_sweep(&f, &g, &target, &rows, &opts)?;
    if a.tuning.no_timing {
        table.zero_timing();
    }
    write_or_print(a.out.as_deref(), &table.to_csv())
}

fn identity_curve(a: IdentityArgs) -> Outcome {
    let f = density("target", &a.pair.target)?;
    let g = density("kernel", &a.pair.kernel)?;
    let ks = numbers("ks", &a.ks)?;
    let norm = match (&a.k_box, a.p) {
        (Some(text), _) => {
            let points = a.grid_points.unwrap_or(if f.dim() == 1 { 2049 } else { 65 });
            let grid = region(text)?.grid(points).map_err(|e| Failure::Usage(format!("--grid-points: {e}")))?;
            BandwidthNorm::Sup(grid)
        }
        (None, Some(p)) => BandwidthNorm::Lp { p: exponent(p)? },
        (None, None) => return Err(Failure::Usage("one of --K or --p is required".into())),
    };
    let mut table = approximate_identity_curve(&f, &g, &norm, &ks)?;
    if a.no_timing {
        table.zero_timing();
    }
    write_or_print(a.out.as_deref(), &table.to_csv())
}

fn young_check(a: YoungArgs) -> Outcome {
    let f = density("f", &a.f)?;
    let g = density("g", &a.g)?;
    let p = exponent(a.p)?;
    let check = young_inequality_check(&f, &g, p)?;
    println!(
        "{}",
        json!({ "lhs": check.lhs, "rhs": check.rhs, "holds": check.holds })
    );
    Ok(())
}

fn eval(a: EvalArgs) -> Outcome {
    let x = numbers("at", &a.at)?;
    let bytes = fs::read(&a.mixture).map_err(|e| Failure::Io(format!("{}: {e}", a.mixture.display())))?;
    let mix = Mixture::from_json(&bytes)?;
    let v = mix.eval(&x)?;
    println!("{}", format_g17(v));
    Ok(())
}
