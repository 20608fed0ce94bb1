//! Command-line front end. The binary only forwards to [`run_cli`].

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{
    bernstein_tail, bound_at_confidence, chaining_depth, hoeffding_tail, inverse_discrepancy_bound,
    min_coefficient, side_condition, side_condition_1d, success_probability, BoundConstants,
    Precision, TailQuery,
};
use crate::covers::{
    build_cover_1d, build_cover_grid, build_cover_trimmed, cover_cardinality_bound, verify_cover,
};
use crate::discrepancy::estimate;
use crate::error::{Error, Result};
use crate::experiments::{box_difference_family, run, ExperimentConfig, OutputFormat, Study};
use crate::negdep::{dependence_report, Evaluation};
use crate::pointset::PointSet;
use crate::samplers::{sample, SampleSpec, SamplerKind};

/// Exit status when every checked verdict passed.
pub const EXIT_OK: i32 = 0;
/// Exit status for invalid arguments and runtime errors.
pub const EXIT_USAGE: i32 = 1;
/// Exit status when a study or check produced a failing verdict.
pub const EXIT_VERDICT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "negdep-qmc",
    version,
    about = "Latin hypercube sampling, star discrepancy and negative dependence tools"
)]
struct Cli {
    /// Base seed of the random streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one point set (text format with csv, JSON otherwise).
    Sample(SampleArgs),
    /// Star discrepancy of a point set file.
    Discrepancy(DiscrepancyArgs),
    /// Build and optionally verify a δ-cover.
    Cover(CoverArgs),
    /// Dependence ratios of box-difference indicators.
    Negdep(NegdepArgs),
    /// Evaluate tail bounds and discrepancy-bound constants.
    Bounds(BoundsArgs),
    /// Run a batch study.
    Study(StudyArgs),
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, default_value = "lhs")]
    kind: SamplerKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Stratified coordinates for padded samples (default: d).
    #[arg(long)]
    dlhs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    trial: u64,
}

#[derive(Debug, Args)]
struct DiscrepancyArgs {
    /// Point set in the text format written by `sample`.
    #[arg(long)]
    input: PathBuf,
    /// Use a grid δ-cover instead of the exact computation.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Debug, Args)]
struct CoverArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    delta: f64,
    /// Drop the grid points strictly inside the region `vol <= δ`.
    #[arg(long)]
    trimmed: bool,
    /// Check the bracketing property.
    #[arg(long)]
    verify: bool,
    /// Random probes in addition to the exhaustive cell sweep.
    #[arg(long, default_value_t = 1000)]
    probes: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NegdepMethod {
    Exact,
    Mc,
}

#[derive(Debug, Args)]
struct NegdepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Stratified coordinates (default: d).
    #[arg(long)]
    dlhs: Option<usize>,
    /// Sampler kind; inferred from --dlhs when omitted.
    #[arg(long)]
    kind: Option<SamplerKind>,
    /// Corner values per axis spanning the family of box differences.
    #[arg(long, value_delimiter = ',', default_value = "0,0.15,0.5,0.85")]
    corners: Vec<f64>,
    #[arg(long, value_enum, default_value_t = NegdepMethod::Exact)]
    method: NegdepMethod,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundsMode {
    Tail,
    Success,
    Confidence,
    Inverse,
    Constants,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    mode: BoundsMode,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    sigma2: f64,
    /// Recompute the coefficients instead of using the rounded table values.
    #[arg(long)]
    full_precision: bool,
}

#[derive(Debug, Args)]
struct StudyArgs {
    #[arg(long)]
    study: Study,
    #[arg(long, default_value = "lhs")]
    kind: SamplerKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    dlhs: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Coefficients `c` of a success study.
    #[arg(long, value_delimiter = ',')]
    c: Vec<f64>,
    /// Deviations `t` of a tail study.
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    /// Cover resolution of a sandwich study.
    #[arg(long)]
    delta: Option<f64>,
    /// Tail region: anchored cube of this volume (default 0.5).
    #[arg(long)]
    lambda: Option<f64>,
    /// Corner values of a negdep study.
    #[arg(long, value_delimiter = ',')]
    corners: Vec<f64>,
    /// Record wall-clock seconds (outputs are then no longer reproducible).
    #[arg(long)]
    timing: bool,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok((text, passed)) => match write_output(&cli, &text) {
            Ok(()) if passed => EXIT_OK,
            Ok(()) => EXIT_VERDICT,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn write_output(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn pretty(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("json values always serialize");
    s.push('\n');
    s
}

/// Output text and whether every checked verdict passed.
fn execute(cli: &Cli) -> Result<(String, bool)> {
    match &cli.command {
        Command::Sample(a) => {
            let spec = SampleSpec::of_kind(a.kind, a.n, a.d, a.dlhs.unwrap_or(a.d), cli.seed)
                .with_trial(a.trial);
            let points = sample(&spec)?;
            let text = match cli.format {
                Format::Csv => points.to_text(),
                Format::Json => pretty(serde_json::to_value(&points).map_err(json_err)?),
            };
            Ok((text, true))
        }
        Command::Discrepancy(a) => {
            let points = PointSet::read(&a.input)?;
            let cover = match a.delta {
                None => None,
                Some(delta) if points.dim() == 1 => Some(build_cover_1d(delta)?),
                Some(delta) => Some(build_cover_grid(points.dim(), delta)?),
            };
            let est = estimate(&points, cover.as_ref())?;
            Ok((pretty(serde_json::to_value(&est).map_err(json_err)?), true))
        }
        Command::Cover(a) => {
            let cover = if a.d == 1 {
                build_cover_1d(a.delta)?
            } else if a.trimmed {
                build_cover_trimmed(a.d, a.delta)?
            } else {
                build_cover_grid(a.d, a.delta)?
            };
            let verdict = a.verify.then(|| verify_cover(&cover, a.probes, cli.seed));
            let passed = verdict.as_ref().is_none_or(|v| v.is_valid());
            let value = json!({
                "d": a.d,
                "delta": a.delta,
                "size": cover.len(),
                "cardinality_bound": cover_cardinality_bound(a.d, a.delta),
                "cover": cover.points(),
                "verification": verdict,
            });
            Ok((pretty(value), passed))
        }
        Command::Negdep(a) => {
            let d_lhs = a.dlhs.unwrap_or(a.d);
            let kind = a.kind.unwrap_or(match d_lhs {
                0 => SamplerKind::MonteCarlo,
                l if l == a.d => SamplerKind::Lhs,
                _ => SamplerKind::PaddedLhs,
            });
            let spec = SampleSpec::of_kind(kind, a.n, a.d, d_lhs, cli.seed);
            let family = box_difference_family(a.d, &a.corners)?;
            let evaluation = match a.method {
                NegdepMethod::Exact => Evaluation::Exact,
                NegdepMethod::Mc => Evaluation::MonteCarlo { trials: a.trials },
            };
            let report = dependence_report(&spec, &family, evaluation)?;
            let passed = report.holds;
            let mut value = serde_json::to_value(&report).map_err(json_err)?;
            value["rho_hat"] = json!(report.rho_hat());
            Ok((pretty(value), passed))
        }
        Command::Bounds(a) => bounds(a).map(|v| (pretty(v), true)),
        Command::Study(a) => {
            let spec = SampleSpec::of_kind(a.kind, a.n, a.d, a.dlhs.unwrap_or(a.d), cli.seed);
            let thresholds = match a.study {
                Study::SuccessProb => a.c.clone(),
                Study::Tail => a.t.clone(),
                _ => Vec::new(),
            };
            let mut cfg = ExperimentConfig::new(a.study, spec, a.trials)
                .with_thresholds(thresholds)
                .with_corners(a.corners.clone())
                .with_timing(a.timing);
            if let Some(delta) = a.delta {
                cfg = cfg.with_delta(delta);
            }
            if let Some(lambda) = a.lambda {
                if !(lambda > 0.0 && lambda < 1.0) {
                    return Err(Error::invalid(format!(
                        "lambda must lie in (0,1), got {lambda}"
                    )));
                }
                let side = lambda.powf(1.0 / a.d as f64);
                cfg = cfg.with_region(crate::discrepancy::BoxDifference::anchored(vec![
                    side;
                    a.d
                ])?);
            }
            let result = run(&cfg)?;
            Ok((result.render(cli.format.into())?, result.all_pass()))
        }
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::invalid(format!("json encoding failed: {e}"))
}

fn need<T: Copy>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::invalid(format!("--{flag} is required for this mode")))
}

fn bounds(a: &BoundsArgs) -> Result<serde_json::Value> {
    let k = BoundConstants::with_precision(if a.full_precision {
        Precision::Full
    } else {
        Precision::Published
    });
    let result = match a.mode {
        BoundsMode::Tail => {
            let q = TailQuery::new(need(a.n, "n")?, a.gamma, need(a.t, "t")?).with_sigma2(a.sigma2);
            q.validate()?;
            json!({ "hoeffding": hoeffding_tail(&q), "bernstein": bernstein_tail(&q) })
        }
        BoundsMode::Success => {
            let c = need(a.c, "c")?;
            json!({
                "success_probability": success_probability(c, a.d, a.rho, &k)?,
                "min_coefficient": min_coefficient(a.rho, &k)?,
            })
        }
        BoundsMode::Confidence => {
            let n = need(a.n, "n")?;
            json!({
                "bound": bound_at_confidence(n, a.d, a.rho, need(a.q, "q")?, &k)?,
                "chaining_depth": chaining_depth(n, a.d, a.rho, &k)?,
            })
        }
        BoundsMode::Inverse => json!({
            "n": inverse_discrepancy_bound(need(a.eps, "eps")?, a.d, a.rho, &k)?,
        }),
        BoundsMode::Constants => {
            let side = if a.d == 1 {
                side_condition_1d(a.rho, &k)
            } else {
                side_condition(a.d, a.rho, &k)
            };
            json!({
                "constants": k,
                "c0": k.c0(a.rho),
                "discrepancy_coefficient": k.discrepancy_coefficient(a.rho),
                "side_condition": side,
            })
        }
    };
    Ok(json!({
        "input": {
            "mode": format!("{:?}", a.mode).to_ascii_lowercase(),
            "n": a.n, "d": a.d, "rho": a.rho, "gamma": a.gamma, "c": a.c,
            "q": a.q, "eps": a.eps, "t": a.t, "sigma2": a.sigma2,
            "precision": k.precision,
        },
        "result": result,
    }))
}
