//! Reproducible batch studies and their CSV / JSON output.
//!
//! Every trial `t` draws its point set from substream `t` of the configured
//! seed, so results do not depend on the number of worker threads. Trials run
//! on the rayon pool and are reduced in trial order.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    bernstein_tail, hoeffding_tail, success_probability, BoundConstants, TailQuery,
};
use crate::covers::{build_cover_1d, build_cover_grid};
use crate::discrepancy::{
    star_discrepancy_1d, star_discrepancy_cover, star_discrepancy_exact, BoxDifference, TestSet,
};
use crate::error::{Error, Result};
use crate::negdep::{dependence_report, gamma_for_boxdiff, Evaluation, DEFAULT_PERMUTATION_BUDGET};
use crate::samplers::{sample, SampleSpec, SamplerKind};

pub const CSV_HEADER: &str =
    "study,kind,n,d,d_lhs,seed,trials,threshold,empirical,stderr,theoretical,verdict,seconds";

/// Slack allowed when comparing two floating evaluations of the same
/// discrepancy in the sandwich study.
const SANDWICH_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    SuccessProb,
    Tail,
    Negdep,
    Projection,
    CoverSandwich,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::SuccessProb => "success_prob",
            Study::Tail => "tail",
            Study::Negdep => "negdep",
            Study::Projection => "projection",
            Study::CoverSandwich => "cover_sandwich",
        }
    }
}

impl FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "success_prob" | "success" => Ok(Study::SuccessProb),
            "tail" => Ok(Study::Tail),
            "negdep" => Ok(Study::Negdep),
            "projection" => Ok(Study::Projection),
            "cover_sandwich" | "sandwich" => Ok(Study::CoverSandwich),
            other => Err(Error::invalid(format!("unknown study '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub study: Study,
    /// Template; the trial field is overwritten per trial.
    pub spec: SampleSpec,
    pub trials: u64,
    /// `c` values for success studies, `t` values for tail studies.
    pub thresholds: Vec<f64>,
    /// Test region of tail studies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<BoxDifference>,
    /// Corner values per axis spanning the negdep family.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corners: Vec<f64>,
    /// Cover resolution of the sandwich study.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Record wall-clock seconds. Off by default so equal configurations
    /// produce byte-identical files.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(study: Study, spec: SampleSpec, trials: u64) -> Self {
        ExperimentConfig {
            study,
            spec,
            trials,
            thresholds: Vec::new(),
            region: None,
            corners: Vec::new(),
            delta: None,
            record_timing: false,
        }
    }

    pub fn with_thresholds(mut self, thresholds: Vec<f64>) -> Self {
        self.thresholds = thresholds;
        self
    }

    pub fn with_region(mut self, region: BoxDifference) -> Self {
        self.region = Some(region);
        self
    }

    pub fn with_corners(mut self, corners: Vec<f64>) -> Self {
        self.corners = corners;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_timing(mut self, on: bool) -> Self {
        self.record_timing = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if matches!(self.study, Study::SuccessProb | Study::Tail) && self.thresholds.is_empty() {
            return Err(Error::invalid(format!(
                "the {} study needs at least one threshold",
                self.study.name()
            )));
        }
        if self.thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("thresholds must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported for context, not checked.
    Info,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        }
    }

    fn check(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One output line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    /// Study name, suffixed with the series for studies that report more
    /// than one quantity (e.g. `tail_hoeffding`).
    pub study: String,
    pub kind: SamplerKind,
    pub n: usize,
    pub d: usize,
    pub d_lhs: usize,
    pub seed: u64,
    pub trials: u64,
    pub threshold: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub theoretical: f64,
    pub verdict: Verdict,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: ExperimentConfig,
    /// Dependence exponent the guarantees were evaluated with.
    pub rho: f64,
    pub rows: Vec<StudyRow>,
    pub seconds: f64,
}

impl StudyResult {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.study,
                r.kind.name(),
                r.n,
                r.d,
                r.d_lhs,
                r.seed,
                r.trials,
                r.threshold,
                r.empirical,
                r.stderr,
                r.theoretical,
                r.verdict.name(),
                r.seconds
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::invalid(format!("json encoding failed: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => Ok(self.to_csv()),
            OutputFormat::Json => self.to_json().map(|mut s| {
                s.push('\n');
                s
            }),
        }
    }
}

/// Writes `result` to `path`.
pub fn emit(result: &StudyResult, format: OutputFormat, path: &Path) -> Result<()> {
    let text = result.render(format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a JSON study result written by [`emit`].
pub fn read_json(path: &Path) -> Result<StudyResult> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    StudyResult::from_json(&text)
}

/// `ρ` used for guarantees: 0 for independent points, 1 for stratified ones.
pub fn rho_for_kind(kind: SamplerKind) -> f64 {
    match kind {
        SamplerKind::MonteCarlo => 0.0,
        SamplerKind::Lhs | SamplerKind::CenteredLhs | SamplerKind::PaddedLhs => 1.0,
    }
}

/// Binomial standard error `√(p̂(1−p̂)/trials)`.
pub fn binomial_stderr(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

pub fn run(cfg: &ExperimentConfig) -> Result<StudyResult> {
    match cfg.study {
        Study::SuccessProb => run_success_study(cfg),
        Study::Tail => {
            let region = match &cfg.region {
                Some(r) => r.clone(),
                None => {
                    BoxDifference::anchored(vec![0.5f64.powf(1.0 / cfg.spec.d as f64); cfg.spec.d])?
                }
            };
            run_tail_study(cfg, &region)
        }
        Study::Negdep => run_negdep_study(cfg),
        Study::Projection => run_projection_study(cfg),
        Study::CoverSandwich => run_cover_sandwich_study(cfg),
    }
}

struct Timer {
    start: Instant,
    on: bool,
}

impl Timer {
    fn start(on: bool) -> Self {
        Timer {
            start: Instant::now(),
            on,
        }
    }

    fn seconds(&self) -> f64 {
        if self.on {
            self.start.elapsed().as_secs_f64()
        } else {
            0.0
        }
    }
}

fn row(
    cfg: &ExperimentConfig,
    study: &str,
    threshold: f64,
    empirical: f64,
    stderr: f64,
    theoretical: f64,
    verdict: Verdict,
) -> StudyRow {
    StudyRow {
        study: study.to_string(),
        kind: cfg.spec.kind,
        n: cfg.spec.n,
        d: cfg.spec.d,
        d_lhs: cfg.spec.d_lhs,
        seed: cfg.spec.seed,
        trials: cfg.trials,
        threshold,
        empirical,
        stderr,
        theoretical,
        verdict,
        seconds: 0.0,
    }
}

fn finish(cfg: &ExperimentConfig, rho: f64, mut rows: Vec<StudyRow>, timer: &Timer) -> StudyResult {
    let seconds = timer.seconds();
    for r in &mut rows {
        r.seconds = seconds;
    }
    StudyResult {
        config: cfg.clone(),
        rho,
        rows,
        seconds,
    }
}

/// One value per trial, in trial order.
fn per_trial<T, F>(cfg: &ExperimentConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..cfg.trials).into_par_iter().map(&f).collect()
}

/// Empirical `P(D* ≤ c√(d/N))` against the guaranteed lower bound, one row
/// per `c`.
pub fn run_success_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let timer = Timer::start(cfg.record_timing);
    let spec = cfg.spec;
    let discrepancies = per_trial(cfg, |t| {
        star_discrepancy_exact(&sample(&spec.with_trial(t))?)
    })?;
    let rho = rho_for_kind(spec.kind);
    let constants = BoundConstants::default();
    let scale = (spec.d as f64 / spec.n as f64).sqrt();
    let mut rows = Vec::with_capacity(cfg.thresholds.len());
    for &c in &cfg.thresholds {
        let level = c * scale;
        let hits = discrepancies.iter().filter(|&&v| v <= level).count();
        let p = hits as f64 / cfg.trials as f64;
        let se = binomial_stderr(p, cfg.trials);
        let guarantee = success_probability(c, spec.d, rho, &constants)?;
        let verdict = Verdict::check(p >= guarantee - 3.0 * se);
        rows.push(row(cfg, "success_prob", c, p, se, guarantee, verdict));
    }
    Ok(finish(cfg, rho, rows, &timer))
}

/// Empirical `P(|S| ≥ t)` for `S = Σ (1_D(X_i) − λ(D))` against the
/// Hoeffding and Bernstein bounds with the region's dependence factor.
pub fn run_tail_study(cfg: &ExperimentConfig, region: &BoxDifference) -> Result<StudyResult> {
    cfg.validate()?;
    if region.a().len() != cfg.spec.d {
        return Err(Error::DimensionMismatch {
            expected: cfg.spec.d,
            found: region.a().len(),
        });
    }
    let volume = region.volume();
    if !(volume > 0.0 && volume < 1.0) {
        return Err(Error::DegenerateRegion { volume });
    }
    let timer = Timer::start(cfg.record_timing);
    let spec = cfg.spec;
    let gamma = match spec.kind {
        SamplerKind::MonteCarlo => 1.0,
        _ => gamma_for_boxdiff(region, spec.n, spec.d_lhs)?,
    };
    let expected = spec.n as f64 * volume;
    let deviations = per_trial(cfg, |t| {
        let p = sample(&spec.with_trial(t))?;
        let inside = p.points().iter().filter(|x| region.contains(x)).count();
        Ok((inside as f64 - expected).abs())
    })?;
    let sigma2 = volume * (1.0 - volume);
    let mut rows = Vec::with_capacity(2 * cfg.thresholds.len());
    for &t in &cfg.thresholds {
        let hits = deviations.iter().filter(|&&s| s >= t).count();
        let p = hits as f64 / cfg.trials as f64;
        let se = binomial_stderr(p, cfg.trials);
        let q = TailQuery::new(spec.n, gamma, t).with_sigma2(sigma2);
        for (name, bound) in [
            ("tail_hoeffding", hoeffding_tail(&q)),
            ("tail_bernstein", bernstein_tail(&q)),
        ] {
            let verdict = Verdict::check(p <= bound + 3.0 * se);
            rows.push(row(cfg, name, t, p, se, bound, verdict));
        }
    }
    Ok(finish(cfg, gamma.ln() / spec.d as f64, rows, &timer))
}

/// One-dimensional discrepancies of the stratified coordinate projections.
///
/// Rows: the fraction of trials whose worst stratified projection stays
/// within `1/N` (must be 1), the median worst projection, and for contrast
/// the median worst projection of a Monte Carlo set of the same shape.
pub fn run_projection_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let spec = cfg.spec;
    if spec.kind == SamplerKind::MonteCarlo || spec.d_lhs == 0 {
        return Err(Error::invalid(
            "projection study needs stratified coordinates",
        ));
    }
    let timer = Timer::start(cfg.record_timing);
    let contrast = SampleSpec::monte_carlo(spec.n, spec.d, spec.seed);
    let worst = per_trial(cfg, |t| {
        let p = sample(&spec.with_trial(t))?;
        let strat = (0..spec.d_lhs)
            .map(|j| star_discrepancy_1d(&p.axis(j)))
            .fold(0.0, f64::max);
        let q = sample(&contrast.with_trial(t))?;
        let mc = (0..spec.d_lhs)
            .map(|j| star_discrepancy_1d(&q.axis(j)))
            .fold(0.0, f64::max);
        Ok((strat, mc))
    })?;
    let limit = 1.0 / spec.n as f64;
    let within = worst.iter().filter(|w| w.0 <= limit).count() as f64 / cfg.trials as f64;
    let verdict = Verdict::check(within == 1.0);
    let mut strat: Vec<f64> = worst.iter().map(|w| w.0).collect();
    let mut mc: Vec<f64> = worst.iter().map(|w| w.1).collect();
    let rows = vec![
        row(
            cfg,
            "projection_within_1_over_n",
            limit,
            within,
            binomial_stderr(within, cfg.trials),
            1.0,
            verdict,
        ),
        row(
            cfg,
            "projection_median",
            0.5,
            median(&mut strat),
            0.0,
            limit,
            Verdict::Info,
        ),
        row(
            cfg,
            "projection_median_mc",
            0.5,
            median(&mut mc),
            0.0,
            limit,
            Verdict::Info,
        ),
    ];
    Ok(finish(cfg, rho_for_kind(spec.kind), rows, &timer))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Checks `lower ≤ D* ≤ lower + δ` for the cover estimate on every trial.
pub fn run_cover_sandwich_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let spec = cfg.spec;
    let delta = cfg.delta.unwrap_or(0.05);
    let timer = Timer::start(cfg.record_timing);
    let cover = if spec.d == 1 {
        build_cover_1d(delta)?
    } else {
        build_cover_grid(spec.d, delta)?
    };
    let outcomes = per_trial(cfg, |t| {
        let p = sample(&spec.with_trial(t))?;
        let exact = star_discrepancy_exact(&p)?;
        let (lower, upper) = star_discrepancy_cover(&p, &cover)?;
        let violated = lower > exact + SANDWICH_SLACK || exact > upper + SANDWICH_SLACK;
        Ok((violated, exact - lower))
    })?;
    let violations = outcomes.iter().filter(|o| o.0).count() as f64 / cfg.trials as f64;
    let max_gap = outcomes
        .iter()
        .map(|o| o.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let rows = vec![
        row(
            cfg,
            "cover_sandwich_violations",
            delta,
            violations,
            binomial_stderr(violations, cfg.trials),
            0.0,
            Verdict::check(violations == 0.0),
        ),
        row(
            cfg,
            "cover_sandwich_max_gap",
            delta,
            max_gap,
            0.0,
            delta,
            Verdict::check(max_gap <= delta + SANDWICH_SLACK),
        ),
    ];
    Ok(finish(cfg, rho_for_kind(spec.kind), rows, &timer))
}

/// All box differences `[0,b) \ [0,a)` whose corners take values in
/// `corners` (plus `1` for `b`) and whose volume lies strictly between 0 and 1.
pub fn box_difference_family(d: usize, corners: &[f64]) -> Result<Vec<BoxDifference>> {
    let mut values: Vec<f64> = corners
        .iter()
        .copied()
        .filter(|c| (0.0..1.0).contains(c))
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut pairs = Vec::new();
    for (i, &a) in values.iter().enumerate() {
        for &b in values[i + 1..].iter().chain(std::iter::once(&1.0)) {
            pairs.push((a, b));
        }
    }
    let mut family = Vec::new();
    let mut index = vec![0usize; d];
    if pairs.is_empty() {
        return Ok(family);
    }
    loop {
        let a: Vec<f64> = index.iter().map(|&i| pairs[i].0).collect();
        let b: Vec<f64> = index.iter().map(|&i| pairs[i].1).collect();
        let region = BoxDifference::new(a, b)?;
        let volume = region.volume();
        if volume > 0.0 && volume < 1.0 {
            family.push(region);
        }
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(family);
            }
            axis -= 1;
            index[axis] += 1;
            if index[axis] < pairs.len() {
                break;
            }
            index[axis] = 0;
        }
    }
}

/// Dependence ratios over a box-difference family: one row per region with
/// the largest observed ratio against `∏ δ_i`.
///
/// Uses exact enumeration when the permutation budget allows it and `trials`
/// Monte Carlo repetitions otherwise.
pub fn run_negdep_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let spec = cfg.spec;
    let timer = Timer::start(cfg.record_timing);
    let corners = if cfg.corners.is_empty() {
        vec![0.0, 0.15, 0.5, 0.85]
    } else {
        cfg.corners.clone()
    };
    let family = box_difference_family(spec.d, &corners)?;
    if family.is_empty() {
        return Err(Error::invalid(
            "corner list spans no non-degenerate box difference",
        ));
    }
    let tuples = (1..=spec.n)
        .map(|k| k as f64)
        .product::<f64>()
        .powi(spec.d_lhs as i32);
    let evaluation = if tuples <= DEFAULT_PERMUTATION_BUDGET || spec.kind == SamplerKind::MonteCarlo
    {
        Evaluation::Exact
    } else {
        Evaluation::MonteCarlo { trials: cfg.trials }
    };
    let report = dependence_report(&spec, &family, evaluation)?;
    let rows = report
        .regions
        .iter()
        .map(|r| {
            let se = r
                .rows
                .iter()
                .flat_map(|row| [row.upper_stderr, row.lower_stderr])
                .flatten()
                .fold(0.0, f64::max);
            row(
                cfg,
                "negdep",
                r.volume,
                r.gamma_hat,
                se,
                r.gamma_theorem,
                Verdict::check(r.holds),
            )
        })
        .collect();
    Ok(finish(cfg, report.rho_hat(), rows, &timer))
}
