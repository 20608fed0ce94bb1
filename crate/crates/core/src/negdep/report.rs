//! Dependence ratio tables for a sampler and a family of box differences.

use serde::{Deserialize, Serialize};

use super::joint::{joint_probs, DEFAULT_PERMUTATION_BUDGET};
use super::{gamma_for_boxdiff, RATIO_TOL};
use crate::discrepancy::{BoxDifference, TestSet};
use crate::error::{Error, Result};
use crate::samplers::{sample, SampleSpec, SamplerKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ReportMethod {
    /// Permutation-tuple enumeration.
    ExactEnumeration,
    /// Independent coordinates: every ratio is exactly one.
    ClosedForm,
    MonteCarlo {
        trials: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub k: usize,
    pub p_inside: f64,
    pub p_outside: f64,
    /// `P(all k inside) / λ(D)^k`
    pub upper_ratio: f64,
    /// `P(all k outside) / (1 − λ(D))^k`
    pub lower_ratio: f64,
    /// Standard errors of the two ratios (Monte Carlo only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub volume: f64,
    pub gamma_theorem: f64,
    pub gamma_hat: f64,
    pub rows: Vec<RatioRow>,
    pub holds: bool,
}

/// The dependence condition ranges over all index subsets. Every sampler here
/// is exchangeable, so the report only iterates the subset size `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub spec: SampleSpec,
    pub method: ReportMethod,
    pub subset_reduction: &'static str,
    pub regions: Vec<RegionReport>,
    /// Largest ratio over all regions, sizes and both directions.
    pub gamma_hat: f64,
    /// Largest theoretical factor over the family.
    pub gamma_theorem: f64,
    pub holds: bool,
    /// Absolute floating-point error bound on each probability (exact
    /// methods only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<f64>,
}

impl DependenceReport {
    /// `ρ = ln γ̂ / d`, the exponent with `γ = e^{ρ d}`.
    pub fn rho_hat(&self) -> f64 {
        rho_from_gamma(self.gamma_hat, self.spec.d)
    }
}

pub fn rho_from_gamma(gamma: f64, d: usize) -> f64 {
    gamma.ln() / d as f64
}

/// Requested evaluation method for [`dependence_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    Exact,
    MonteCarlo { trials: u64 },
}

pub fn dependence_report(
    spec: &SampleSpec,
    family: &[BoxDifference],
    evaluation: Evaluation,
) -> Result<DependenceReport> {
    spec.validate()?;
    for region in family {
        if region.a().len() != spec.d {
            return Err(Error::DimensionMismatch {
                expected: spec.d,
                found: region.a().len(),
            });
        }
        let volume = region.volume();
        if !(volume > 0.0 && volume < 1.0) {
            return Err(Error::DegenerateRegion { volume });
        }
    }

    let (method, regions, error_bound) = match evaluation {
        Evaluation::Exact if spec.kind == SamplerKind::MonteCarlo => {
            let regions = family
                .iter()
                .map(|r| {
                    let vol = r.volume();
                    let probs: Vec<(f64, f64)> = (1..=spec.n)
                        .map(|k| (vol.powi(k as i32), (1.0 - vol).powi(k as i32)))
                        .collect();
                    region_report(spec, r, &probs, None, 0.0)
                })
                .collect::<Result<Vec<_>>>()?;
            (ReportMethod::ClosedForm, regions, Some(0.0))
        }
        Evaluation::Exact => {
            let mut bound = 0.0f64;
            let regions = family
                .iter()
                .map(|r| {
                    let probs = joint_probs(spec, r, DEFAULT_PERMUTATION_BUDGET)?;
                    bound = bound.max(probs.error_bound);
                    let pairs: Vec<(f64, f64)> = (1..=spec.n)
                        .map(|k| (probs.inside[k], probs.outside[k]))
                        .collect();
                    region_report(spec, r, &pairs, None, probs.error_bound)
                })
                .collect::<Result<Vec<_>>>()?;
            (ReportMethod::ExactEnumeration, regions, Some(bound))
        }
        Evaluation::MonteCarlo { trials } => {
            if trials == 0 {
                return Err(Error::invalid(
                    "monte-carlo method needs at least one trial",
                ));
            }
            let counts = monte_carlo_counts(spec, family, trials)?;
            let t = trials as f64;
            let regions = family
                .iter()
                .zip(&counts)
                .map(|(r, (ins, outs))| {
                    let pairs: Vec<(f64, f64)> = ins
                        .iter()
                        .zip(outs)
                        .map(|(&i, &o)| (i as f64 / t, o as f64 / t))
                        .collect();
                    let stderr: Vec<(f64, f64)> = pairs
                        .iter()
                        .map(|&(pi, po)| {
                            ((pi * (1.0 - pi) / t).sqrt(), (po * (1.0 - po) / t).sqrt())
                        })
                        .collect();
                    region_report(spec, r, &pairs, Some(&stderr), 0.0)
                })
                .collect::<Result<Vec<_>>>()?;
            (ReportMethod::MonteCarlo { trials }, regions, None)
        }
    };

    let gamma_hat = regions.iter().map(|r| r.gamma_hat).fold(0.0, f64::max);
    let gamma_theorem = regions.iter().map(|r| r.gamma_theorem).fold(1.0, f64::max);
    let holds = regions.iter().all(|r| r.holds);
    Ok(DependenceReport {
        spec: *spec,
        method,
        subset_reduction: "exchangeable: subsets u reduced to sizes k = |u|",
        regions,
        gamma_hat,
        gamma_theorem,
        holds,
        error_bound,
    })
}

/// Ratio `p / product` with `0/0 = 1`.
fn ratio(p: f64, product: f64) -> f64 {
    if product > 0.0 {
        p / product
    } else if p == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn region_report(
    spec: &SampleSpec,
    region: &BoxDifference,
    probs: &[(f64, f64)],
    stderr: Option<&[(f64, f64)]>,
    error_bound: f64,
) -> Result<RegionReport> {
    let volume = region.volume();
    let gamma_theorem = gamma_for_boxdiff(region, spec.n, spec.d_lhs)?;
    let mut rows = Vec::with_capacity(probs.len());
    let mut holds = true;
    for (idx, &(p_in, p_out)) in probs.iter().enumerate() {
        let k = idx + 1;
        let up_den = volume.powi(k as i32);
        let lo_den = (1.0 - volume).powi(k as i32);
        let upper_ratio = ratio(p_in, up_den);
        let lower_ratio = ratio(p_out, lo_den);
        let (upper_stderr, lower_stderr) = match stderr {
            Some(se) => (Some(se[idx].0 / up_den), Some(se[idx].1 / lo_den)),
            None => (None, None),
        };
        // Exact ratios get the float error budget; estimates get three
        // standard errors.
        let slack_up = upper_stderr.map_or(error_bound / up_den, |s| 3.0 * s);
        let slack_lo = lower_stderr.map_or(error_bound / lo_den, |s| 3.0 * s);
        let limit = gamma_theorem * (1.0 + RATIO_TOL);
        holds &= upper_ratio <= limit + slack_up && lower_ratio <= limit + slack_lo;
        rows.push(RatioRow {
            k,
            p_inside: p_in,
            p_outside: p_out,
            upper_ratio,
            lower_ratio,
            upper_stderr,
            lower_stderr,
        });
    }
    let gamma_hat = rows
        .iter()
        .flat_map(|r| [r.upper_ratio, r.lower_ratio])
        .fold(0.0, f64::max);
    Ok(RegionReport {
        a: region.a().to_vec(),
        b: region.b().to_vec(),
        volume,
        gamma_theorem,
        gamma_hat,
        rows,
        holds,
    })
}

/// Per region: how many trials had the first `k` points all inside / all
/// outside, for `k = 1..=N`.
fn monte_carlo_counts(
    spec: &SampleSpec,
    family: &[BoxDifference],
    trials: u64,
) -> Result<Vec<(Vec<u64>, Vec<u64>)>> {
    let n = spec.n;
    let mut counts = vec![(vec![0u64; n], vec![0u64; n]); family.len()];
    for trial in 0..trials {
        let points = sample(&spec.with_trial(trial))?;
        for (region, (ins, outs)) in family.iter().zip(counts.iter_mut()) {
            let mut all_in = true;
            let mut all_out = true;
            for (k, x) in points.points().iter().enumerate() {
                let inside = region.contains(x);
                all_in &= inside;
                all_out &= !inside;
                if !all_in && !all_out {
                    break;
                }
                ins[k] += all_in as u64;
                outs[k] += all_out as u64;
            }
        }
    }
    Ok(counts)
}
