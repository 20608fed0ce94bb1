//! Brute-force joint probabilities by enumerating every permutation tuple.
//!
//! Conditioned on the permutations, points are independent and
//! `P(Z ∈ D | cells) = vol(cell ∩ B) − vol(cell ∩ A)` divided by the cell
//! volume, where Monte Carlo coordinates have the whole unit interval as
//! their cell. Averaging over all `(N!)^d_lhs` tuples gives the exact law.
//! The sample is exchangeable, so only the number `k` of points matters;
//! the first `k` are used.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrepancy::BoxDifference;
use crate::error::{Error, Result};
use crate::samplers::{SampleSpec, SamplerKind};

/// Default cap on the number `(N!)^d_lhs` of permutation tuples.
pub const DEFAULT_PERMUTATION_BUDGET: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
}

/// `inside[k] = P(Z_1..Z_k ∈ D)` and `outside[k] = P(Z_1..Z_k ∉ D)` for
/// `k = 0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointProbs {
    pub inside: Vec<f64>,
    pub outside: Vec<f64>,
    /// Bound on the absolute floating-point error of every entry.
    pub error_bound: f64,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(mut self, other: CompensatedSum) -> Self {
        self.add(other.sum);
        self.add(other.carry);
        self
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn joint_prob_exact(
    spec: &SampleSpec,
    region: &BoxDifference,
    k: usize,
    value: Membership,
) -> Result<f64> {
    if k > spec.n {
        return Err(Error::invalid(format!("k = {k} exceeds N = {}", spec.n)));
    }
    let probs = joint_probs(spec, region, DEFAULT_PERMUTATION_BUDGET)?;
    Ok(match value {
        Membership::Inside => probs.inside[k],
        Membership::Outside => probs.outside[k],
    })
}

/// Per-axis probability that a point in cell `i` lies below `corner`.
fn below_fraction(kind: AxisKind, corner: f64, n: usize, cell: usize) -> f64 {
    match kind {
        AxisKind::Jittered => (n as f64 * corner - cell as f64).clamp(0.0, 1.0),
        AxisKind::Centered => {
            if (cell as f64 + 0.5) < n as f64 * corner {
                1.0
            } else {
                0.0
            }
        }
        AxisKind::Uniform => corner,
    }
}

#[derive(Debug, Clone, Copy)]
enum AxisKind {
    Jittered,
    Centered,
    Uniform,
}

pub fn joint_probs(spec: &SampleSpec, region: &BoxDifference, budget: f64) -> Result<JointProbs> {
    spec.validate()?;
    if region.a().len() != spec.d {
        return Err(Error::DimensionMismatch {
            expected: spec.d,
            found: region.a().len(),
        });
    }
    let n = spec.n;
    let d = spec.d;
    let d_lhs = spec.d_lhs;
    let perm_count: f64 = (1..=n).map(|i| i as f64).product();
    let required = perm_count.powi(d_lhs as i32);
    if required > budget {
        return Err(Error::BudgetExceeded {
            what: "permutation enumeration",
            required,
            budget,
            hint: "reduce N or d_lhs, or use the monte-carlo method",
        });
    }

    let axis_kind = |j: usize| match (j < d_lhs, spec.kind) {
        (false, _) => AxisKind::Uniform,
        (true, SamplerKind::CenteredLhs) => AxisKind::Centered,
        (true, _) => AxisKind::Jittered,
    };
    // tables[j][cell] = (fraction below a_j, fraction below b_j)
    let tables: Vec<Vec<(f64, f64)>> = (0..d)
        .map(|j| {
            let cells = if j < d_lhs { n } else { 1 };
            (0..cells)
                .map(|c| {
                    (
                        below_fraction(axis_kind(j), region.a()[j], n, c),
                        below_fraction(axis_kind(j), region.b()[j], n, c),
                    )
                })
                .collect()
        })
        .collect();

    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let tuples_per_head = perm_count.powi(d_lhs.saturating_sub(1) as i32) as usize;

    let accumulate = |head: usize| -> Vec<(CompensatedSum, CompensatedSum)> {
        let mut sums = vec![(CompensatedSum::default(), CompensatedSum::default()); n + 1];
        // Odometer over the permutation indices of axes 1..d_lhs.
        let mut tail = vec![0usize; d_lhs.saturating_sub(1)];
        for _ in 0..tuples_per_head {
            let mut all_in = 1.0f64;
            let mut all_out = 1.0f64;
            sums[0].0.add(1.0);
            sums[0].1.add(1.0);
            for point in 0..n {
                let mut below_a = 1.0f64;
                let mut below_b = 1.0f64;
                for (j, table) in tables.iter().enumerate() {
                    let cell = if j >= d_lhs {
                        0
                    } else if j == 0 {
                        perms[head][point]
                    } else {
                        perms[tail[j - 1]][point]
                    };
                    let (fa, fb) = table[cell];
                    below_a *= fa;
                    below_b *= fb;
                }
                let q = below_b - below_a;
                all_in *= q;
                all_out *= 1.0 - q;
                sums[point + 1].0.add(all_in);
                sums[point + 1].1.add(all_out);
            }
            for slot in tail.iter_mut().rev() {
                *slot += 1;
                if *slot < perms.len() {
                    break;
                }
                *slot = 0;
            }
        }
        sums
    };

    let heads = if d_lhs == 0 { 1 } else { perms.len() };
    let totals = (0..heads).into_par_iter().map(accumulate).reduce(
        || vec![(CompensatedSum::default(), CompensatedSum::default()); n + 1],
        |a, b| {
            a.into_iter()
                .zip(b)
                .map(|((ai, ao), (bi, bo))| (ai.merge(bi), ao.merge(bo)))
                .collect()
        },
    );

    let tuples = required;
    let inside: Vec<f64> = totals.iter().map(|(i, _)| i.value() / tuples).collect();
    let outside: Vec<f64> = totals.iter().map(|(_, o)| o.value() / tuples).collect();
    // Each term carries at most (2d + N + 1) roundings; compensated
    // summation and the final division add a few more.
    let error_bound = (2 * d + n + 6) as f64 * f64::EPSILON;
    Ok(JointProbs {
        inside,
        outside,
        error_bound,
    })
}
