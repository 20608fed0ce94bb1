//! Monte Carlo, Latin hypercube and padded Latin hypercube samplers.
//!
//! Draw order for a given [`SampleSpec`] (all from the stream keyed by
//! `derive_stream(seed, trial)`):
//!
//! 1. one Fisher–Yates permutation of `0..N` for each of the `d_lhs` Latin
//!    hypercube axes, in axis order;
//! 2. the jitters and Monte Carlo coordinates in row-major order (point by
//!    point, axis by axis). Centered Latin hypercube axes consume no draw.
//!
//! Latin hypercube coordinate `j` of point `i` is `(pi_j(i) + U) / N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    MonteCarlo,
    Lhs,
    CenteredLhs,
    PaddedLhs,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::MonteCarlo => "monte_carlo",
            SamplerKind::Lhs => "lhs",
            SamplerKind::CenteredLhs => "centered_lhs",
            SamplerKind::PaddedLhs => "padded_lhs",
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "mc" | "monte_carlo" | "montecarlo" => Ok(SamplerKind::MonteCarlo),
            "lhs" => Ok(SamplerKind::Lhs),
            "centered_lhs" | "centeredlhs" | "clhs" => Ok(SamplerKind::CenteredLhs),
            "padded_lhs" | "paddedlhs" | "padded" => Ok(SamplerKind::PaddedLhs),
            other => Err(Error::invalid(format!("unknown sampler kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything needed to reproduce a point set bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleSpec {
    pub kind: SamplerKind,
    pub n: usize,
    pub d: usize,
    /// Number of leading Latin hypercube coordinates.
    pub d_lhs: usize,
    pub seed: u64,
    pub trial: u64,
}

impl SampleSpec {
    pub fn monte_carlo(n: usize, d: usize, seed: u64) -> Self {
        SampleSpec {
            kind: SamplerKind::MonteCarlo,
            n,
            d,
            d_lhs: 0,
            seed,
            trial: 0,
        }
    }

    pub fn lhs(n: usize, d: usize, seed: u64) -> Self {
        SampleSpec {
            kind: SamplerKind::Lhs,
            n,
            d,
            d_lhs: d,
            seed,
            trial: 0,
        }
    }

    pub fn centered_lhs(n: usize, d: usize, seed: u64) -> Self {
        SampleSpec {
            kind: SamplerKind::CenteredLhs,
            ..SampleSpec::lhs(n, d, seed)
        }
    }

    pub fn padded_lhs(n: usize, d: usize, d_lhs: usize, seed: u64) -> Self {
        SampleSpec {
            kind: SamplerKind::PaddedLhs,
            n,
            d,
            d_lhs,
            seed,
            trial: 0,
        }
    }

    /// Builds a spec of `kind`, filling `d_lhs` from the kind where it is
    /// forced and taking `d_lhs` for padded samples.
    pub fn of_kind(kind: SamplerKind, n: usize, d: usize, d_lhs: usize, seed: u64) -> Self {
        match kind {
            SamplerKind::MonteCarlo => SampleSpec::monte_carlo(n, d, seed),
            SamplerKind::Lhs => SampleSpec::lhs(n, d, seed),
            SamplerKind::CenteredLhs => SampleSpec::centered_lhs(n, d, seed),
            SamplerKind::PaddedLhs => SampleSpec::padded_lhs(n, d, d_lhs, seed),
        }
    }

    pub fn with_trial(self, trial: u64) -> Self {
        SampleSpec { trial, ..self }
    }

    pub fn d_mc(&self) -> usize {
        self.d - self.d_lhs
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("sample size n must be at least 1"));
        }
        if self.d == 0 {
            return Err(Error::invalid("dimension d must be at least 1"));
        }
        if self.d_lhs > self.d {
            return Err(Error::invalid(format!(
                "d_lhs = {} exceeds d = {}",
                self.d_lhs, self.d
            )));
        }
        match self.kind {
            SamplerKind::MonteCarlo if self.d_lhs != 0 => {
                Err(Error::invalid("Monte Carlo samples have d_lhs = 0"))
            }
            SamplerKind::Lhs | SamplerKind::CenteredLhs if self.d_lhs != self.d => {
                Err(Error::invalid("Latin hypercube samples have d_lhs = d"))
            }
            _ => Ok(()),
        }
    }
}

/// Draws the point set described by `spec`.
pub fn sample(spec: &SampleSpec) -> Result<PointSet> {
    match spec.kind {
        SamplerKind::MonteCarlo => sample_monte_carlo(spec),
        SamplerKind::Lhs | SamplerKind::CenteredLhs => sample_lhs(spec),
        SamplerKind::PaddedLhs => sample_padded_lhs(spec),
    }
}

pub fn sample_monte_carlo(spec: &SampleSpec) -> Result<PointSet> {
    if spec.kind != SamplerKind::MonteCarlo {
        return Err(Error::invalid(format!(
            "sample_monte_carlo called with kind {}",
            spec.kind
        )));
    }
    spec.validate()?;
    Ok(generate(spec))
}

pub fn sample_lhs(spec: &SampleSpec) -> Result<PointSet> {
    if !matches!(spec.kind, SamplerKind::Lhs | SamplerKind::CenteredLhs) {
        return Err(Error::invalid(format!(
            "sample_lhs called with kind {}",
            spec.kind
        )));
    }
    spec.validate()?;
    Ok(generate(spec))
}

pub fn sample_padded_lhs(spec: &SampleSpec) -> Result<PointSet> {
    if spec.kind != SamplerKind::PaddedLhs {
        return Err(Error::invalid(format!(
            "sample_padded_lhs called with kind {}",
            spec.kind
        )));
    }
    spec.validate()?;
    Ok(generate(spec))
}

fn generate(spec: &SampleSpec) -> PointSet {
    let mut stream = Stream::for_trial(spec.seed, spec.trial);
    let perms: Vec<Vec<usize>> = (0..spec.d_lhs)
        .map(|_| stream.permutation(spec.n))
        .collect();
    let centered = spec.kind == SamplerKind::CenteredLhs;
    let points = (0..spec.n)
        .map(|i| {
            (0..spec.d)
                .map(|j| match perms.get(j) {
                    Some(perm) => {
                        let u = if centered { 0.5 } else { stream.next_f64() };
                        stratified(perm[i], u, spec.n)
                    }
                    None => stream.next_f64(),
                })
                .collect()
        })
        .collect();
    PointSet::from_sampler(*spec, points)
}

/// Lower and upper edge of stratum `cell` as computed in `f64`.
pub fn stratum_bounds(cell: usize, n: usize) -> (f64, f64) {
    (cell as f64 / n as f64, (cell + 1) as f64 / n as f64)
}

/// `(cell + u) / n`, kept inside the stratum's computed edges when the
/// division rounds onto the upper edge.
fn stratified(cell: usize, u: f64, n: usize) -> f64 {
    let (lo, hi) = stratum_bounds(cell, n);
    let x = (cell as f64 + u) / n as f64;
    if x >= hi {
        hi.next_down()
    } else if x < lo {
        lo
    } else {
        x
    }
}

/// The stratum `i` with `i/n <= x < (i+1)/n`, using the same edges the
/// sampler uses.
pub fn stratum_of(x: f64, n: usize) -> usize {
    let mut i = ((x * n as f64).floor() as usize).min(n - 1);
    loop {
        let (lo, hi) = stratum_bounds(i, n);
        if x < lo && i > 0 {
            i -= 1;
        } else if x >= hi && i + 1 < n {
            i += 1;
        } else {
            return i;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_stratified(p: &PointSet, axes: std::ops::Range<usize>) {
        let n = p.len();
        for j in axes {
            let mut counts = vec![0; n];
            for x in p.axis(j) {
                counts[stratum_of(x, n)] += 1;
            }
            assert!(counts.iter().all(|&c| c == 1), "axis {j}: {counts:?}");
        }
    }

    #[test]
    fn single_monte_carlo_point() {
        let p = sample(&SampleSpec::monte_carlo(1, 3, 9)).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.points()[0].iter().all(|c| (0.0..1.0).contains(c)));
    }

    #[test]
    fn monte_carlo_mean_is_near_half() {
        let p = sample(&SampleSpec::monte_carlo(1000, 1, 2024)).unwrap();
        let mean: f64 = p.axis(0).iter().sum::<f64>() / 1000.0;
        assert!((mean - 0.5).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn identical_specs_give_identical_bits() {
        let spec = SampleSpec::monte_carlo(100, 2, 7);
        let a = sample(&spec).unwrap();
        let b = sample(&spec).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        let c = sample(&spec.with_trial(1)).unwrap();
        assert_ne!(a.to_text(), c.to_text());
    }

    #[test]
    fn lhs_has_one_point_per_stratum() {
        let p = sample(&SampleSpec::lhs(4, 2, 1)).unwrap();
        assert_stratified(&p, 0..2);
        for trial in 0..200 {
            let p = sample(&SampleSpec::lhs(37, 3, 99).with_trial(trial)).unwrap();
            assert_stratified(&p, 0..3);
        }
    }

    #[test]
    fn centered_lhs_hits_midpoints() {
        let p = sample(&SampleSpec::centered_lhs(5, 1, 3)).unwrap();
        let mut xs = p.axis(0);
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![0.1, 0.3, 0.5, 0.7, 0.9]);
    }

    #[test]
    fn lhs_of_size_one() {
        let p = sample(&SampleSpec::lhs(1, 1, 0)).unwrap();
        assert!((0.0..1.0).contains(&p.points()[0][0]));
    }

    #[test]
    fn padded_lhs_stratifies_leading_block_only() {
        let p = sample(&SampleSpec::padded_lhs(4, 3, 2, 5)).unwrap();
        assert_stratified(&p, 0..2);
        assert_eq!(p.dim(), 3);
    }

    #[test]
    fn padded_extremes_reduce_to_pure_samplers() {
        // Same draw order, so the extremes coincide bit for bit.
        let mc = sample(&SampleSpec::monte_carlo(4, 2, 8)).unwrap();
        let pad0 = sample(&SampleSpec::padded_lhs(4, 2, 0, 8)).unwrap();
        assert_eq!(mc.points(), pad0.points());
        let lhs = sample(&SampleSpec::lhs(4, 2, 8)).unwrap();
        let pad2 = sample(&SampleSpec::padded_lhs(4, 2, 2, 8)).unwrap();
        assert_eq!(lhs.points(), pad2.points());
    }

    #[test]
    fn spec_validation() {
        assert!(sample(&SampleSpec::padded_lhs(4, 2, 3, 0)).is_err());
        assert!(sample(&SampleSpec::monte_carlo(0, 2, 0)).is_err());
        let bad = SampleSpec {
            d_lhs: 1,
            ..SampleSpec::monte_carlo(4, 2, 0)
        };
        assert!(sample(&bad).is_err());
        assert!(sample_lhs(&SampleSpec::monte_carlo(4, 2, 0)).is_err());
        assert!(sample_monte_carlo(&SampleSpec::lhs(4, 2, 0)).is_err());
    }

    #[test]
    fn rounding_onto_stratum_edge_is_pulled_back() {
        // (2 + (1 - 2^-53)) rounds to 3 before the division.
        let x = stratified(2, 1.0 - f64::EPSILON / 2.0, 3);
        assert!(x < 1.0);
        assert_eq!(stratum_of(x, 3), 2);
    }
}
