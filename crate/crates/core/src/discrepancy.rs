//! Local and star discrepancy.
//!
//! The exact star discrepancy is computed on the critical grid: per axis the
//! distinct point coordinates plus `1`. At every grid corner `y` both the
//! deficit `vol(y) - #open(y)/N` (points with `x < y`) and the excess
//! `#closed(y)/N - vol(y)` (points with `x <= y`) are evaluated. The deficit
//! over half-open boxes is maximized at grid corners, the excess is the limit
//! of half-open boxes shrinking onto a closed one, so the maximum of both is
//! the supremum.

use serde::{Deserialize, Serialize};

use crate::covers::{CoverPoints, DeltaCover, Trim};
use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// Default cap on the number `(N+1)^d` of critical-grid corners.
pub const DEFAULT_EXACT_BUDGET: f64 = 1e8;

/// A measurable test set inside the unit cube.
pub trait TestSet {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    fn volume(&self) -> f64;
}

/// The anchored box `[0, corner)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchoredBox {
    corner: Vec<f64>,
}

impl AnchoredBox {
    pub fn new(corner: Vec<f64>) -> Result<Self> {
        check_unit_vector("corner", &corner)?;
        Ok(AnchoredBox { corner })
    }

    pub fn corner(&self) -> &[f64] {
        &self.corner
    }
}

impl TestSet for AnchoredBox {
    fn dim(&self) -> usize {
        self.corner.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.corner).all(|(xi, yi)| xi < yi)
    }

    fn volume(&self) -> f64 {
        self.corner.iter().product()
    }
}

/// The box difference `[0,b) \ [0,a)` with `a <= b` componentwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDifference {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl BoxDifference {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: b.len(),
                found: a.len(),
            });
        }
        check_unit_vector("a", &a)?;
        check_unit_vector("b", &b)?;
        if a.iter().zip(&b).any(|(ai, bi)| ai > bi) {
            return Err(Error::invalid(format!(
                "box difference needs a <= b componentwise, got a = {a:?}, b = {b:?}"
            )));
        }
        Ok(BoxDifference { a, b })
    }

    /// `[0, b)` written as the difference `[0,b) \ [0,0)`.
    pub fn anchored(b: Vec<f64>) -> Result<Self> {
        BoxDifference::new(vec![0.0; b.len()], b)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

impl TestSet for BoxDifference {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        let in_b = x.iter().zip(&self.b).all(|(xi, bi)| xi < bi);
        let in_a = x.iter().zip(&self.a).all(|(xi, ai)| xi < ai);
        in_b && !in_a
    }

    fn volume(&self) -> f64 {
        self.b.iter().product::<f64>() - self.a.iter().product::<f64>()
    }
}

fn check_unit_vector(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::invalid(format!(
            "{name} must have at least one coordinate"
        )));
    }
    if let Some(c) = v.iter().find(|c| !(0.0..=1.0).contains(*c)) {
        return Err(Error::invalid(format!(
            "{name} coordinate {c} outside [0,1]"
        )));
    }
    Ok(())
}

/// Number of points with `x_j < y_j` on open axes and `x_j <= y_j` on
/// closed axes.
pub fn count_in_box(p: &PointSet, corner: &[f64], closed_mask: &[bool]) -> Result<usize> {
    if corner.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: corner.len(),
        });
    }
    if closed_mask.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: closed_mask.len(),
        });
    }
    check_unit_vector("corner", corner)?;
    Ok(p.points()
        .iter()
        .filter(|x| {
            x.iter()
                .zip(corner)
                .zip(closed_mask)
                .all(|((xi, yi), &closed)| if closed { xi <= yi } else { xi < yi })
        })
        .count())
}

/// `| #(P in region) / N - vol(region) |`.
pub fn local_discrepancy<R: TestSet + ?Sized>(p: &PointSet, region: &R) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if region.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: region.dim(),
        });
    }
    let inside = p.points().iter().filter(|x| region.contains(x)).count();
    Ok((inside as f64 / p.len() as f64 - region.volume()).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Cover,
}

/// Two-sided estimate of the star discrepancy (`lower == upper` when exact).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyEstimate {
    pub n: usize,
    pub d: usize,
    pub method: Method,
    pub lower: f64,
    pub upper: f64,
}

pub fn star_discrepancy_exact(p: &PointSet) -> Result<f64> {
    star_discrepancy_exact_with_budget(p, DEFAULT_EXACT_BUDGET)
}

pub fn star_discrepancy_exact_with_budget(p: &PointSet, budget: f64) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let n = p.len();
    let d = p.dim();
    let required = (n as f64 + 1.0).powi(d as i32);
    if required > budget {
        return Err(Error::BudgetExceeded {
            what: "exact star discrepancy",
            required,
            budget,
            hint: "use the cover bound (--delta) instead",
        });
    }
    if d == 1 {
        return Ok(star_discrepancy_1d(&p.axis(0)));
    }
    Ok(critical_grid_sup(p))
}

fn critical_grid_sup(p: &PointSet) -> f64 {
    let n = p.len();
    let d = p.dim();
    // Per axis: distinct sorted coordinates followed by 1.
    let mut grids: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut g = p.axis(j);
            g.sort_by(f64::total_cmp);
            g.dedup();
            g.push(1.0);
            g
        })
        .collect();

    // Slot 0 on every axis is "below every grid value"; a point whose
    // coordinate equals g[i] is counted from slot i + 1 on.
    let mut bins: Vec<Vec<usize>> = p
        .points()
        .iter()
        .map(|x| {
            x.iter()
                .zip(&grids)
                .map(|(c, g)| g.partition_point(|v| v < c) + 1)
                .collect()
        })
        .collect();
    if d == 1 {
        // A trailing axis with the single value 1 that every point passes.
        grids.push(vec![1.0]);
        for b in &mut bins {
            b.push(0);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| bins[i][0]);

    // Sweep the first axis. `open` counts the points below the current
    // first-axis slot, `closed` those up to and including it, each as a
    // prefix-count table over the remaining axes.
    let tail_grids = &grids[1..];
    let mut open = PrefixCounts::zeros(tail_grids.iter().map(|g| g.len() + 1).collect());
    let mut closed = open.clone();
    let closed_offset: usize = open.strides.iter().sum();
    let last = &tail_grids[tail_grids.len() - 1];
    let n_f = n as f64;
    let (mut next_open, mut next_closed) = (0, 0);

    // Work in counts: `N·vol − #open` loses less than `vol − #open/N`.
    // Independent lanes let the compiler vectorize the reduction.
    const LANES: usize = 4;
    let mut lanes = [0.0f64; LANES];
    for (t0, &g0) in grids[0].iter().enumerate() {
        while next_open < n && bins[order[next_open]][0] <= t0 {
            open.add_orthant(&bins[order[next_open]][1..]);
            next_open += 1;
        }
        while next_closed < n && bins[order[next_closed]][0] <= t0 + 1 {
            closed.add_orthant(&bins[order[next_closed]][1..]);
            next_closed += 1;
        }
        open.for_each_row(tail_grids, g0, |base, prefix| {
            let o_row = &open.data[base..base + last.len()];
            let c_row = &closed.data[base + closed_offset..base + closed_offset + last.len()];
            for (t, ((&g, &o), &c)) in last.iter().zip(o_row).zip(c_row).enumerate() {
                let scaled = n_f * (prefix * g);
                let lane = &mut lanes[t % LANES];
                let dev = (scaled - o as f64).max(c as f64 - scaled);
                if dev > *lane {
                    *lane = dev;
                }
            }
        });
    }
    lanes.iter().fold(0.0f64, |a, &b| a.max(b)) / n_f
}

/// Exact star discrepancy of a one-dimensional sample (unsorted input):
/// `max_i max(i/N - x_(i), x_(i) - (i-1)/N)` over the sorted values.
pub fn star_discrepancy_1d(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        // Ties: the open count stops before the run, the closed count after.
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let scaled = n * x;
        best = best.max(scaled - i as f64).max(j as f64 - scaled);
        i = j;
    }
    // y -> 1 with every point inside: the deficit there is zero.
    best / n
}

/// `max_{x in cover} D_N(P, [0,x))` and that value plus `delta`.
pub fn star_discrepancy_cover(p: &PointSet, cover: &DeltaCover) -> Result<(f64, f64)> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if cover.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: cover.dim(),
        });
    }
    let n = p.len() as f64;
    let lower = match cover.points() {
        CoverPoints::Grid { m } | CoverPoints::TrimmedGrid { m, .. } => {
            let m = *m;
            let trim = match cover.points() {
                CoverPoints::TrimmedGrid { .. } => Some(Trim::new(p.dim(), m, cover.delta())),
                _ => None,
            };
            let values: Vec<f64> = (1..=m).map(|k| k as f64 / m as f64).collect();
            let grids = vec![values; p.dim()];
            // Slot t on each axis stands for the value t/m; slot 0 (value 0)
            // is never a corner.
            let shape = vec![m + 1; p.dim()];
            let counts = PrefixCounts::build(
                shape,
                p.points()
                    .iter()
                    .map(|x| x.iter().map(|&c| first_grid_slot_above(c, m)).collect()),
            );
            let first_corner: usize = counts.strides.iter().sum();
            let mut best = 0.0f64;
            let mut g = vec![0usize; p.dim()];
            counts.for_each_corner(&grids, |flat, volume| {
                let slot = flat + first_corner;
                if let Some(trim) = &trim {
                    for (gj, &stride) in g.iter_mut().zip(&counts.strides) {
                        *gj = (slot / stride) % (m + 1);
                    }
                    if !trim.contains(&g) {
                        return;
                    }
                }
                let open = counts.data[slot] as f64 / n;
                best = best.max((open - volume).abs());
            });
            best
        }
        CoverPoints::Explicit(points) => {
            let mut best = 0.0f64;
            for x in points {
                let inside = p
                    .points()
                    .iter()
                    .filter(|q| q.iter().zip(x).all(|(qi, xi)| qi < xi))
                    .count();
                let volume: f64 = x.iter().product();
                best = best.max((inside as f64 / n - volume).abs());
            }
            best
        }
    };
    Ok((lower, lower + cover.delta()))
}

pub fn estimate(p: &PointSet, cover: Option<&DeltaCover>) -> Result<DiscrepancyEstimate> {
    let (method, lower, upper) = match cover {
        None => {
            let v = star_discrepancy_exact(p)?;
            (Method::Exact, v, v)
        }
        Some(c) => {
            let (lo, hi) = star_discrepancy_cover(p, c)?;
            (Method::Cover, lo, hi)
        }
    };
    Ok(DiscrepancyEstimate {
        n: p.len(),
        d: p.dim(),
        method,
        lower,
        upper,
    })
}

/// Smallest `t` in `1..=m` with `t/m > c`, i.e. the first slot whose box
/// `[0, t/m)` contains a coordinate `c`.
fn first_grid_slot_above(c: f64, m: usize) -> usize {
    let value = |t: usize| t as f64 / m as f64;
    let mut t = ((c * m as f64).floor() as usize + 1).min(m);
    while t > 1 && value(t - 1) > c {
        t -= 1;
    }
    while t < m && value(t) <= c {
        t += 1;
    }
    t
}

/// Row-major d-dimensional array of point counts, prefix-summed along every
/// axis so that `data[t]` counts the points whose bin is `<= t` on each axis.
#[derive(Clone)]
struct PrefixCounts {
    shape: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<u32>,
}

impl PrefixCounts {
    fn zeros(shape: Vec<usize>) -> Self {
        let d = shape.len();
        let mut strides = vec![1usize; d];
        for j in (0..d.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * shape[j + 1];
        }
        let total = strides[0] * shape[0];
        PrefixCounts {
            shape,
            strides,
            data: vec![0; total],
        }
    }

    /// Adds one point with the given slots: every entry whose index is
    /// componentwise at least `start` goes up by one.
    fn add_orthant(&mut self, start: &[usize]) {
        fn rec(data: &mut [u32], shape: &[usize], strides: &[usize], start: &[usize]) {
            if shape.len() == 1 {
                data[start[0]..shape[0]].iter_mut().for_each(|v| *v += 1);
                return;
            }
            for block in data.chunks_exact_mut(strides[0]).skip(start[0]) {
                rec(block, &shape[1..], &strides[1..], &start[1..]);
            }
        }
        rec(&mut self.data, &self.shape, &self.strides, start);
    }

    fn build(shape: Vec<usize>, bins: impl Iterator<Item = Vec<usize>>) -> Self {
        let d = shape.len();
        let mut strides = vec![1usize; d];
        for j in (0..d.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * shape[j + 1];
        }
        let total = strides[0] * shape[0];
        let mut data = vec![0u32; total];
        for bin in bins {
            let flat: usize = bin.iter().zip(&strides).map(|(b, s)| b * s).sum();
            data[flat] += 1;
        }
        // Running sums along each axis in turn.
        // Running sums along each axis in turn.
        for j in 0..d {
            let stride = strides[j];
            for block in data.chunks_exact_mut(stride * shape[j]) {
                for e in 1..shape[j] {
                    let (done, rest) = block.split_at_mut(e * stride);
                    let prev = &done[(e - 1) * stride..];
                    for (c, p) in rest[..stride].iter_mut().zip(prev) {
                        *c += p;
                    }
                }
            }
        }
        PrefixCounts {
            shape,
            strides,
            data,
        }
    }

    /// Visits every corner `t` with `t_j < grids[j].len()`, passing the flat
    /// index of `t` and the volume `prod_j grids[j][t_j]`.
    fn for_each_corner(&self, grids: &[Vec<f64>], mut visit: impl FnMut(usize, f64)) {
        let last = &grids[grids.len() - 1];
        self.for_each_row(grids, 1.0, |base, prefix| {
            for (t, &g) in last.iter().enumerate() {
                visit(base + t, prefix * g);
            }
        });
    }

    /// Visits every row of corners along the last axis, passing the flat
    /// index of its first corner and `lead` times the product of the leading
    /// coordinates.
    fn for_each_row(&self, grids: &[Vec<f64>], lead: f64, mut visit: impl FnMut(usize, f64)) {
        let d = self.shape.len();
        let last = d - 1;
        let mut idx = vec![0usize; last];
        // partial[j] = product of the first j coordinates of the corner.
        let mut partial = vec![lead; d];
        for j in 0..last {
            partial[j + 1] = partial[j] * grids[j][0];
        }
        let mut base = 0usize;
        loop {
            visit(base, partial[last]);
            // Odometer over the leading axes.
            let mut j = last;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                base += self.strides[j];
                if idx[j] < grids[j].len() {
                    break;
                }
                base -= idx[j] * self.strides[j];
                idx[j] = 0;
            }
            for k in j..last {
                partial[k + 1] = partial[k] * grids[k][idx[k]];
            }
        }
    }
}
