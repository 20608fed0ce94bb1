//! δ-covers of the unit cube.
//!
//! A finite `Γ ⊂ (0,1]^d` is a δ-cover when every `y ∈ [0,1)^d` sits between
//! two points `x <= y <= z` of `Γ ∪ {0}` whose anchored boxes differ in
//! volume by at most δ. The origin is never stored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Default cap on `M^d` for grid covers.
pub const DEFAULT_GRID_BUDGET: f64 = 1e8;

/// Cap on the number of points [`DeltaCover::materialize`] will allocate.
pub const MATERIALIZE_LIMIT: usize = 10_000_000;

/// Relative slack when comparing floating volume gaps of explicit covers.
const EXPLICIT_GAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverPoints {
    /// `{k/m : k = 1..m}^d`, stored implicitly.
    Grid {
        m: usize,
    },
    /// The grid `{k/m}^d` without the points strictly inside the region
    /// `vol <= δ`; see [`build_cover_trimmed`]. `len` is the number of
    /// points kept.
    TrimmedGrid {
        m: usize,
        len: usize,
    },
    Explicit(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaCover {
    d: usize,
    delta: f64,
    points: CoverPoints,
}

impl DeltaCover {
    /// A cover from an explicit point list. The bracketing property is not
    /// checked here; see [`verify_cover`].
    pub fn explicit(d: usize, delta: f64, points: Vec<Vec<f64>>) -> Result<Self> {
        check_delta(delta)?;
        if d == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.len(),
                });
            }
            if p.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::invalid(format!("cover point {p:?} outside [0,1]^d")));
            }
        }
        Ok(DeltaCover {
            d,
            delta,
            points: CoverPoints::Explicit(points),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn points(&self) -> &CoverPoints {
        &self.points
    }

    /// `|Γ|` (the implicit origin is not counted).
    pub fn len(&self) -> usize {
        match &self.points {
            CoverPoints::Grid { m } => m.pow(self.d as u32),
            CoverPoints::TrimmedGrid { len, .. } => *len,
            CoverPoints::Explicit(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn materialize(&self) -> Result<Vec<Vec<f64>>> {
        match &self.points {
            CoverPoints::Explicit(p) => Ok(p.clone()),
            CoverPoints::Grid { m } | CoverPoints::TrimmedGrid { m, .. } => {
                let size = self.len();
                if size > MATERIALIZE_LIMIT {
                    return Err(Error::BudgetExceeded {
                        what: "materializing a grid cover",
                        required: size as f64,
                        budget: MATERIALIZE_LIMIT as f64,
                        hint: "iterate the implicit grid instead",
                    });
                }
                let trim = match &self.points {
                    CoverPoints::TrimmedGrid { .. } => Some(Trim::new(self.d, *m, self.delta)),
                    _ => None,
                };
                let mut out = Vec::with_capacity(size);
                let mut idx = vec![1usize; self.d];
                loop {
                    if trim.as_ref().is_none_or(|t| t.contains(&idx)) {
                        out.push(idx.iter().map(|&k| k as f64 / *m as f64).collect());
                    }
                    if !advance(&mut idx, 1, *m) {
                        return Ok(out);
                    }
                }
            }
        }
    }
}

/// Odometer over `lo..=hi` per axis, last axis fastest.
fn advance(idx: &mut [usize], lo: usize, hi: usize) -> bool {
    for j in (0..idx.len()).rev() {
        idx[j] += 1;
        if idx[j] <= hi {
            return true;
        }
        idx[j] = lo;
    }
    false
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "delta = {delta} must lie in (0, 1]"
        )))
    }
}

/// Smallest `m` with `numerator / m <= delta`, evaluated in `f64`.
fn smallest_resolution(numerator: f64, delta: f64) -> usize {
    let mut m = (numerator / delta).ceil().max(1.0) as usize;
    while m > 1 && numerator / (m - 1) as f64 <= delta {
        m -= 1;
    }
    while numerator / m as f64 > delta {
        m += 1;
    }
    m
}

/// The minimal one-dimensional cover `{k/M : k = 1..M}`, `M = ⌈1/δ⌉`.
pub fn build_cover_1d(delta: f64) -> Result<DeltaCover> {
    check_delta(delta)?;
    Ok(DeltaCover {
        d: 1,
        delta,
        points: CoverPoints::Grid {
            m: smallest_resolution(1.0, delta),
        },
    })
}

/// `{k/M : k = 1..M}^d` with `M = ⌈d/δ⌉`.
///
/// Rounding `y` down and up to the grid changes each side by at most `1/M`,
/// so the volume gap is at most `1 - (1 - 1/M)^d <= d/M <= δ`.
pub fn build_cover_grid(d: usize, delta: f64) -> Result<DeltaCover> {
    build_cover_grid_with_budget(d, delta, DEFAULT_GRID_BUDGET)
}

pub fn build_cover_grid_with_budget(d: usize, delta: f64, budget: f64) -> Result<DeltaCover> {
    check_delta(delta)?;
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let m = smallest_resolution(d as f64, delta);
    let required = (m as f64).powi(d as i32);
    if required > budget {
        return Err(Error::BudgetExceeded {
            what: "grid cover of size M^d",
            required,
            budget,
            hint: "increase delta or lower the dimension",
        });
    }
    Ok(DeltaCover {
        d,
        delta,
        points: CoverPoints::Grid { m },
    })
}

/// Membership rule of the trimmed grid, on integer grid coordinates
/// `g ∈ {1..m}^d` standing for `g/m`.
///
/// A grid point is kept when its box has volume above δ, when it is the
/// lower corner of a cell whose upper corner has volume above δ, or when it
/// is maximal in the down-set `{vol <= δ}`. Cells above the level set are
/// bracketed by their own corners as in the full grid; cells below it by the
/// origin and a maximal point, whose volume is at most δ.
#[derive(Debug, Clone)]
pub(crate) struct Trim {
    d: usize,
    m: usize,
    denom: f64,
    delta: f64,
}

impl Trim {
    pub(crate) fn new(d: usize, m: usize, delta: f64) -> Self {
        Trim {
            d,
            m,
            denom: (m as f64).powi(d as i32),
            delta,
        }
    }

    fn product(g: &[usize]) -> u128 {
        g.iter().map(|&k| k as u128).product()
    }

    fn above(&self, product: u128) -> bool {
        product as f64 / self.denom > self.delta
    }

    pub(crate) fn contains(&self, g: &[usize]) -> bool {
        let p = Self::product(g);
        if self.above(p) {
            return true;
        }
        if g.iter().all(|&k| k < self.m) {
            let next: u128 = g.iter().map(|&k| k as u128 + 1).product();
            if self.above(next) {
                return true;
            }
        }
        // Maximal below the level set: every single step up crosses it.
        g.iter()
            .all(|&k| k == self.m || self.above(p / k as u128 * (k as u128 + 1)))
    }

    /// Raises `z` coordinate by coordinate while the volume stays at most δ.
    /// Starting below the level set this ends at a maximal point.
    fn climb(&self, z: &mut [usize]) {
        for j in 0..self.d {
            let others: u128 = z
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &k)| k as u128)
                .product();
            let guess = (self.delta * self.denom / others as f64).floor();
            let mut t = if guess.is_finite() {
                (guess as usize).clamp(z[j], self.m)
            } else {
                self.m
            };
            while t < self.m && !self.above(others * (t as u128 + 1)) {
                t += 1;
            }
            while t > z[j] && self.above(others * t as u128) {
                t -= 1;
            }
            z[j] = t;
        }
    }

    /// Tightest bracket found for the cell with lower corner `l` (0-based)
    /// and upper corner `l + 1`: the gap, or `None` when the candidate upper
    /// point is not in the cover.
    fn cell_gap(&self, l: &[usize], scratch: &mut Vec<usize>) -> Option<f64> {
        scratch.clear();
        scratch.extend(l.iter().map(|&k| k + 1));
        if !self.contains(scratch) {
            self.climb(scratch);
            if !self.contains(scratch) {
                return None;
            }
        }
        let upper = Self::product(scratch);
        let lower = if l.contains(&0) || !self.contains(l) {
            0
        } else {
            Self::product(l)
        };
        Some((upper - lower) as f64 / self.denom)
    }
}

/// The grid cover of [`build_cover_grid`] without the points strictly
/// inside the region `vol <= δ`. Same resolution `M = ⌈d/δ⌉`, same
/// bracketing guarantee, fewer points: for `d = 4, δ = 0.05` about 40% of
/// the grid remains.
pub fn build_cover_trimmed(d: usize, delta: f64) -> Result<DeltaCover> {
    let grid = build_cover_grid(d, delta)?;
    let CoverPoints::Grid { m } = grid.points else {
        unreachable!("grid builder returns a grid")
    };
    let trim = Trim::new(d, m, delta);
    let mut len = 0usize;
    let mut idx = vec![1usize; d];
    loop {
        len += trim.contains(&idx) as usize;
        if !advance(&mut idx, 1, m) {
            break;
        }
    }
    Ok(DeltaCover {
        d,
        delta,
        points: CoverPoints::TrimmedGrid { m, len },
    })
}

/// `2^d · d^d/d! · (1/δ + 1)^d`, an upper bound on the minimal cover size.
pub fn cover_cardinality_bound(d: usize, delta: f64) -> f64 {
    let d_pow_over_fact: f64 = (1..=d).map(|i| d as f64 / i as f64).product();
    2f64.powi(d as i32) * d_pow_over_fact * (1.0 / delta + 1.0).powi(d as i32)
}

/// The same bound with `d^d/d!` replaced by its Stirling majorant
/// `e^d / sqrt(2πd)`.
pub fn cover_cardinality_bound_stirling(d: usize, delta: f64) -> f64 {
    let d_f = d as f64;
    d_f.exp() / (2.0 * std::f64::consts::PI * d_f).sqrt()
        * 2f64.powi(d as i32)
        * (1.0 / delta + 1.0).powi(d as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CoverVerdict {
    Valid {
        checked: u64,
    },
    Counterexample {
        y: Vec<f64>,
        /// Volume gap of the tightest bracket found; infinite when no upper
        /// bracket exists.
        gap: f64,
    },
}

impl CoverVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, CoverVerdict::Valid { .. })
    }
}

/// Checks the bracketing property at the midpoint of every cell of the grid
/// induced by the cover's coordinates, then at `probes` uniform points.
///
/// Within an open cell the set of admissible brackets does not change, and
/// cell boundaries only admit more brackets, so the midpoint sweep alone is
/// exhaustive; the random probes are an independent second look.
pub fn verify_cover(cover: &DeltaCover, probes: u64, seed: u64) -> CoverVerdict {
    match &cover.points {
        CoverPoints::Grid { m } => verify_grid(cover.d, *m, cover.delta, probes, seed),
        CoverPoints::TrimmedGrid { m, .. } => {
            verify_trimmed(&Trim::new(cover.d, *m, cover.delta), probes, seed)
        }
        CoverPoints::Explicit(points) => {
            verify_explicit(cover.d, points, cover.delta, probes, seed)
        }
    }
}

fn verify_grid(d: usize, m: usize, delta: f64, probes: u64, seed: u64) -> CoverVerdict {
    // Exact gap of the bracket with integer lower corner `lo` and upper
    // corner `hi`: (prod hi - prod lo) / m^d.
    let denom = (m as f64).powi(d as i32);
    let gap = |lo: &[usize], hi: &[usize]| -> f64 {
        let upper: u128 = hi.iter().map(|&k| k as u128).product();
        // A lower corner touching an axis at 0 is the origin.
        let lower: u128 = lo.iter().map(|&k| k as u128).product();
        (upper - lower) as f64 / denom
    };

    let mut checked = 0u64;
    let mut cell = vec![0usize; d];
    let mut upper = vec![1usize; d];
    loop {
        for (u, c) in upper.iter_mut().zip(&cell) {
            *u = c + 1;
        }
        let g = gap(&cell, &upper);
        checked += 1;
        if g > delta {
            return CoverVerdict::Counterexample {
                y: cell.iter().map(|&c| (c as f64 + 0.5) / m as f64).collect(),
                gap: g,
            };
        }
        if !advance(&mut cell, 0, m - 1) {
            break;
        }
    }

    let mut stream = Stream::new(crate::rng::derive_stream(seed, 0));
    let mut lo = vec![0usize; d];
    let mut hi = vec![0usize; d];
    for _ in 0..probes {
        let y: Vec<f64> = (0..d).map(|_| stream.next_f64()).collect();
        for j in 0..d {
            let value = |k: usize| k as f64 / m as f64;
            let mut k = ((y[j] * m as f64).floor() as usize).min(m);
            while k > 0 && value(k) > y[j] {
                k -= 1;
            }
            while k < m && value(k + 1) <= y[j] {
                k += 1;
            }
            lo[j] = k;
            hi[j] = if value(k) == y[j] { k.max(1) } else { k + 1 };
        }
        let g = gap(&lo, &hi);
        checked += 1;
        if g > delta {
            return CoverVerdict::Counterexample { y, gap: g };
        }
    }
    CoverVerdict::Valid { checked }
}

fn verify_trimmed(trim: &Trim, probes: u64, seed: u64) -> CoverVerdict {
    let (d, m) = (trim.d, trim.m);
    let mut scratch = Vec::with_capacity(d);
    let mut check = |cell: &[usize], y: Vec<f64>| -> Option<CoverVerdict> {
        match trim.cell_gap(cell, &mut scratch) {
            Some(g) if g <= trim.delta => None,
            Some(g) => Some(CoverVerdict::Counterexample { y, gap: g }),
            None => Some(CoverVerdict::Counterexample { y, gap: 1.0 }),
        }
    };

    let mut checked = 0u64;
    let mut cell = vec![0usize; d];
    loop {
        checked += 1;
        let mid = || cell.iter().map(|&c| (c as f64 + 0.5) / m as f64).collect();
        if let Some(bad) = check(&cell, mid()) {
            return bad;
        }
        if !advance(&mut cell, 0, m - 1) {
            break;
        }
    }

    let mut stream = Stream::new(crate::rng::derive_stream(seed, 0));
    for _ in 0..probes {
        let y: Vec<f64> = (0..d).map(|_| stream.next_f64()).collect();
        for (c, &v) in cell.iter_mut().zip(&y) {
            let mut k = ((v * m as f64).floor() as usize).min(m - 1);
            while k > 0 && k as f64 / m as f64 > v {
                k -= 1;
            }
            while k + 1 < m && (k + 1) as f64 / m as f64 <= v {
                k += 1;
            }
            *c = k;
        }
        checked += 1;
        if let Some(bad) = check(&cell, y) {
            return bad;
        }
    }
    CoverVerdict::Valid { checked }
}

fn verify_explicit(
    d: usize,
    points: &[Vec<f64>],
    delta: f64,
    probes: u64,
    seed: u64,
) -> CoverVerdict {
    let tightest_gap = |y: &[f64]| -> f64 {
        let mut best_lower = 0.0f64; // the origin
        let mut best_upper = f64::INFINITY;
        for p in points {
            let vol: f64 = p.iter().product();
            if p.iter().zip(y).all(|(a, b)| a <= b) {
                best_lower = best_lower.max(vol);
            }
            if p.iter().zip(y).all(|(a, b)| a >= b) {
                best_upper = best_upper.min(vol);
            }
        }
        best_upper - best_lower
    };
    let violates = |g: f64| g > delta * (1.0 + EXPLICIT_GAP_TOL);

    let grids: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut g: Vec<f64> = points.iter().map(|p| p[j]).collect();
            g.push(0.0);
            g.push(1.0);
            g.sort_by(f64::total_cmp);
            g.dedup();
            g
        })
        .collect();
    let mut checked = 0u64;
    let mut cell = vec![0usize; d];
    let cells_per_axis: Vec<usize> = grids.iter().map(|g| g.len() - 1).collect();
    'cells: loop {
        let y: Vec<f64> = cell
            .iter()
            .zip(&grids)
            .map(|(&c, g)| 0.5 * (g[c] + g[c + 1]))
            .collect();
        let g = tightest_gap(&y);
        checked += 1;
        if violates(g) {
            return CoverVerdict::Counterexample { y, gap: g };
        }
        for j in (0..d).rev() {
            cell[j] += 1;
            if cell[j] < cells_per_axis[j] {
                continue 'cells;
            }
            cell[j] = 0;
        }
        break;
    }

    let mut stream = Stream::new(crate::rng::derive_stream(seed, 0));
    for _ in 0..probes {
        let y: Vec<f64> = (0..d).map(|_| stream.next_f64()).collect();
        let g = tightest_gap(&y);
        checked += 1;
        if violates(g) {
            return CoverVerdict::Counterexample { y, gap: g };
        }
    }
    CoverVerdict::Valid { checked }
}
