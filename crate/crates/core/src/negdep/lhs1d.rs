//! Joint probabilities for a one-dimensional Latin hypercube sample.
//!
//! Points `X_1..X_N` occupy distinct cells `[i/N, (i+1)/N)` chosen by a
//! uniform permutation and are uniform inside their cell. All quantities
//! are computed in cell units (`[0, N)`).

use serde::{Deserialize, Serialize};

use super::{IntervalEvent, RATIO_TOL};
use crate::error::{Error, Result};

/// Largest `N` for which factorial-sized intermediates stay finite.
const MAX_N: usize = 150;

/// `FF(m, j) / FF(N, j)` for falling factorials, `0` when `j > m`.
fn falling_ratio(m: i64, n: usize, j: usize) -> f64 {
    if j as i64 > m {
        return 0.0;
    }
    (0..j)
        .map(|i| (m - i as i64) as f64 / (n - i) as f64)
        .product()
}

/// `P(X_1, ..., X_ν ∈ [a, b))`.
///
/// With `m = β − α` the event splits by how many of the ν points sit in the
/// interior cells `[α, β)` versus the two boundary cells:
///
/// ```text
/// P_ν = FF(m,ν)/FF(N,ν)
///     + ν · FF(m,ν−1)/FF(N,ν−1) · (ε_a + ε_b)/(N−ν+1)
///     + ν(ν−1) · FF(m,ν−2)/FF(N,ν−2) · ε_a ε_b / ((N−ν+2)(N−ν+1))
/// ```
///
/// The formula is used for `m <= N − 2`. For `m = N − 1` the value comes
/// from exact summation ([`lhs1d_two_interval_prob`] with `k = ν`).
pub fn lhs1d_interval_prob(ev: &IntervalEvent, nu: usize) -> Result<f64> {
    let n = ev.n();
    if nu > n {
        return Err(Error::invalid(format!("nu = {nu} exceeds N = {n}")));
    }
    match nu {
        0 => return Ok(1.0),
        1 => return Ok(ev.length()),
        _ => {}
    }
    let m = ev.beta() - ev.alpha();
    if m < 0 {
        // Both ends inside one cell: at most one point can hit it.
        return Ok(0.0);
    }
    if m == n as i64 - 1 {
        return lhs1d_two_interval_prob(ev, Direction::Inner, nu, nu);
    }
    let (ea, eb) = (ev.eps_a(), ev.eps_b());
    let nf = n as f64;
    let v = nu as f64;
    let interior = falling_ratio(m, n, nu);
    let one_boundary = v * falling_ratio(m, n, nu - 1) * (ea + eb) / (nf - v + 1.0);
    let two_boundary =
        v * (v - 1.0) * falling_ratio(m, n, nu - 2) * ea * eb / ((nf - v + 2.0) * (nf - v + 1.0));
    Ok(interior + one_boundary + two_boundary)
}

/// Which pair of sets the two-interval event uses.
///
/// * `Inner` (σ = 0): `I₁ = [a, b)`, `I₂ = [0, b)`.
/// * `Outer` (σ = 1): `I₁ = [b, 1)`, `I₂ = [0, a) ∪ [b, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Inner,
    Outer,
}

impl Direction {
    pub fn sigma(self) -> u8 {
        match self {
            Direction::Inner => 0,
            Direction::Outer => 1,
        }
    }

    pub fn from_sigma(sigma: u8) -> Result<Self> {
        match sigma {
            0 => Ok(Direction::Inner),
            1 => Ok(Direction::Outer),
            s => Err(Error::invalid(format!("sigma must be 0 or 1, got {s}"))),
        }
    }

    /// `(λ(I₁), λ(I₂))`.
    pub fn lengths(self, ev: &IntervalEvent) -> (f64, f64) {
        let (lo, hi) = ev.scaled();
        let n = ev.n() as f64;
        match self {
            Direction::Inner => ((hi - lo) / n, hi / n),
            Direction::Outer => ((n - hi) / n, (lo + n - hi) / n),
        }
    }

    /// Fractions of cell `i` covered by `I₁` and `I₂`.
    fn cell_weights(self, ev: &IntervalEvent, i: usize) -> (f64, f64) {
        let (lo, hi) = ev.scaled();
        let n = ev.n() as f64;
        let cell = i as f64;
        let overlap = |s: f64, t: f64| (t.min(cell + 1.0) - s.max(cell)).max(0.0);
        match self {
            Direction::Inner => (overlap(lo, hi), overlap(0.0, hi)),
            Direction::Outer => (overlap(hi, n), overlap(0.0, lo) + overlap(hi, n)),
        }
    }
}

/// `P(X_1..X_ν ∈ I₁ ∧ X_{ν+1}..X_k ∈ I₂)`, summed exactly over all
/// injective assignments of the `k` points to cells.
///
/// Cells with equal `(I₁, I₂)` coverage form a category (at most five:
/// both interiors, both boundary cells and the rest). If `x_t` points of the
/// first group and `y_t` of the second land in category `t` of size `c_t`,
/// the number of assignments is `ν! (k−ν)! ∏ FF(c_t, x_t + y_t) / (x_t! y_t!)`,
/// each weighted by `∏ w₁^x w₂^y` and divided by `FF(N, k)`.
pub fn lhs1d_two_interval_prob(
    ev: &IntervalEvent,
    direction: Direction,
    k: usize,
    nu: usize,
) -> Result<f64> {
    let n = ev.n();
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds N = {n}")));
    }
    if nu > k {
        return Err(Error::invalid(format!("nu = {nu} exceeds k = {k}")));
    }
    if n > MAX_N {
        return Err(Error::invalid(format!(
            "exact summation supports N <= {MAX_N}, got {n}"
        )));
    }

    let mut categories: Vec<(f64, f64, usize)> = Vec::new();
    for i in 0..n {
        let (w1, w2) = direction.cell_weights(ev, i);
        match categories
            .iter_mut()
            .find(|(c1, c2, _)| c1.to_bits() == w1.to_bits() && c2.to_bits() == w2.to_bits())
        {
            Some(cat) => cat.2 += 1,
            None => categories.push((w1, w2, 1)),
        }
    }

    let first = nu;
    let second = k - nu;
    let inv_fact: Vec<f64> = {
        let mut v = vec![1.0f64; k + 1];
        for i in 1..=k {
            v[i] = v[i - 1] / i as f64;
        }
        v
    };

    // dp[x][y]: weighted count with x first-group and y second-group points
    // placed so far.
    let mut dp = vec![vec![0.0f64; second + 1]; first + 1];
    dp[0][0] = 1.0;
    for &(w1, w2, count) in &categories {
        let mut next = vec![vec![0.0f64; second + 1]; first + 1];
        for x in 0..=first {
            for y in 0..=second {
                let base = dp[x][y];
                if base == 0.0 {
                    continue;
                }
                for i in 0..=(first - x).min(count) {
                    for j in 0..=(second - y).min(count - i) {
                        let ff: f64 = (0..i + j).map(|t| (count - t) as f64).product();
                        next[x + i][y + j] += base
                            * ff
                            * w1.powi(i as i32)
                            * w2.powi(j as i32)
                            * inv_fact[i]
                            * inv_fact[j];
                    }
                }
            }
        }
        dp = next;
    }

    let orderings = (1..=first).map(|i| i as f64).product::<f64>()
        * (1..=second).map(|i| i as f64).product::<f64>();
    let assignments: f64 = (0..k).map(|i| (n - i) as f64).product();
    Ok(dp[first][second] * orderings / assignments)
}

/// Outcome of sweeping the per-coordinate condition over all
/// `σ ∈ {0,1}`, `0 <= ν <= k <= N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateVerdict {
    pub max_ratio: f64,
    /// `(σ, k, ν)` attaining the maximum.
    pub argmax: (u8, usize, usize),
    pub delta: f64,
    pub holds: bool,
}

/// Checks `P ≤ δ · λ(I₁)^ν · λ(I₂)^(k−ν)` for every `(σ, k, ν)` using the
/// supplied joint-probability oracle. `0/0` counts as ratio `1`, a positive
/// probability over a zero product as infinite.
///
/// Any sampler whose coordinates are mutually independent and pass this
/// check per coordinate is `∏ δ_i`-negatively dependent for box differences.
pub fn check_coordinate_condition<F>(
    mut oracle: F,
    ev: &IntervalEvent,
    delta: f64,
) -> Result<CoordinateVerdict>
where
    F: FnMut(Direction, usize, usize) -> Result<f64>,
{
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = (0, 0, 0);
    for direction in [Direction::Inner, Direction::Outer] {
        let (l1, l2) = direction.lengths(ev);
        for k in 0..=ev.n() {
            for nu in 0..=k {
                let p = oracle(direction, k, nu)?;
                let product = l1.powi(nu as i32) * l2.powi((k - nu) as i32);
                let ratio = match (product == 0.0, p == 0.0) {
                    (false, _) => p / product,
                    (true, true) => 1.0,
                    (true, false) => f64::INFINITY,
                };
                if ratio > max_ratio {
                    max_ratio = ratio;
                    argmax = (direction.sigma(), k, nu);
                }
            }
        }
    }
    Ok(CoordinateVerdict {
        max_ratio,
        argmax,
        delta,
        holds: max_ratio <= delta * (1.0 + RATIO_TOL),
    })
}

/// Joint probabilities of independent uniform coordinates.
pub fn independent_oracle(ev: IntervalEvent) -> impl FnMut(Direction, usize, usize) -> Result<f64> {
    move |direction, k, nu| {
        let (l1, l2) = direction.lengths(&ev);
        Ok(l1.powi(nu as i32) * l2.powi((k - nu) as i32))
    }
}

/// Joint probabilities of a one-dimensional Latin hypercube sample.
pub fn lhs_oracle(ev: IntervalEvent) -> impl FnMut(Direction, usize, usize) -> Result<f64> {
    move |direction, k, nu| lhs1d_two_interval_prob(&ev, direction, k, nu)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::E;

    use super::*;

    #[test]
    fn closed_form_small_cases() {
        let ev = IntervalEvent::new(2, 0.25, 0.75).unwrap();
        assert!((lhs1d_interval_prob(&ev, 2).unwrap() - 0.25).abs() < 1e-15);
        let ev = IntervalEvent::new(4, 0.0, 0.5).unwrap();
        assert!((lhs1d_interval_prob(&ev, 2).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(lhs1d_interval_prob(&ev, 0).unwrap(), 1.0);
        assert!(lhs1d_interval_prob(&ev, 5).is_err());
    }

    #[test]
    fn closed_form_matches_summation() {
        for n in 1..=9 {
            for &(a, b) in &[
                (0.0, 0.35),
                (0.12, 0.5),
                (0.2, 0.93),
                (0.31, 0.33),
                (0.0, 0.99),
            ] {
                let ev = IntervalEvent::new(n, a, b).unwrap();
                for nu in 0..=n {
                    let closed = lhs1d_interval_prob(&ev, nu).unwrap();
                    let summed = lhs1d_two_interval_prob(&ev, Direction::Inner, nu, nu).unwrap();
                    assert!((closed - summed).abs() < 1e-13, "n={n} a={a} b={b} nu={nu}");
                }
            }
        }
    }

    #[test]
    fn grid_aligned_inner_reduces_to_falling_ratio() {
        let n = 8;
        let ev = IntervalEvent::new(n, 0.0, 5.0 / 8.0).unwrap();
        for nu in 0..=n {
            let p = lhs1d_two_interval_prob(&ev, Direction::Inner, nu, nu).unwrap();
            assert!((p - falling_ratio(5, n, nu)).abs() < 1e-15);
        }
    }

    #[test]
    fn outer_example_by_hand() {
        let ev = IntervalEvent::new(2, 0.25, 0.75).unwrap();
        let p = lhs1d_two_interval_prob(&ev, Direction::Outer, 2, 1).unwrap();
        assert!((p - 0.125).abs() < 1e-15);
        let verdict = check_coordinate_condition(lhs_oracle(ev), &ev, ev.delta()).unwrap();
        assert!(verdict.holds);
    }

    #[test]
    fn independent_oracle_has_unit_ratio() {
        let ev = IntervalEvent::new(6, 0.37, 0.81).unwrap();
        let v = check_coordinate_condition(independent_oracle(ev), &ev, 1.0).unwrap();
        assert!((v.max_ratio - 1.0).abs() < 1e-12);
        assert!(v.holds);
    }

    #[test]
    fn grid_aligned_lhs_is_negatively_dependent() {
        let ev = IntervalEvent::new(4, 0.25, 0.75).unwrap();
        let v = check_coordinate_condition(lhs_oracle(ev), &ev, 1.0).unwrap();
        assert!(v.holds, "{v:?}");
    }

    #[test]
    fn off_grid_lhs_needs_e() {
        let ev = IntervalEvent::new(6, 0.37, 0.81).unwrap();
        assert_eq!(ev.delta(), E);
        let v = check_coordinate_condition(lhs_oracle(ev), &ev, E).unwrap();
        assert!(v.holds && v.max_ratio > 1.0, "{v:?}");
    }

    #[test]
    fn argument_errors() {
        let ev = IntervalEvent::new(3, 0.1, 0.2).unwrap();
        assert!(lhs1d_two_interval_prob(&ev, Direction::Inner, 4, 0).is_err());
        assert!(lhs1d_two_interval_prob(&ev, Direction::Inner, 2, 3).is_err());
        assert!(Direction::from_sigma(2).is_err());
    }
}
