//! Negative dependence of Latin hypercube box indicators.
//!
//! [`lhs1d`] holds the one-dimensional joint probabilities (closed form and
//! exact summation over cell assignments), [`joint`] the brute-force
//! permutation enumeration for `d`-dimensional (padded) samples, and
//! [`report`] the ratio tables compared against the theoretical factor
//! `γ = ∏ δ_i`.

pub mod joint;
pub mod lhs1d;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::discrepancy::BoxDifference;
use crate::error::{Error, Result};

pub use joint::{
    joint_prob_exact, joint_probs, JointProbs, Membership, DEFAULT_PERMUTATION_BUDGET,
};
pub use lhs1d::{
    check_coordinate_condition, independent_oracle, lhs1d_interval_prob, lhs1d_two_interval_prob,
    lhs_oracle, CoordinateVerdict, Direction,
};
pub use report::{dependence_report, rho_from_gamma, DependenceReport, Evaluation, ReportMethod};

/// Relative slack when comparing a computed ratio against its bound.
pub const RATIO_TOL: f64 = 1e-12;

/// `N·x` is an integer, i.e. `x ∈ G¹_N = {0, 1/N, ..., 1}`.
///
/// The product is the rounded `f64` product, so decimal inputs such as
/// `0.3` with `N = 10` count as grid points.
pub fn on_grid(x: f64, n: usize) -> bool {
    (n as f64 * x).fract() == 0.0
}

/// `1` when both ends lie on `G¹_N` or `a = 0`, else `e`.
pub fn delta_factor(a: f64, b: f64, n: usize) -> f64 {
    if a == 0.0 || (on_grid(a, n) && on_grid(b, n)) {
        1.0
    } else {
        std::f64::consts::E
    }
}

/// `∏ δ_i` over the first `d_lhs` coordinates; Monte Carlo coordinates
/// contribute `1`.
pub fn gamma_for_boxdiff(region: &BoxDifference, n: usize, d_lhs: usize) -> Result<f64> {
    if d_lhs > region.a().len() {
        return Err(Error::invalid(format!(
            "d_lhs = {d_lhs} exceeds region dimension {}",
            region.a().len()
        )));
    }
    Ok(region
        .a()
        .iter()
        .zip(region.b())
        .take(d_lhs)
        .map(|(&a, &b)| delta_factor(a, b, n))
        .product())
}

/// The interval `[a, b)` seen by a one-dimensional LHS of size `N`.
///
/// Coordinates are kept in cell units: `lo = N·a = α − ε_a` and
/// `hi = N·b = β + ε_b` with `α = ⌈N·a⌉`, `β = ⌊N·b⌋` and
/// `ε_a, ε_b ∈ [0, 1)`. A grid endpoint has `ε = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalEvent {
    n: usize,
    lo: f64,
    hi: f64,
}

impl IntervalEvent {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("LHS size must be at least 1"));
        }
        if !(0.0 <= a && a <= b && b < 1.0) {
            return Err(Error::invalid(format!(
                "interval needs 0 <= a <= b < 1, got a = {a}, b = {b}"
            )));
        }
        Ok(IntervalEvent {
            n,
            lo: n as f64 * a,
            hi: n as f64 * b,
        })
    }

    /// Builds `a = (α − ε_a)/N`, `b = (β + ε_b)/N` directly in cell units.
    pub fn from_grid(n: usize, alpha: usize, eps_a: f64, beta: usize, eps_b: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps_a) || !(0.0..1.0).contains(&eps_b) {
            return Err(Error::invalid("eps_a and eps_b must lie in [0, 1)"));
        }
        if alpha == 0 && eps_a != 0.0 {
            return Err(Error::invalid("alpha = 0 forces eps_a = 0"));
        }
        let lo = alpha as f64 - eps_a;
        let hi = beta as f64 + eps_b;
        if n == 0 || lo > hi || hi >= n as f64 {
            return Err(Error::invalid(format!(
                "grid interval [{lo}, {hi}) invalid for N = {n}"
            )));
        }
        Ok(IntervalEvent { n, lo, hi })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.lo / self.n as f64
    }

    pub fn b(&self) -> f64 {
        self.hi / self.n as f64
    }

    /// `N·a` and `N·b`.
    pub fn scaled(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn alpha(&self) -> i64 {
        self.lo.ceil() as i64
    }

    pub fn beta(&self) -> i64 {
        self.hi.floor() as i64
    }

    pub fn eps_a(&self) -> f64 {
        self.lo.ceil() - self.lo
    }

    pub fn eps_b(&self) -> f64 {
        self.hi - self.hi.floor()
    }

    /// `λ([a,b))`.
    pub fn length(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    /// `δ` for this interval: `1` on the grid or when `a = 0`, else `e`.
    pub fn delta(&self) -> f64 {
        if self.lo == 0.0 || (self.lo.fract() == 0.0 && self.hi.fract() == 0.0) {
            1.0
        } else {
            std::f64::consts::E
        }
    }
}
