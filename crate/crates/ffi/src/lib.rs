//! C ABI over `negdep-qmc`.
//!
//! Objects are opaque handles created by `nq_*_new` / `nq_sample` style
//! constructors and released with the matching `nq_*_free`. Every fallible
//! call returns an [`NqStatus`]; on failure a description is available from
//! [`nq_last_error`] on the same thread until the next failing call.
//! Results are written through out-pointers, which are left untouched on
//! failure.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use negdep_qmc::bounds::{self, BoundConstants, Precision, TailQuery};
use negdep_qmc::covers::{self, DeltaCover};
use negdep_qmc::discrepancy::{self, BoxDifference};
use negdep_qmc::negdep::gamma_for_boxdiff;
use negdep_qmc::samplers::{sample, SampleSpec, SamplerKind};
use negdep_qmc::{Error, PointSet};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NqStatus {
    Ok = 0,
    InvalidArgument = 1,
    DimensionMismatch = 2,
    EmptyPointSet = 3,
    CoordinateOutOfRange = 4,
    BudgetExceeded = 5,
    DegenerateRegion = 6,
    Parse = 7,
    Io = 8,
    /// A required pointer argument was null.
    NullPointer = 9,
    /// The library panicked; this is a bug.
    Internal = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NqSamplerKind {
    MonteCarlo = 0,
    Lhs = 1,
    CenteredLhs = 2,
    PaddedLhs = 3,
}

impl From<NqSamplerKind> for SamplerKind {
    fn from(k: NqSamplerKind) -> Self {
        match k {
            NqSamplerKind::MonteCarlo => SamplerKind::MonteCarlo,
            NqSamplerKind::Lhs => SamplerKind::Lhs,
            NqSamplerKind::CenteredLhs => SamplerKind::CenteredLhs,
            NqSamplerKind::PaddedLhs => SamplerKind::PaddedLhs,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NqPrecision {
    /// Rounded table coefficients.
    Published = 0,
    /// Coefficients recomputed without rounding.
    Full = 1,
}

/// Opaque point set.
pub struct NqPointSet(PointSet);

/// Opaque δ-cover.
pub struct NqCover(DeltaCover);

/// Opaque set of discrepancy-bound constants.
pub struct NqConstants(BoundConstants);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> NqStatus {
    match err {
        Error::InvalidArgument(_) => NqStatus::InvalidArgument,
        Error::DimensionMismatch { .. } => NqStatus::DimensionMismatch,
        Error::EmptyPointSet => NqStatus::EmptyPointSet,
        Error::CoordinateOutOfRange { .. } => NqStatus::CoordinateOutOfRange,
        Error::BudgetExceeded { .. } => NqStatus::BudgetExceeded,
        Error::DegenerateRegion { .. } => NqStatus::DegenerateRegion,
        Error::Parse { .. } => NqStatus::Parse,
        Error::Io { .. } => NqStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), NqFail>) -> NqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NqStatus::Ok,
        Ok(Err(NqFail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(NqFail::Null(what))) => {
            set_last_error(format!("null pointer passed for {what}"));
            NqStatus::NullPointer
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            NqStatus::Internal
        }
    }
}

enum NqFail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for NqFail {
    fn from(e: Error) -> Self {
        NqFail::Lib(e)
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, NqFail> {
    p.as_ref().ok_or(NqFail::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), NqFail> {
    if out.is_null() {
        return Err(NqFail::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], NqFail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(NqFail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Draws trial `trial` of a sampler. `d_lhs` is only read for padded
/// samples.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn nq_sample(
    kind: NqSamplerKind,
    n: usize,
    d: usize,
    d_lhs: usize,
    seed: u64,
    trial: u64,
    out: *mut *mut NqPointSet,
) -> NqStatus {
    guard(|| {
        let spec = SampleSpec::of_kind(kind.into(), n, d, d_lhs, seed).with_trial(trial);
        let p = sample(&spec)?;
        write(out, Box::into_raw(Box::new(NqPointSet(p))), "out")
    })
}

/// Builds a point set from `n * d` row-major coordinates in `[0,1)`.
///
/// # Safety
/// `coords` must point to `n * d` readable doubles; `out` must be valid for
/// a pointer write.
#[no_mangle]
pub unsafe extern "C" fn nq_pointset_new(
    n: usize,
    d: usize,
    coords: *const f64,
    out: *mut *mut NqPointSet,
) -> NqStatus {
    guard(|| {
        let len = n
            .checked_mul(d)
            .ok_or_else(|| Error::InvalidArgument("n * d overflows".into()))?;
        let flat = slice(coords, len, "coords")?;
        let points = if d == 0 {
            vec![Vec::new(); n]
        } else {
            flat.chunks_exact(d).map(<[f64]>::to_vec).collect()
        };
        let p = PointSet::new(d, points)?;
        write(out, Box::into_raw(Box::new(NqPointSet(p))), "out")
    })
}

/// # Safety
/// `p` must be null or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nq_pointset_free(p: *mut NqPointSet) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nq_pointset_len(p: *const NqPointSet) -> usize {
    p.as_ref().map_or(0, |p| p.0.len())
}

/// Dimension, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nq_pointset_dim(p: *const NqPointSet) -> usize {
    p.as_ref().map_or(0, |p| p.0.dim())
}

/// Copies the coordinates row-major into `buf`, which must hold `len`
/// doubles with `len >= n * d`.
///
/// # Safety
/// `p` must be a live handle and `buf` valid for `len` double writes.
#[no_mangle]
pub unsafe extern "C" fn nq_pointset_coords(
    p: *const NqPointSet,
    buf: *mut f64,
    len: usize,
) -> NqStatus {
    guard(|| {
        let p = &deref(p, "pointset")?.0;
        let needed = p.len() * p.dim();
        if len < needed {
            return Err(Error::InvalidArgument(format!(
                "buffer holds {len} values, {needed} needed"
            ))
            .into());
        }
        if needed == 0 {
            return Ok(());
        }
        if buf.is_null() {
            return Err(NqFail::Null("buf"));
        }
        let dst = std::slice::from_raw_parts_mut(buf, needed);
        for (row, x) in dst.chunks_exact_mut(p.dim()).zip(p.points()) {
            row.copy_from_slice(x);
        }
        Ok(())
    })
}

/// Exact star discrepancy.
///
/// # Safety
/// `p` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn nq_star_discrepancy_exact(
    p: *const NqPointSet,
    out: *mut f64,
) -> NqStatus {
    guard(|| {
        let v = discrepancy::star_discrepancy_exact(&deref(p, "pointset")?.0)?;
        write(out, v, "out")
    })
}

/// Builds a δ-cover: the optimal one-dimensional cover for `d == 1`, the
/// uniform grid cover otherwise.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn nq_cover_new(d: usize, delta: f64, out: *mut *mut NqCover) -> NqStatus {
    guard(|| {
        let c = if d == 1 {
            covers::build_cover_1d(delta)?
        } else {
            covers::build_cover_grid(d, delta)?
        };
        write(out, Box::into_raw(Box::new(NqCover(c))), "out")
    })
}

/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nq_cover_free(c: *mut NqCover) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of cover points, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nq_cover_len(c: *const NqCover) -> usize {
    c.as_ref().map_or(0, |c| c.0.len())
}

/// Checks the bracketing property; `valid` receives 1 or 0.
///
/// # Safety
/// `c` must be a live handle and `valid` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn nq_cover_verify(
    c: *const NqCover,
    probes: u64,
    seed: u64,
    valid: *mut i32,
) -> NqStatus {
    guard(|| {
        let verdict = covers::verify_cover(&deref(c, "cover")?.0, probes, seed);
        write(valid, verdict.is_valid() as i32, "valid")
    })
}

/// Cover bounds `lower <= D* <= upper`.
///
/// # Safety
/// Handles must be live; `lower` and `upper` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nq_star_discrepancy_cover(
    p: *const NqPointSet,
    c: *const NqCover,
    lower: *mut f64,
    upper: *mut f64,
) -> NqStatus {
    guard(|| {
        let (lo, hi) =
            discrepancy::star_discrepancy_cover(&deref(p, "pointset")?.0, &deref(c, "cover")?.0)?;
        if upper.is_null() {
            return Err(NqFail::Null("upper"));
        }
        write(lower, lo, "lower")?;
        write(upper, hi, "upper")
    })
}

/// Dependence factor `∏ δ_i` of the box difference `[0,b) \ [0,a)` for an
/// `n`-point sample with `d_lhs` stratified coordinates.
///
/// # Safety
/// `a` and `b` must point to `d` readable doubles; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn nq_gamma_for_boxdiff(
    a: *const f64,
    b: *const f64,
    d: usize,
    n: usize,
    d_lhs: usize,
    out: *mut f64,
) -> NqStatus {
    guard(|| {
        let region = BoxDifference::new(slice(a, d, "a")?.to_vec(), slice(b, d, "b")?.to_vec())?;
        write(out, gamma_for_boxdiff(&region, n, d_lhs)?, "out")
    })
}

/// `2γ exp(−2t²/n)`, unclamped.
#[no_mangle]
pub extern "C" fn nq_hoeffding_tail(n: usize, gamma: f64, t: f64) -> f64 {
    bounds::hoeffding_tail(&TailQuery::new(n, gamma, t))
}

/// `2γ exp(−t²/(2nσ² + 2t/3))`, unclamped.
#[no_mangle]
pub extern "C" fn nq_bernstein_tail(n: usize, gamma: f64, t: f64, sigma2: f64) -> f64 {
    bounds::bernstein_tail(&TailQuery::new(n, gamma, t).with_sigma2(sigma2))
}

/// Default constants in the requested precision.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn nq_constants_new(
    precision: NqPrecision,
    out: *mut *mut NqConstants,
) -> NqStatus {
    guard(|| {
        let k = BoundConstants::with_precision(match precision {
            NqPrecision::Published => Precision::Published,
            NqPrecision::Full => Precision::Full,
        });
        write(out, Box::into_raw(Box::new(NqConstants(k))), "out")
    })
}

/// Constants recomputed for base level `mu` and parameter `tau_mu`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn nq_constants_derive(
    mu: u32,
    tau_mu: f64,
    out: *mut *mut NqConstants,
) -> NqStatus {
    guard(|| {
        let k = bounds::derive_constants(mu, tau_mu)?;
        write(out, Box::into_raw(Box::new(NqConstants(k))), "out")
    })
}

/// # Safety
/// `k` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nq_constants_free(k: *mut NqConstants) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Coefficients `(coeff_exp, coeff_off, coeff_conf)`.
///
/// # Safety
/// `k` must be a live handle; the out-pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nq_constants_coefficients(
    k: *const NqConstants,
    coeff_exp: *mut f64,
    coeff_off: *mut f64,
    coeff_conf: *mut f64,
) -> NqStatus {
    guard(|| {
        let k = &deref(k, "constants")?.0;
        if coeff_off.is_null() || coeff_conf.is_null() {
            return Err(NqFail::Null("coefficient out-pointer"));
        }
        write(coeff_exp, k.coeff_exp, "coeff_exp")?;
        write(coeff_off, k.coeff_off, "coeff_off")?;
        write(coeff_conf, k.coeff_conf, "coeff_conf")
    })
}

/// Guaranteed lower bound on `P(D* <= c sqrt(d/N))`.
///
/// # Safety
/// `k` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn nq_success_probability(
    k: *const NqConstants,
    c: f64,
    d: usize,
    rho: f64,
    out: *mut f64,
) -> NqStatus {
    guard(|| {
        let v = bounds::success_probability(c, d, rho, &deref(k, "constants")?.0)?;
        write(out, v, "out")
    })
}

/// Smallest coefficient with a positive success probability.
///
/// # Safety
/// `k` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn nq_min_coefficient(
    k: *const NqConstants,
    rho: f64,
    out: *mut f64,
) -> NqStatus {
    guard(|| {
        let v = bounds::min_coefficient(rho, &deref(k, "constants")?.0)?;
        write(out, v, "out")
    })
}

/// Discrepancy level reached with probability at least `q`.
///
/// # Safety
/// `k` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn nq_bound_at_confidence(
    k: *const NqConstants,
    n: usize,
    d: usize,
    rho: f64,
    q: f64,
    out: *mut f64,
) -> NqStatus {
    guard(|| {
        let v = bounds::bound_at_confidence(n, d, rho, q, &deref(k, "constants")?.0)?;
        write(out, v, "out")
    })
}

/// Sufficient number of points for `D* <= eps` in dimension `d`.
///
/// # Safety
/// `k` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn nq_inverse_discrepancy_bound(
    k: *const NqConstants,
    eps: f64,
    d: usize,
    rho: f64,
    out: *mut u64,
) -> NqStatus {
    guard(|| {
        let v = bounds::inverse_discrepancy_bound(eps, d, rho, &deref(k, "constants")?.0)?;
        write(out, v, "out")
    })
}
