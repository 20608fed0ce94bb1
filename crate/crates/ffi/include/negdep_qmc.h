#ifndef NEGDEP_QMC_H
#define NEGDEP_QMC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum NqStatus {
  NQ_STATUS_OK = 0,
  NQ_STATUS_INVALID_ARGUMENT = 1,
  NQ_STATUS_DIMENSION_MISMATCH = 2,
  NQ_STATUS_EMPTY_POINT_SET = 3,
  NQ_STATUS_COORDINATE_OUT_OF_RANGE = 4,
  NQ_STATUS_BUDGET_EXCEEDED = 5,
  NQ_STATUS_DEGENERATE_REGION = 6,
  NQ_STATUS_PARSE = 7,
  NQ_STATUS_IO = 8,
  // A required pointer argument was null.
  NQ_STATUS_NULL_POINTER = 9,
  // The library panicked; this is a bug.
  NQ_STATUS_INTERNAL = 10,
} NqStatus;

typedef enum NqSamplerKind {
  NQ_SAMPLER_KIND_MONTE_CARLO = 0,
  NQ_SAMPLER_KIND_LHS = 1,
  NQ_SAMPLER_KIND_CENTERED_LHS = 2,
  NQ_SAMPLER_KIND_PADDED_LHS = 3,
} NqSamplerKind;

typedef enum NqPrecision {
  // Rounded table coefficients.
  NQ_PRECISION_PUBLISHED = 0,
  // Coefficients recomputed without rounding.
  NQ_PRECISION_FULL = 1,
} NqPrecision;

// Opaque set of discrepancy-bound constants.
typedef struct NqConstants NqConstants;

// Opaque δ-cover.
typedef struct NqCover NqCover;

// Opaque point set.
typedef struct NqPointSet NqPointSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *nq_last_error(void);

// Library version as a static NUL-terminated string.
const char *nq_version(void);

// Draws trial `trial` of a sampler. `d_lhs` is only read for padded
// samples.
//
// # Safety
// `out` must be valid for a pointer write.
enum NqStatus nq_sample(enum NqSamplerKind kind,
                        size_t n,
                        size_t d,
                        size_t d_lhs,
                        uint64_t seed,
                        uint64_t trial,
                        struct NqPointSet **out);

// Builds a point set from `n * d` row-major coordinates in `[0,1)`.
//
// # Safety
// `coords` must point to `n * d` readable doubles; `out` must be valid for
// a pointer write.
enum NqStatus nq_pointset_new(size_t n, size_t d, const double *coords, struct NqPointSet **out);

// # Safety
// `p` must be null or a handle from this library that was not yet freed.
void nq_pointset_free(struct NqPointSet *p);

// Number of points, or 0 for a null handle.
//
// # Safety
// `p` must be null or a live handle.
size_t nq_pointset_len(const struct NqPointSet *p);

// Dimension, or 0 for a null handle.
//
// # Safety
// `p` must be null or a live handle.
size_t nq_pointset_dim(const struct NqPointSet *p);

// Copies the coordinates row-major into `buf`, which must hold `len`
// doubles with `len >= n * d`.
//
// # Safety
// `p` must be a live handle and `buf` valid for `len` double writes.
enum NqStatus nq_pointset_coords(const struct NqPointSet *p, double *buf, size_t len);

// Exact star discrepancy.
//
// # Safety
// `p` must be a live handle and `out` valid for a write.
enum NqStatus nq_star_discrepancy_exact(const struct NqPointSet *p, double *out);

// Builds a δ-cover: the optimal one-dimensional cover for `d == 1`, the
// uniform grid cover otherwise.
//
// # Safety
// `out` must be valid for a pointer write.
enum NqStatus nq_cover_new(size_t d, double delta, struct NqCover **out);

// # Safety
// `c` must be null or a live handle.
void nq_cover_free(struct NqCover *c);

// Number of cover points, or 0 for a null handle.
//
// # Safety
// `c` must be null or a live handle.
size_t nq_cover_len(const struct NqCover *c);

// Checks the bracketing property; `valid` receives 1 or 0.
//
// # Safety
// `c` must be a live handle and `valid` valid for a write.
enum NqStatus nq_cover_verify(const struct NqCover *c,
                              uint64_t probes,
                              uint64_t seed,
                              int32_t *valid);

// Cover bounds `lower <= D* <= upper`.
//
// # Safety
// Handles must be live; `lower` and `upper` valid for writes.
enum NqStatus nq_star_discrepancy_cover(const struct NqPointSet *p,
                                        const struct NqCover *c,
                                        double *lower,
                                        double *upper);

// Dependence factor `∏ δ_i` of the box difference `[0,b) \ [0,a)` for an
// `n`-point sample with `d_lhs` stratified coordinates.
//
// # Safety
// `a` and `b` must point to `d` readable doubles; `out` valid for a write.
enum NqStatus nq_gamma_for_boxdiff(const double *a,
                                   const double *b,
                                   size_t d,
                                   size_t n,
                                   size_t d_lhs,
                                   double *out);

// `2γ exp(−2t²/n)`, unclamped.
double nq_hoeffding_tail(size_t n, double gamma, double t);

// `2γ exp(−t²/(2nσ² + 2t/3))`, unclamped.
double nq_bernstein_tail(size_t n, double gamma, double t, double sigma2);

// Default constants in the requested precision.
//
// # Safety
// `out` must be valid for a pointer write.
enum NqStatus nq_constants_new(enum NqPrecision precision, struct NqConstants **out);

// Constants recomputed for base level `mu` and parameter `tau_mu`.
//
// # Safety
// `out` must be valid for a pointer write.
enum NqStatus nq_constants_derive(uint32_t mu, double tau_mu, struct NqConstants **out);

// # Safety
// `k` must be null or a live handle.
void nq_constants_free(struct NqConstants *k);

// Coefficients `(coeff_exp, coeff_off, coeff_conf)`.
//
// # Safety
// `k` must be a live handle; the out-pointers valid for writes.
enum NqStatus nq_constants_coefficients(const struct NqConstants *k,
                                        double *coeff_exp,
                                        double *coeff_off,
                                        double *coeff_conf);

// Guaranteed lower bound on `P(D* <= c sqrt(d/N))`.
//
// # Safety
// `k` must be a live handle and `out` valid for a write.
enum NqStatus nq_success_probability(const struct NqConstants *k,
                                     double c,
                                     size_t d,
                                     double rho,
                                     double *out);

// Smallest coefficient with a positive success probability.
//
// # Safety
// `k` must be a live handle and `out` valid for a write.
enum NqStatus nq_min_coefficient(const struct NqConstants *k, double rho, double *out);

// Discrepancy level reached with probability at least `q`.
//
// # Safety
// `k` must be a live handle and `out` valid for a write.
enum NqStatus nq_bound_at_confidence(const struct NqConstants *k,
                                     size_t n,
                                     size_t d,
                                     double rho,
                                     double q,
                                     double *out);

// Sufficient number of points for `D* <= eps` in dimension `d`.
//
// # Safety
// `k` must be a live handle and `out` valid for a write.
enum NqStatus nq_inverse_discrepancy_bound(const struct NqConstants *k,
                                           double eps,
                                           size_t d,
                                           double rho,
                                           uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEGDEP_QMC_H */
