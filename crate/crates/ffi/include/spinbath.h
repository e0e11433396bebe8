#ifndef SPINBATH_H
#define SPINBATH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * How couplings are assigned when an ensemble is drawn.
 */
typedef enum SbCoupling {
  /**
   * Every particle gets the same `g`.
   */
  SB_COUPLING_CONSTANT = 0,
  /**
   * `g_j` uniform in `[0, g]`.
   */
  SB_COUPLING_UNIFORM = 1,
} SbCoupling;

/**
 * Which non-diagonal part to simulate.
 */
typedef enum SbDecomposition {
  SB_DECOMPOSITION_ORIGINAL_D1 = 0,
  SB_DECOMPOSITION_ORIGINAL_D2 = 1,
  SB_DECOMPOSITION_GENERAL_D1 = 2,
  SB_DECOMPOSITION_GENERAL_D2 = 3,
} SbDecomposition;

/**
 * Result code of every call.
 */
typedef enum SbStatus {
  SB_STATUS_OK = 0,
  SB_STATUS_NULL_POINTER = 1,
  SB_STATUS_INVALID_ARGUMENT = 2,
  SB_STATUS_UNSUPPORTED_SIZE = 3,
  SB_STATUS_INSUFFICIENT_DATA = 4,
  SB_STATUS_BUFFER_TOO_SMALL = 5,
  SB_STATUS_IO = 6,
  SB_STATUS_PANIC = 7,
} SbStatus;

/**
 * Opaque environment handle.
 */
typedef struct SbEnsemble SbEnsemble;

/**
 * Result of an exponential decay fit.
 */
typedef struct SbDecayFit {
  double tau;
  double intercept;
  size_t first;
  size_t last;
  size_t samples;
  double residual;
} SbDecayFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string of the library, NUL-terminated and static.
 */
const char *sb_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length without the NUL, so a
 * caller can size a buffer by passing `cap = 0`.
 *
 * # Safety
 * `buf` must be valid for `cap` bytes or null with `cap == 0`.
 */
size_t sb_last_error_message(char *buf, size_t cap);

/**
 * Draws `n` environment particles from `seed`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle owned by the
 * caller.
 */
enum SbStatus sb_ensemble_new_random(size_t n,
                                     uint64_t seed,
                                     enum SbCoupling kind,
                                     double g,
                                     struct SbEnsemble **out);

/**
 * Builds an ensemble from spin-up probabilities and couplings, both of
 * length `n`. Amplitudes are taken real and non-negative.
 *
 * # Safety
 * `p_up` and `g` must be valid for `n` reads; `out` must be valid.
 */
enum SbStatus sb_ensemble_from_probabilities(const double *p_up,
                                             const double *g,
                                             size_t n,
                                             struct SbEnsemble **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `ens` must come from one of the constructors and not be freed twice.
 */
void sb_ensemble_free(struct SbEnsemble *ens);

/**
 * Number of environment particles, or 0 for a null handle.
 *
 * # Safety
 * `ens` must be null or a live handle.
 */
size_t sb_ensemble_len(const struct SbEnsemble *ens);

/**
 * `K_m(t)` in log-polar form: `ln|K_m|` and its phase in `(-π, π]`.
 *
 * # Safety
 * `ens` must be a live handle; the out-pointers must be valid.
 */
enum SbStatus sb_kernel_k(const struct SbEnsemble *ens,
                          int64_t m,
                          double t,
                          double *out_log_mag,
                          double *out_phase);

/**
 * `ln r²(t)` at each of `len` times.
 *
 * # Safety
 * `times` and `out` must be valid for `len` elements.
 */
enum SbStatus sb_r2_log_series(const struct SbEnsemble *ens,
                               const double *times,
                               size_t len,
                               double *out);

/**
 * `ln r²(t)` for a freshly drawn environment of size `n`, without keeping the
 * particles in memory. Matches drawing the ensemble with the same seed.
 *
 * # Safety
 * `times` and `out` must be valid for `len` elements.
 */
enum SbStatus sb_r2_log_series_streaming(size_t n,
                                         uint64_t seed,
                                         enum SbCoupling kind,
                                         double g,
                                         const double *times,
                                         size_t len,
                                         double *out);

/**
 * Normalized non-diagonal part on the grid `t_k = k·t0/intervals`,
 * `k = 0..=intervals`. `out` must hold `intervals + 1` values.
 *
 * # Safety
 * `out` must be valid for `out_len` elements.
 */
enum SbStatus sb_sigma_nd_series(enum SbDecomposition decomposition,
                                 size_t m,
                                 size_t n,
                                 uint64_t seed,
                                 enum SbCoupling kind,
                                 double g,
                                 double t0,
                                 size_t intervals,
                                 double *out,
                                 size_t out_len);

/**
 * Fits `v(t) ≈ e^{b} e^{-t/τ}` to samples with `v ∈ [e⁻⁶, 0.9]`.
 *
 * # Safety
 * `times` and `values` must be valid for `len` elements; `out` must be valid.
 */
enum SbStatus sb_fit_decoherence_time(const double *times,
                                      const double *values,
                                      size_t len,
                                      struct SbDecayFit *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINBATH_H */
