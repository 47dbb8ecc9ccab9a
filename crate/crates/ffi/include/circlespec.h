#ifndef CIRCLESPEC_H
#define CIRCLESPEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CS_TOPOLOGY_CIRCLE 0

#define CS_TOPOLOGY_SEGMENT 1

#define CS_REFERENCE_WIGNER 0

#define CS_REFERENCE_GOE 1

#define CS_REFERENCE_POISSON 2

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_DOMAIN = 3,
  CS_STATUS_USAGE = 4,
  CS_STATUS_COMPLETENESS = 5,
  CS_STATUS_INSUFFICIENT_DATA = 6,
  CS_STATUS_SELF_CHECK = 7,
  CS_STATUS_IO = 8,
  CS_STATUS_BUFFER_TOO_SMALL = 9,
  CS_STATUS_PANIC = 10,
} CsStatus;

/**
 * A validated system: topology, coupling and interaction positions.
 */
typedef struct CsConfig CsConfig;

/**
 * Computed roots, ascending, repeated per multiplicity.
 */
typedef struct CsSpectrum CsSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *cs_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cs_version(void);

/**
 * Creates a system with explicit positions `positions[0..n]`, strictly increasing in `(0, 2π)`.
 *
 * # Safety
 * `positions` must point to `n` readable doubles (it may be null when `n == 0`);
 * `out` must be writable.
 */
enum CsStatus cs_config_new(int32_t topology_code,
                            double alpha,
                            const double *positions,
                            size_t n,
                            struct CsConfig **out);

/**
 * Creates a system with `n` interactions at the square-root-of-primes positions.
 *
 * # Safety
 * `out` must be writable.
 */
enum CsStatus cs_config_new_primes(int32_t topology_code,
                                   double alpha,
                                   size_t n,
                                   struct CsConfig **out);

/**
 * # Safety
 * `config` must come from `cs_config_new*` and not be used afterwards. Null is ignored.
 */
void cs_config_free(struct CsConfig *config);

/**
 * `beta = (1 - α²)/(1 + α²)` of the system.
 *
 * # Safety
 * `config` must be a live handle and `out` writable.
 */
enum CsStatus cs_config_beta(const struct CsConfig *config, double *out);

/**
 * Normalized secular function at `k` and the magnitude of the discarded imaginary part.
 *
 * # Safety
 * `config` must be a live handle; `value` must be writable; `residual_imag` may be null.
 */
enum CsStatus cs_secular(const struct CsConfig *config,
                         double k,
                         double *value,
                         double *residual_imag);

/**
 * Computes the first `count` positive roots (with multiplicity).
 *
 * # Safety
 * `config` must be a live handle and `out` writable.
 */
enum CsStatus cs_spectrum_compute(const struct CsConfig *config,
                                  size_t count,
                                  struct CsSpectrum **out);

/**
 * # Safety
 * `spectrum` must come from `cs_spectrum_compute` and not be used afterwards. Null is ignored.
 */
void cs_spectrum_free(struct CsSpectrum *spectrum);

/**
 * Number of roots counted with multiplicity; 0 for null.
 *
 * # Safety
 * `spectrum` must be a live handle or null.
 */
size_t cs_spectrum_len(const struct CsSpectrum *spectrum);

/**
 * Copies the roots into `buffer`, which must hold at least `cs_spectrum_len` values.
 *
 * # Safety
 * `spectrum` must be a live handle and `buffer` must point to `capacity` writable doubles.
 */
enum CsStatus cs_spectrum_roots(const struct CsSpectrum *spectrum, double *buffer, size_t capacity);

/**
 * Largest `|N(K) - 2K|` found by the solver's counting check.
 *
 * # Safety
 * `spectrum` must be a live handle and `out` writable.
 */
enum CsStatus cs_spectrum_count_deviation(const struct CsSpectrum *spectrum, uint64_t *out);

/**
 * CDF of a reference spacing law (unit mean) at `s`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CsStatus cs_reference_cdf(int32_t reference_code, double s, double *out);

/**
 * `∫ (F_N - F_ref)² ds` for `spacings[0..n]` rescaled to unit mean.
 *
 * # Safety
 * `spacings` must point to `n` readable doubles and `out` must be writable.
 */
enum CsStatus cs_delta_f(const double *spacings, size_t n, int32_t reference_code, double *out);

/**
 * Kolmogorov–Smirnov distance of `spacings[0..n]`, rescaled to unit mean, to a reference law.
 *
 * # Safety
 * `spacings` must point to `n` readable doubles and `out` must be writable.
 */
enum CsStatus cs_ks_distance(const double *spacings, size_t n, int32_t reference_code, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCLESPEC_H */
