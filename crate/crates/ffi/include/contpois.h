#ifndef CONTPOIS_H
#define CONTPOIS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_POINTER = 1,
  CP_STATUS_DOMAIN = 2,
  CP_STATUS_CONVERGENCE = 3,
  CP_STATUS_EXPERIMENT_DESIGN = 4,
  CP_STATUS_INTERNAL = 5,
  CP_STATUS_PANIC = 6,
} CpStatus;

typedef enum CpDensityRoute {
  CP_DENSITY_ROUTE_DERIVATIVE = 0,
  CP_DENSITY_ROUTE_DOUBLE_INTEGRAL = 1,
} CpDensityRoute;

typedef enum CpMomentRoute {
  CP_MOMENT_ROUTE_VOLTERRA = 0,
  CP_MOMENT_ROUTE_TAIL_INTEGRAL = 1,
} CpMomentRoute;

/**
 * Opaque distribution handle.
 */
typedef struct CpLaw CpLaw;

/**
 * Opaque random-stream handle.
 */
typedef struct CpStream CpStream;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a continuous Poisson law. `*out` is NULL on failure.
 *
 * # Safety
 * `out` must be NULL or valid for one pointer write.
 */
enum CpStatus cp_law_poisson_new(double lambda, struct CpLaw **out);

/**
 * Creates a continuous binomial law (`n` need not be an integer).
 *
 * # Safety
 * `out` must be NULL or valid for one pointer write.
 */
enum CpStatus cp_law_binomial_new(double n, double p, struct CpLaw **out);

/**
 * Releases a law. NULL is ignored.
 *
 * # Safety
 * `law` must be NULL or a handle from `cp_law_*_new` not yet freed.
 */
void cp_law_free(struct CpLaw *law);

/**
 * `P(X < x)`.
 *
 * # Safety
 * `law` must be a live handle; `out` valid for one write.
 */
enum CpStatus cp_law_cdf(const struct CpLaw *law, double x, double *out);

/**
 * Density at `x` by the chosen route.
 *
 * # Safety
 * `law` must be a live handle; `out` valid for one write.
 */
enum CpStatus cp_law_pdf(const struct CpLaw *law, double x, enum CpDensityRoute route, double *out);

/**
 * Quantile at level `q ∈ [0, 1]`; the Poisson quantile of 1 is `+inf`.
 *
 * # Safety
 * `law` must be a live handle; `out` valid for one write.
 */
enum CpStatus cp_law_quantile(const struct CpLaw *law, double q, double *out);

/**
 * Closed-form mass of `[x, x + 1)`.
 *
 * # Safety
 * `law` must be a live handle; `out` valid for one write.
 */
enum CpStatus cp_law_interval_mass(const struct CpLaw *law, double x, double *out);

/**
 * Fills `out[0..count]` with inverse-CDF samples drawn from the start of
 * `stream`. The stream handle is not advanced: equal calls give equal draws.
 *
 * # Safety
 * `law` and `stream` must be live handles; `out` valid for `count` writes.
 */
enum CpStatus cp_law_sample(const struct CpLaw *law,
                            const struct CpStream *stream,
                            size_t count,
                            double *out);

/**
 * Creates a random stream; never fails.
 */
struct CpStream *cp_stream_new(uint64_t seed, uint64_t stream_id);

/**
 * Releases a stream. NULL is ignored.
 *
 * # Safety
 * `stream` must be NULL or a handle from `cp_stream_new` not yet freed.
 */
void cp_stream_free(struct CpStream *stream);

/**
 * `k`-th moment of the continuous Poisson law; `m_0 = 1`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum CpStatus cp_poisson_moment(double lambda, uint32_t k, enum CpMomentRoute route, double *out);

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * always NUL-terminated when `len > 0`) and returns the full message length
 * without the terminator; 0 if there is no error.
 *
 * # Safety
 * `buf` must be NULL or valid for `len` byte writes.
 */
size_t cp_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTPOIS_H */
