#ifndef NDTRACE_H
#define NDTRACE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NdtStatus {
  NDT_STATUS_OK = 0,
  NDT_STATUS_NULL_POINTER = 1,
  NDT_STATUS_INVALID_ARGUMENT = 2,
  // `z` lies on the essential spectrum.
  NDT_STATUS_SPECTRAL_POINT = 3,
  NDT_STATUS_UNSUPPORTED = 4,
  // `z` is too close to an eigenvalue.
  NDT_STATUS_NEAR_SINGULAR = 5,
  NDT_STATUS_NUMERICAL_FAILURE = 6,
  NDT_STATUS_BUFFER_TOO_SMALL = 7,
  NDT_STATUS_PANIC = 8,
} NdtStatus;

// Opaque coefficient set.
typedef struct NdtCoefficients NdtCoefficients;

typedef struct NdtComplex {
  double re;
  double im;
} NdtComplex;

// Both sides of a checked identity.
typedef struct NdtReport {
  struct NdtComplex lhs;
  struct NdtComplex rhs;
  double abs_err;
  double rel_err;
  double truncation_estimate;
  double runtime;
} NdtReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer stays
// valid until the next call into the library from the same thread.
const char *ndt_last_error_message(void);

// Builds coefficients of order `order` from a JSON preset such as
// `{"name": "sech2", "lambda": -2}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out_cs` a valid pointer.
enum NdtStatus ndt_coefficients_from_json(size_t order,
                                          const char *json,
                                          struct NdtCoefficients **out_cs);

// `v_1 = λ sech² x`, all other coefficients zero.
//
// # Safety
// `out_cs` must be a valid pointer.
enum NdtStatus ndt_coefficients_sech2(size_t order, double lambda, struct NdtCoefficients **out_cs);

// Copy of `cs` multiplied by the indicator of `(−r, r)`.
//
// # Safety
// `cs` must come from this library and `out_cs` must be a valid pointer.
enum NdtStatus ndt_coefficients_cutoff(const struct NdtCoefficients *cs,
                                       double r,
                                       struct NdtCoefficients **out_cs);

// # Safety
// `cs` must come from this library and not have been freed. NULL is ignored.
void ndt_coefficients_free(struct NdtCoefficients *cs);

// # Safety
// `cs` must come from this library and `order` must be a valid pointer.
enum NdtStatus ndt_coefficients_order(const struct NdtCoefficients *cs, size_t *order);

// Roots of `ζ^N = i^N z`, ordered by decreasing real part. Writes `order`
// roots to `roots` (capacity `cap`) and the number with positive real part to
// `n_positive`.
//
// # Safety
// `roots` must hold `cap` elements; `n_positive` must be valid.
enum NdtStatus ndt_roots(size_t order,
                         struct NdtComplex z,
                         struct NdtComplex *roots,
                         size_t cap,
                         size_t *n_positive);

// `Δ(x, z) = W(x, z)/W₀(z)`.
//
// # Safety
// `cs` must come from this library and `delta` must be a valid pointer.
enum NdtStatus ndt_normalized_wronskian(const struct NdtCoefficients *cs,
                                        struct NdtComplex z,
                                        double x,
                                        struct NdtComplex *delta);

// Nyström value of `Det(I + V R₀(z))`; requires `v_N = 0`.
//
// # Safety
// `cs` must come from this library; `det` must be valid, `estimate` may be NULL.
enum NdtStatus ndt_fredholm_determinant(const struct NdtCoefficients *cs,
                                        struct NdtComplex z,
                                        struct NdtComplex *det,
                                        double *estimate);

// Trace formula at `z`. `window <= 0` selects the default window.
//
// # Safety
// `cs` must come from this library and `report` must be a valid pointer.
enum NdtStatus ndt_trace_check(const struct NdtCoefficients *cs,
                               struct NdtComplex z,
                               double window,
                               struct NdtReport *report);

// Nyström determinant against `Δ(0, z)`.
//
// # Safety
// `cs` must come from this library and `report` must be a valid pointer.
enum NdtStatus ndt_det_identity_check(const struct NdtCoefficients *cs,
                                      struct NdtComplex z,
                                      struct NdtReport *report);

// Number of zeros of `Δ` inside the circle `|z − center| = radius`.
//
// # Safety
// `cs` must come from this library and `count` must be a valid pointer.
enum NdtStatus ndt_eig_count(const struct NdtCoefficients *cs,
                             struct NdtComplex center,
                             double radius,
                             int64_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NDTRACE_H */
