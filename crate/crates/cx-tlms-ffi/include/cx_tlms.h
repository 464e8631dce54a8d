#ifndef CX_TLMS_H
#define CX_TLMS_H

/* Generated by cbindgen from cx-tlms-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum CxTlmsStatus {
  CX_TLMS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CX_TLMS_STATUS_NULL_ARGUMENT = 1,
  /**
   * A parameter was out of range (step sizes, orders, bin count).
   */
  CX_TLMS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * An input sample was NaN or infinite.
   */
  CX_TLMS_STATUS_NON_FINITE_INPUT = 3,
  /**
   * Unexpected internal failure.
   */
  CX_TLMS_STATUS_INTERNAL = 4,
} CxTlmsStatus;

/**
 * Estimator architecture selector.
 */
typedef enum CxTlmsArch {
  /**
   * Two independent real pipelines (real/imaginary paths).
   */
  CX_TLMS_ARCH_TLMS2R = 0,
  /**
   * Two real tensors feeding one complex LMS.
   */
  CX_TLMS_ARCH_TTLMS = 1,
  /**
   * Fully complex tensor and LMS.
   */
  CX_TLMS_ARCH_CTLMS = 2,
} CxTlmsArch;

/**
 * Opaque filter handle.
 */
typedef struct CxTlmsFilter CxTlmsFilter;

/**
 * Construction parameters for one filter instance.
 */
typedef struct CxTlmsParams {
  /**
   * Filter order P: delay-line depth and LMS length.
   */
  uint32_t filter_order;
  /**
   * Tensor rank R.
   */
  uint32_t rank;
  /**
   * Lookup bins per tensor mode (even, positive).
   */
  uint32_t n_bins;
  /**
   * Discretization interval.
   */
  double delta_x;
  /**
   * Normalized tensor step size, in (0, 1).
   */
  double mu_tensor;
  /**
   * LMS step size, in (0, 1).
   */
  double mu_lms;
  /**
   * Regularizer for all step-size denominators.
   */
  double epsilon;
  /**
   * Seed for the factor-matrix initialization.
   */
  uint64_t seed;
} CxTlmsParams;

/**
 * One adaptation step's outputs.
 */
typedef struct CxTlmsStepResult {
  double estimate_re;
  double estimate_im;
  double error_re;
  double error_im;
} CxTlmsStepResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fill `out` with the benchmark defaults for the given architecture
 * (order 16, rank 10, 32 bins over [-4, 4], the published step sizes).
 *
 * # Safety
 * `out` must point to writable memory for one `CxTlmsParams`.
 */
enum CxTlmsStatus cx_tlms_params_default(enum CxTlmsArch arch, struct CxTlmsParams *out);

/**
 * Create a filter; on success `*out` owns the handle until
 * [`cx_tlms_filter_free`].
 *
 * # Safety
 * `params` must point to a valid `CxTlmsParams` and `out` to writable
 * pointer storage.
 */
enum CxTlmsStatus cx_tlms_filter_new(enum CxTlmsArch arch,
                                     const struct CxTlmsParams *params,
                                     struct CxTlmsFilter **out);

/**
 * Advance the filter by one sample `(x, y)` and report the estimate
 * and error. The filter state adapts in place.
 *
 * # Safety
 * `filter` must be a live handle from [`cx_tlms_filter_new`]; `out`
 * must point to writable memory for one `CxTlmsStepResult`.
 */
enum CxTlmsStatus cx_tlms_filter_step(struct CxTlmsFilter *filter,
                                      double x_re,
                                      double x_im,
                                      double y_re,
                                      double y_im,
                                      struct CxTlmsStepResult *out);

/**
 * Destroy a handle. Passing null is a no-op; passing a freed or
 * foreign pointer is undefined behavior.
 *
 * # Safety
 * `filter` must be null or a pointer previously returned by
 * [`cx_tlms_filter_new`] that has not been freed.
 */
void cx_tlms_filter_free(struct CxTlmsFilter *filter);

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *cx_tlms_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CX_TLMS_H */
