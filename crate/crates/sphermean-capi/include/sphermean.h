/* C interface to the sphermean verification library. */

#ifndef SPHERMEAN_H
#define SPHERMEAN_H

/* Generated from the sphermean-capi crate by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum SmStatus {
  /**
   * The call succeeded.
   */
  SM_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SM_ERR_NULL_ARGUMENT = 1,
  /**
   * An input string was not valid UTF-8.
   */
  SM_ERR_UTF8 = 2,
  /**
   * The input JSON could not be parsed; the diagnostic names the
   * offending JSON path.
   */
  SM_ERR_MALFORMED = 3,
  /**
   * The input parsed but the computation rejected it (domain error).
   */
  SM_ERR_DOMAIN = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  SM_ERR_PANIC = 5,
} SmStatus;

/**
 * Opaque handle to a compactly supported source function.
 */
typedef struct SmFunction SmFunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version string (static storage; do not free).
 */
const char *sm_version(void);

/**
 * A copy of the thread's last diagnostic, or null when the last call on
 * this thread succeeded. Release with [`sm_string_free`].
 */
char *sm_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library and
 * not yet freed.
 */
void sm_string_free(char *s);

/**
 * Parses a source-function JSON document (schema kind `radial_harmonic`,
 * `odd_plane`, `grid`, or `discrete`) into a handle. Returns null on
 * failure and records the diagnostic.
 *
 * # Safety
 * `text` must be null or a NUL-terminated C string.
 */
struct SmFunction *sm_function_parse(const char *text);

/**
 * Releases a function handle. Null is ignored.
 *
 * # Safety
 * `f` must be null or a handle from [`sm_function_parse`] not yet freed.
 */
void sm_function_free(struct SmFunction *f);

/**
 * Ambient dimension of the function (2 or 3); 0 for a null handle.
 *
 * # Safety
 * `f` must be null or a live handle from [`sm_function_parse`].
 */
size_t sm_function_dim(const struct SmFunction *f);

/**
 * Evaluates the function at the point `x` (`len` coordinates, which must
 * match the function's dimension), writing the value to `out`.
 *
 * # Safety
 * `f` must be a live handle; `x` must point to `len` readable doubles;
 * `out` must point to a writable double.
 */
enum SmStatus sm_function_eval(const struct SmFunction *f,
                               const double *x,
                               size_t len,
                               double *out);

/**
 * Mean of the function over the sphere of radius `radius` centered at
 * `center` (`len` coordinates), using a product quadrature rule of the
 * given order.
 *
 * # Safety
 * `f` must be a live handle; `center` must point to `len` readable
 * doubles; `out` must point to a writable double.
 */
enum SmStatus sm_spherical_mean(const struct SmFunction *f,
                                const double *center,
                                size_t len,
                                double radius,
                                size_t quad_order,
                                double *out);

/**
 * Classifies the singular point of a truncated ruled chart
 * (chart-JSON in, verdict-JSON out).
 *
 * # Safety
 * `input` must be a NUL-terminated C string; `out_json` must point to a
 * writable `char*`.
 */
enum SmStatus sm_classify_json(const char *input, char **out_json);

/**
 * Builds the moment family of a discrete measure: recursion check,
 * harmonic minor, and sampled common zeros (moments-job JSON in).
 *
 * # Safety
 * As for [`sm_classify_json`].
 */
enum SmStatus sm_moments_json(const char *input, char **out_json);

/**
 * Closes a concurrent mirror system under its own reflections
 * (mirror-system JSON in, closure JSON out).
 *
 * # Safety
 * As for [`sm_classify_json`].
 */
enum SmStatus sm_coxeter_json(const char *input, char **out_json);

/**
 * Runs the antipodal support-shrinking certificate (certify JSON in,
 * certificate JSON out).
 *
 * # Safety
 * As for [`sm_classify_json`].
 */
enum SmStatus sm_certify_json(const char *input, char **out_json);

/**
 * Validates a labeled configuration of vertex-meeting cones
 * (configuration JSON in, verdict JSON out).
 *
 * # Safety
 * As for [`sm_classify_json`].
 */
enum SmStatus sm_validate_config_json(const char *input, char **out_json);

/**
 * Scans spherical means of a source over centers x radii and reports the
 * largest absolute mean with a sampled sup-norm estimate (means-job JSON
 * in, report JSON out).
 *
 * # Safety
 * As for [`sm_classify_json`].
 */
enum SmStatus sm_verify_means_json(const char *input, char **out_json);

/**
 * Evaluates the eigenfunction family of a discrete measure over a lambda
 * grid at chosen points and reports the largest modulus (spectral-job JSON
 * in, report JSON out).
 *
 * # Safety
 * As for [`sm_classify_json`].
 */
enum SmStatus sm_spectral_json(const char *input, char **out_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SPHERMEAN_H */
