#ifndef PLEMDEN_H
#define PLEMDEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PlemdenStatus {
  PLEMDEN_STATUS_OK = 0,
  PLEMDEN_STATUS_NULL_POINTER = 1,
  PLEMDEN_STATUS_INVALID_UTF8 = 2,
  PLEMDEN_STATUS_USAGE = 3,
  PLEMDEN_STATUS_INPUT = 4,
  PLEMDEN_STATUS_DOMAIN = 5,
  PLEMDEN_STATUS_SINGULAR = 6,
  PLEMDEN_STATUS_PRECONDITION = 7,
  PLEMDEN_STATUS_NUMERICAL = 8,
  PLEMDEN_STATUS_CAPABILITY = 9,
  PLEMDEN_STATUS_PANIC = 10,
} PlemdenStatus;

/**
 * A model manifold.
 */
typedef struct PlemdenModel PlemdenModel;

/**
 * A finished run: its JSON report and any CSV data.
 */
typedef struct PlemdenReport PlemdenReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next call.
 */
const char *plemden_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *plemden_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void plemden_string_free(char *s);

/**
 * Runs the experiment described by a JSON run configuration.
 *
 * Check failures are part of the report and still return `PLEMDEN_STATUS_OK`;
 * a malformed configuration returns `PLEMDEN_STATUS_USAGE`.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PlemdenStatus plemden_run_json(const char *config_json, struct PlemdenReport **out);

/**
 * 1 if every check passed, 0 if not, -1 for a NULL handle.
 *
 * # Safety
 * `r` must be NULL or a live report handle.
 */
int plemden_report_pass(const struct PlemdenReport *r);

/**
 * The report as JSON; free with `plemden_string_free`. NULL for a NULL handle.
 *
 * # Safety
 * `r` must be NULL or a live report handle.
 */
char *plemden_report_json(const struct PlemdenReport *r);

/**
 * CSV data of the run, or NULL when the experiment produces none.
 *
 * # Safety
 * `r` must be NULL or a live report handle.
 */
char *plemden_report_csv(const struct PlemdenReport *r);

/**
 * # Safety
 * `r` must be NULL or a live report handle; it is invalid afterwards.
 */
void plemden_report_free(struct PlemdenReport *r);

/**
 * Liouville verdict for `-lap_p u = u^alpha` on a noncompact manifold with
 * nonnegative Ricci curvature, as JSON.
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum PlemdenStatus plemden_classify_power(size_t n, double p, double alpha, char **out_json);

/**
 * `((n+1)p - n)/(n-p)^+`; writes `INFINITY` when `p >= n`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PlemdenStatus plemden_critical_exponent(size_t n, double p, double *out);

/**
 * Creates a named model: "euclidean", "sphere" or "hyperbolic".
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PlemdenStatus plemden_model_new(const char *name,
                                     size_t dim,
                                     double kappa,
                                     struct PlemdenModel **out);

/**
 * Volume of the geodesic ball of `radius` about the pole.
 *
 * # Safety
 * `m` must be a live model handle and `out` a valid pointer.
 */
enum PlemdenStatus plemden_model_ball_volume(const struct PlemdenModel *m,
                                             double radius,
                                             double *out);

/**
 * Largest radius of the model (`INFINITY` when noncompact).
 *
 * # Safety
 * `m` must be NULL or a live model handle.
 */
double plemden_model_r_max(const struct PlemdenModel *m);

/**
 * # Safety
 * `m` must be NULL or a live model handle; it is invalid afterwards.
 */
void plemden_model_free(struct PlemdenModel *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLEMDEN_H */
