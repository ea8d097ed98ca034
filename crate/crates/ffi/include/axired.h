#ifndef AXIRED_H
#define AXIRED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. The first four match the exit codes of the `axired` binary.
 */
typedef enum AxiredStatus {
  AXIRED_STATUS_OK = 0,
  /**
   * A report was produced but one of its checks failed.
   */
  AXIRED_STATUS_CHECK_FAILED = 2,
  AXIRED_STATUS_INVALID_INPUT = 3,
  AXIRED_STATUS_NON_CONVERGENCE = 4,
  AXIRED_STATUS_NULL_POINTER = 5,
  AXIRED_STATUS_INVALID_UTF8 = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  AXIRED_STATUS_PANIC = 7,
} AxiredStatus;

/**
 * Solution of the equivariant Hamiltonian constraint.
 */
typedef struct AxiredConstraint AxiredConstraint;

/**
 * A metric with its chart, parameters and sampling box.
 */
typedef struct AxiredMetric AxiredMetric;

/**
 * Scalar summary of an [`AxiredConstraint`]. Fields that do not apply to
 * the status are NaN.
 */
typedef struct AxiredConstraintSummary {
  bool subcritical;
  /**
   * Radius where `chi` reaches zero (supercritical data only).
   */
  double r_star;
  double chi_inf;
  double m_av;
  double angle_deficit;
  double energy;
  size_t grid_len;
} AxiredConstraintSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *axired_version(void);

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into the library on the same thread.
 */
const char *axired_last_error(void);

/**
 * # Safety
 * `s` is NULL or a string returned by this library and not yet freed.
 */
void axired_string_free(char *s);

/**
 * Catalog metric by name (`minkowski`, `schwarzschild`, `kerr`,
 * `schwarzschild-spatial`) with `n_params` named parameter overrides.
 *
 * # Safety
 * `name` is a NUL-terminated string; `param_names` and `param_values` point
 * to `n_params` entries each (they may be NULL when `n_params` is 0); `out`
 * is writable.
 */
enum AxiredStatus axired_metric_catalog(const char *name,
                                        const char *const *param_names,
                                        const double *param_values,
                                        size_t n_params,
                                        struct AxiredMetric **out);

/**
 * Metric from the plain-text catalog format.
 *
 * # Safety
 * `text` is a NUL-terminated string and `out` is writable.
 */
enum AxiredStatus axired_metric_parse(const char *text, struct AxiredMetric **out);

/**
 * # Safety
 * `m` is NULL or a handle from this library that has not been freed.
 */
void axired_metric_free(struct AxiredMetric *m);

/**
 * Dimension of the metric, 0 for NULL.
 *
 * # Safety
 * `m` is NULL or a live handle.
 */
size_t axired_metric_dim(const struct AxiredMetric *m);

/**
 * The metric in the plain-text format; free with [`axired_string_free`].
 *
 * # Safety
 * `m` is a live handle and `out` is writable.
 */
enum AxiredStatus axired_metric_to_text(const struct AxiredMetric *m, char **out);

/**
 * Largest `|R_ab|` over `samples` points of the sampling box.
 *
 * # Safety
 * `m` is a live handle and `out` is writable.
 */
enum AxiredStatus axired_ricci_max_abs(const struct AxiredMetric *m,
                                       size_t samples,
                                       uint64_t seed,
                                       double *out);

/**
 * Largest residual over the three blocks of the reduced vacuum equations of
 * a 3+1 axisymmetric metric.
 *
 * # Safety
 * `m` is a live handle and `out` is writable.
 */
enum AxiredStatus axired_reduced_residual_max_abs(const struct AxiredMetric *m,
                                                  size_t samples,
                                                  uint64_t seed,
                                                  double *out);

/**
 * Cutoff energy `E(R, eps)` on `[r0, r_max] x [eps, pi - eps]`. A 3+1 metric
 * uses its reduced wave map and `field` must be NULL; a 2+1 metric needs a
 * scalar `field` expression.
 *
 * # Safety
 * `m` is a live handle, `field` is NULL or a NUL-terminated string, `out`
 * is writable.
 */
enum AxiredStatus axired_energy_cutoff(const struct AxiredMetric *m,
                                       const char *field,
                                       double r0,
                                       double r_max,
                                       double eps,
                                       double *out);

/**
 * ADM mass of an asymptotically flat Riemannian 3-metric in Cartesian
 * components.
 *
 * # Safety
 * `m` is a live handle and `out` is writable.
 */
enum AxiredStatus axired_adm_mass(const struct AxiredMetric *m, double *out);

/**
 * Solves the equivariant constraint for a catalog profile
 * (`gaussian_bump`, `compact_bump`) into a `sphere` or `hyperbolic` target.
 *
 * # Safety
 * `profile` and `target` are NUL-terminated strings; `out` is writable.
 */
enum AxiredStatus axired_constraint_solve(const char *profile,
                                          double amplitude,
                                          double width,
                                          const char *target,
                                          struct AxiredConstraint **out);

/**
 * # Safety
 * `c` is NULL or a live constraint handle.
 */
void axired_constraint_free(struct AxiredConstraint *c);

/**
 * # Safety
 * `c` is a live handle and `out` is writable.
 */
enum AxiredStatus axired_constraint_summary(const struct AxiredConstraint *c,
                                            struct AxiredConstraintSummary *out);

/**
 * Copies up to `capacity` grid points `(r, chi)` and reports how many were
 * written. Call with `capacity` equal to `grid_len` from the summary.
 *
 * # Safety
 * `c` is a live handle; `r` and `chi` hold `capacity` doubles; `written` is
 * writable.
 */
enum AxiredStatus axired_constraint_profile(const struct AxiredConstraint *c,
                                            double *r,
                                            double *chi,
                                            size_t capacity,
                                            size_t *written);

/**
 * Runs a command-line invocation (without the program name) and returns
 * its JSON report. Returns `CHECK_FAILED` when the report was produced but
 * did not pass; `out_json` is set in that case too.
 *
 * # Safety
 * `argv` holds `argc` NUL-terminated strings; `out_json` is writable.
 */
enum AxiredStatus axired_run(size_t argc, const char *const *argv, char **out_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* AXIRED_H */
