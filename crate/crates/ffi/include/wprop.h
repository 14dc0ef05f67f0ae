#ifndef WPROP_H
#define WPROP_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WpropStatus {
  WPROP_STATUS_OK = 0,
  WPROP_STATUS_NULL_POINTER = 1,
  WPROP_STATUS_INVALID_ARGUMENT = 2,
  WPROP_STATUS_DIMENSION_MISMATCH = 3,
  WPROP_STATUS_UNSUPPORTED_RHO = 4,
  WPROP_STATUS_PARSE = 5,
  WPROP_STATUS_TOO_LARGE = 6,
  WPROP_STATUS_BUDGET_EXHAUSTED = 7,
  WPROP_STATUS_NUMERICAL = 8,
  WPROP_STATUS_IO = 9,
  WPROP_STATUS_BUFFER_TOO_SMALL = 10,
  WPROP_STATUS_PANIC = 11,
} WpropStatus;

typedef enum WpropMethod {
  WPROP_METHOD_THM4 = 0,
  WPROP_METHOD_THM6 = 1,
  WPROP_METHOD_LIPSCHITZ = 2,
  WPROP_METHOD_LINEAR = 3,
} WpropMethod;

/**
 * A measure (product or discrete).
 */
typedef struct WpropDistribution WpropDistribution;

/**
 * A function model.
 */
typedef struct WpropModel WpropModel;

/**
 * A grid quantization operator.
 */
typedef struct WpropQuantizer WpropQuantizer;

/**
 * A stochastic system.
 */
typedef struct WpropSystem WpropSystem;

/**
 * Headline numbers of a bound report.
 */
typedef struct WpropBound {
  double value;
  double theta;
  double theta_d;
  double alpha_max;
  double beta_sum;
  double lipschitz;
  enum WpropMethod method;
  bool unbounded;
} WpropBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *wprop_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wprop_version(void);

/**
 * Parses a distribution from JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WpropStatus wprop_distribution_from_json(const char *json, struct WpropDistribution **out);

/**
 * Product of independent Gaussians from means and variances.
 *
 * # Safety
 * `mean` and `var` must point to `dim` doubles; `out` must be valid.
 */
enum WpropStatus wprop_distribution_gaussian(const double *mean,
                                             const double *var,
                                             size_t dim,
                                             struct WpropDistribution **out);

/**
 * # Safety
 * `d` must come from this library or be NULL.
 */
void wprop_distribution_free(struct WpropDistribution *d);

/**
 * # Safety
 * `d` must be a live handle and `out` valid.
 */
enum WpropStatus wprop_distribution_dim(const struct WpropDistribution *d, size_t *out);

/**
 * Builtin model by name (`sigmoid`, `mountain_car`, ...).
 *
 * # Safety
 * `name` must be NUL-terminated and `out` valid.
 */
enum WpropStatus wprop_model_builtin(const char *name, struct WpropModel **out);

/**
 * # Safety
 * `json` must be NUL-terminated and `out` valid.
 */
enum WpropStatus wprop_model_from_json(const char *json, struct WpropModel **out);

/**
 * # Safety
 * `m` must come from this library or be NULL.
 */
void wprop_model_free(struct WpropModel *m);

/**
 * Input and output dimensions of a model.
 *
 * # Safety
 * All pointers must be valid.
 */
enum WpropStatus wprop_model_dims(const struct WpropModel *m,
                                  size_t *input_dim,
                                  size_t *output_dim);

/**
 * Evaluates the model at `x` (length `n`), writing at most `out_len` values.
 *
 * # Safety
 * `x` must point to `n` doubles and `out` to `out_len` doubles.
 */
enum WpropStatus wprop_model_evaluate(const struct WpropModel *m,
                                      const double *x,
                                      size_t n,
                                      double *out,
                                      size_t out_len);

/**
 * Optimized grid with at most `budget` locations for a product distribution.
 *
 * # Safety
 * `d` must be a live handle and `out` valid.
 */
enum WpropStatus wprop_quantizer_optimized(const struct WpropDistribution *d,
                                           size_t budget,
                                           struct WpropQuantizer **out);

/**
 * # Safety
 * `json` must be NUL-terminated and `out` valid.
 */
enum WpropStatus wprop_quantizer_from_json(const char *json, struct WpropQuantizer **out);

/**
 * # Safety
 * `q` must come from this library or be NULL.
 */
void wprop_quantizer_free(struct WpropQuantizer *q);

/**
 * Number of locations.
 *
 * # Safety
 * `q` must be a live handle and `out` valid.
 */
enum WpropStatus wprop_quantizer_len(const struct WpropQuantizer *q, size_t *out);

/**
 * Quantization error theta_d of `q` applied to `d`.
 *
 * # Safety
 * Handles must be live and `out` valid.
 */
enum WpropStatus wprop_quantizer_theta_d(const struct WpropQuantizer *q,
                                         const struct WpropDistribution *d,
                                         uint32_t rho,
                                         double *out);

/**
 * Bound on the distance between the pushforward of any law within `theta`
 * of `d` and the pushforward of the quantized `d`. `method` picks the
 * bound; `WPROP_METHOD_THM6` requires theta = 0.
 *
 * # Safety
 * Handles must be live and `out` valid.
 */
enum WpropStatus wprop_bound(const struct WpropModel *m,
                             const struct WpropQuantizer *q,
                             const struct WpropDistribution *d,
                             double theta,
                             uint32_t rho,
                             enum WpropMethod method,
                             struct WpropBound *out);

/**
 * Builtin stochastic system by name.
 *
 * # Safety
 * `name` must be NUL-terminated and `out` valid.
 */
enum WpropStatus wprop_system_builtin(const char *name, struct WpropSystem **out);

/**
 * System from a JSON description.
 *
 * # Safety
 * `json` must be NUL-terminated and `out` valid.
 */
enum WpropStatus wprop_system_from_json(const char *json, struct WpropSystem **out);

/**
 * # Safety
 * `s` must come from this library or be NULL.
 */
void wprop_system_free(struct WpropSystem *s);

/**
 * Propagates over `horizon` steps with fixed budgets and writes theta_1..
 * theta_T to `thetas` (and the Lipschitz trace to `lipschitz` if non-NULL).
 *
 * # Safety
 * `thetas` must hold `horizon` doubles; `lipschitz` is NULL or the same size.
 */
enum WpropStatus wprop_propagate(const struct WpropSystem *s,
                                 size_t horizon,
                                 size_t state_budget,
                                 size_t noise_budget,
                                 uint32_t rho,
                                 uint64_t seed,
                                 double *thetas,
                                 double *lipschitz);

/**
 * Monte-Carlo estimate of W_rho between two distributions.
 *
 * # Safety
 * Handles must be live; `estimate` and `stderr` valid.
 */
enum WpropStatus wprop_mc_wasserstein(const struct WpropDistribution *p,
                                      const struct WpropDistribution *q,
                                      size_t n,
                                      size_t repeats,
                                      uint32_t rho,
                                      uint64_t seed,
                                      double *estimate,
                                      double *stderr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WPROP_H */
