#ifndef CSOM_H
#define CSOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsomStatus {
  CSOM_STATUS_OK = 0,
  CSOM_STATUS_NULL_POINTER = 1,
  CSOM_STATUS_INDEX = 2,
  CSOM_STATUS_DIMENSION = 3,
  CSOM_STATUS_NON_FINITE = 4,
  CSOM_STATUS_PARAMETER = 5,
  CSOM_STATUS_EMPTY = 6,
  CSOM_STATUS_IO = 7,
  CSOM_STATUS_FORMAT = 8,
  CSOM_STATUS_UNSUPPORTED = 9,
  CSOM_STATUS_PANIC = 10,
} CsomStatus;

/**
 * Opaque model handle: a map plus its label hit counts.
 */
typedef struct CsomModel CsomModel;

/**
 * Continual SOM hyperparameters. `bmu_decay` is 0 for decay from the
 * initial values, 1 for compounding decay.
 */
typedef struct CsomCsomParams {
  double sigma0;
  double lambda0;
  double var0;
  double lambda_omega0;
  double tau_sigma;
  double tau_lambda;
  double sigma_floor;
  double lambda_floor;
  double var_eps;
  uint32_t bmu_decay;
} CsomCsomParams;

/**
 * Classical SOM hyperparameters. `decay` is 0 for exponential, 1 for
 * rational.
 */
typedef struct CsomSomParams {
  double sigma0;
  double lambda0;
  double tau_sigma;
  double tau_lambda;
  uint32_t decay;
} CsomSomParams;

typedef struct CsomMetrics {
  double acc;
  double bwt;
  double fm;
  double la;
} CsomMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *csom_last_error(void);

struct CsomCsomParams csom_csom_params_default(void);

struct CsomSomParams csom_som_params_default(void);

/**
 * Creates a continual SOM on a `rows x cols` grid for `dim`-dimensional
 * inputs and `classes` labels, weights seeded by `seed`.
 *
 * # Safety
 * `params` must be null (defaults) or point to a valid struct; `out` must
 * be a valid pointer.
 */
enum CsomStatus csom_new_csom(size_t rows,
                              size_t cols,
                              size_t dim,
                              size_t classes,
                              const struct CsomCsomParams *params,
                              uint64_t seed,
                              struct CsomModel **out);

/**
 * Creates a classical SOM. See [`csom_new_csom`].
 *
 * # Safety
 * As for [`csom_new_csom`].
 */
enum CsomStatus csom_new_som(size_t rows,
                             size_t cols,
                             size_t dim,
                             size_t classes,
                             const struct CsomSomParams *params,
                             uint64_t seed,
                             struct CsomModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void csom_free(struct CsomModel *model);

/**
 * # Safety
 * `model` must be a valid handle.
 */
size_t csom_unit_count(const struct CsomModel *model);

/**
 * # Safety
 * `model` must be a valid handle.
 */
size_t csom_dim(const struct CsomModel *model);

/**
 * One unsupervised update with `x[0..len]`; writes the winning unit to
 * `bmu` if it is not null.
 *
 * # Safety
 * `model` must be valid and `x` must point to `len` doubles.
 */
enum CsomStatus csom_train_step(struct CsomModel *model, const double *x, size_t len, size_t *bmu);

/**
 * Counts one co-occurrence of `label` with unit `bmu` for prediction.
 *
 * # Safety
 * `model` must be valid.
 */
enum CsomStatus csom_record_hit(struct CsomModel *model, size_t label, size_t bmu);

/**
 * Unit whose prototype has the highest cosine similarity to `x`.
 *
 * # Safety
 * `model` must be valid, `x` must point to `len` doubles, `out` must be
 * valid.
 */
enum CsomStatus csom_cosine_bmu(const struct CsomModel *model,
                                const double *x,
                                size_t len,
                                size_t *out);

/**
 * Predicted label of `x`: PMI argmax over the hits of its cosine BMU.
 *
 * # Safety
 * As for [`csom_cosine_bmu`].
 */
enum CsomStatus csom_predict(const struct CsomModel *model,
                             const double *x,
                             size_t len,
                             size_t *out);

/**
 * Copies the prototypes, unit-major (`units * dim` doubles).
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum CsomStatus csom_copy_weights(const struct CsomModel *model, double *out, size_t len);

/**
 * Copies the running variance, unit-major. Continual SOM only.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum CsomStatus csom_copy_variance(const struct CsomModel *model, double *out, size_t len);

/**
 * Draws one sample from unit `unit` of a continual SOM into `out`.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum CsomStatus csom_sample(const struct CsomModel *model,
                            size_t unit,
                            uint64_t seed,
                            double *out,
                            size_t len);

/**
 * Writes the model and its hits as a checkpoint file.
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum CsomStatus csom_save(const struct CsomModel *model, const char *path_utf8);

/**
 * Loads a checkpoint into a new handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CsomStatus csom_load(const char *path_utf8, struct CsomModel **out);

/**
 * ACC, BWT, FM and LA of a `tasks x tasks` accuracy matrix given
 * stage-major: `acc[stage * tasks + task]`.
 *
 * # Safety
 * `acc` must point to `tasks * tasks` doubles and `out` must be valid.
 */
enum CsomStatus csom_metrics(const double *acc, size_t tasks, struct CsomMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSOM_H */
