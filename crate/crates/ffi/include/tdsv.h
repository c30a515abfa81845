#ifndef TDSV_H
#define TDSV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TdsvStatus {
  TDSV_STATUS_OK = 0,
  TDSV_STATUS_NULL_POINTER = 1,
  TDSV_STATUS_INVALID_ARGUMENT = 2,
  TDSV_STATUS_CONFIG_ERROR = 3,
  TDSV_STATUS_DATA_ERROR = 4,
  TDSV_STATUS_NUMERIC_ERROR = 5,
  TDSV_STATUS_IO_ERROR = 6,
  TDSV_STATUS_PANIC = 7,
} TdsvStatus;

typedef enum TdsvFusion {
  TDSV_FUSION_AVERAGE = 0,
  TDSV_FUSION_MINIMUM = 1,
  TDSV_FUSION_MAXIMUM = 2,
  TDSV_FUSION_MEDIAN = 3,
} TdsvFusion;

/**
 * Opaque feature matrix, row-major.
 */
typedef struct TdsvFeatures TdsvFeatures;

/**
 * Opaque diagonal GMM (UBM or speaker model).
 */
typedef struct TdsvGmm TdsvGmm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into the library on the same thread.
 */
const char *tdsv_last_error_message(void);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum TdsvStatus tdsv_gmm_load(const char *path, struct TdsvGmm **out);

/**
 * Parses a model from its JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TdsvStatus tdsv_gmm_from_json(const char *json, struct TdsvGmm **out);

/**
 * Serializes a model as JSON into a string released with [`tdsv_string_free`].
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum TdsvStatus tdsv_gmm_to_json(const struct TdsvGmm *model, char **out);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void tdsv_string_free(char *s);

/**
 * # Safety
 * `model` must be NULL or a handle from this library not yet freed.
 */
void tdsv_gmm_free(struct TdsvGmm *model);

/**
 * Component count, or 0 for NULL.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
uintptr_t tdsv_gmm_components(const struct TdsvGmm *model);

/**
 * Feature dimension, or 0 for NULL.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
uintptr_t tdsv_gmm_dim(const struct TdsvGmm *model);

/**
 * Log-likelihood (nats) of one frame of `dim` values.
 *
 * # Safety
 * `frame` must point to `dim` doubles; `out` must be writable.
 */
enum TdsvStatus tdsv_gmm_log_likelihood(const struct TdsvGmm *model,
                                        const double *frame,
                                        uintptr_t dim,
                                        double *out);

/**
 * Mean-only MAP adaptation of `ubm` toward `enrollment`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum TdsvStatus tdsv_gmm_map_adapt(const struct TdsvGmm *ubm,
                                   const struct TdsvFeatures *enrollment,
                                   double relevance,
                                   uintptr_t iterations,
                                   struct TdsvGmm **out);

/**
 * Frame-averaged log-likelihood ratio of `test` between `speaker` and `ubm`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum TdsvStatus tdsv_llr_score(const struct TdsvGmm *speaker,
                               const struct TdsvGmm *ubm,
                               const struct TdsvFeatures *test,
                               double *out);

/**
 * Default front-end (57-dim MFCC, RASTA, deltas, VAD, CMVN) on a buffer.
 *
 * # Safety
 * `samples` must point to `len` doubles; `out` must be writable.
 */
enum TdsvStatus tdsv_features_extract(const double *samples,
                                      uintptr_t len,
                                      uint32_t sample_rate,
                                      struct TdsvFeatures **out);

/**
 * Wraps `rows * dims` row-major values as a feature handle.
 *
 * # Safety
 * `data` must point to `rows * dims` doubles; `out` must be writable.
 */
enum TdsvStatus tdsv_features_from_data(const double *data,
                                        uintptr_t rows,
                                        uintptr_t dims,
                                        struct TdsvFeatures **out);

/**
 * # Safety
 * `f` must be NULL or a live handle.
 */
uintptr_t tdsv_features_rows(const struct TdsvFeatures *f);

/**
 * # Safety
 * `f` must be NULL or a live handle.
 */
uintptr_t tdsv_features_dims(const struct TdsvFeatures *f);

/**
 * Row-major values, valid while the handle lives; NULL for NULL.
 *
 * # Safety
 * `f` must be NULL or a live handle.
 */
const double *tdsv_features_data(const struct TdsvFeatures *f);

/**
 * # Safety
 * `f` must be NULL or a handle from this library not yet freed.
 */
void tdsv_features_free(struct TdsvFeatures *f);

/**
 * Equal error rate in percent and its threshold.
 *
 * # Safety
 * Arrays must hold the stated counts; outputs must be writable (threshold may be NULL).
 */
enum TdsvStatus tdsv_compute_eer(const double *targets,
                                 uintptr_t n_targets,
                                 const double *nontargets,
                                 uintptr_t n_nontargets,
                                 double *eer_percent,
                                 double *threshold);

/**
 * Raw minimum detection cost and its threshold.
 *
 * # Safety
 * Arrays must hold the stated counts; outputs must be writable (threshold may be NULL).
 */
enum TdsvStatus tdsv_compute_min_dcf(const double *targets,
                                     uintptr_t n_targets,
                                     const double *nontargets,
                                     uintptr_t n_nontargets,
                                     double c_miss,
                                     double c_fa,
                                     double p_target,
                                     double *min_dcf,
                                     double *threshold);

/**
 * Fuses one trial's per-system scores.
 *
 * # Safety
 * `scores` must hold `n` doubles; `out` must be writable.
 */
enum TdsvStatus tdsv_fuse_scores(const double *scores,
                                 uintptr_t n,
                                 enum TdsvFusion method,
                                 double *out);

/**
 * # Safety
 * `samples` and `out` must each hold `len` doubles.
 */
enum TdsvStatus tdsv_pitch_shift(const double *samples,
                                 uintptr_t len,
                                 uint32_t sample_rate,
                                 int32_t semitones,
                                 double *out);

/**
 * # Safety
 * `samples` and `out` must each hold `len` doubles.
 */
enum TdsvStatus tdsv_wow_resample(const double *samples,
                                  uintptr_t len,
                                  uint32_t sample_rate,
                                  double a,
                                  double f,
                                  double *out);

/**
 * # Safety
 * `samples` and `out` must each hold `len` doubles.
 */
enum TdsvStatus tdsv_harmonic_distort(const double *samples,
                                      uintptr_t len,
                                      uint32_t sample_rate,
                                      uint32_t depth,
                                      double *out);

/**
 * # Safety
 * `samples` and `out` hold `len` doubles; `ir` holds `ir_len`.
 */
enum TdsvStatus tdsv_apply_ir(const double *samples,
                              uintptr_t len,
                              const double *ir,
                              uintptr_t ir_len,
                              uint32_t sample_rate,
                              double *out);

/**
 * # Safety
 * `samples` and `out` hold `len` doubles; `partner` holds `partner_len`.
 */
enum TdsvStatus tdsv_sound_mix(const double *samples,
                               uintptr_t len,
                               const double *partner,
                               uintptr_t partner_len,
                               uint32_t sample_rate,
                               double *out);

/**
 * Adds looped noise at `snr_db`, with speech power gated by the default VAD.
 *
 * # Safety
 * `samples` and `out` hold `len` doubles; `noise` holds `noise_len`.
 */
enum TdsvStatus tdsv_add_noise_snr(const double *samples,
                                   uintptr_t len,
                                   const double *noise,
                                   uintptr_t noise_len,
                                   uint32_t sample_rate,
                                   double snr_db,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TDSV_H */
