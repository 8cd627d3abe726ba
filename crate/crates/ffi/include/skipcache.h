#ifndef SKIPCACHE_H
#define SKIPCACHE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SkcStatus {
  SKC_STATUS_OK = 0,
  SKC_STATUS_NULL_ARGUMENT = 1,
  SKC_STATUS_INVALID_ARGUMENT = 2,
  SKC_STATUS_IO = 3,
  SKC_STATUS_PARSE = 4,
  SKC_STATUS_NO_TRAINABLE_WORDS = 5,
  SKC_STATUS_NOT_FOUND = 6,
  SKC_STATUS_PANIC = 7,
} SkcStatus;

/**
 * Trained or loaded word vectors.
 */
typedef struct SkcModel SkcModel;

/**
 * Training parameters. Start from `skc_train_config_default`.
 */
typedef struct SkcTrainConfig {
  size_t dim;
  size_t window;
  uint64_t min_count;
  /**
   * 0 disables subsampling.
   */
  double sample;
  float alpha;
  size_t iterations;
  size_t workers;
  size_t cache_nodes;
  uint64_t flush_interval;
  uint64_t seed;
} SkcTrainConfig;

/**
 * Totals of an analogy evaluation. `accuracy` is negative when no
 * question was attempted.
 */
typedef struct SkcAccuracy {
  size_t attempted;
  size_t skipped;
  size_t correct;
  double accuracy;
} SkcAccuracy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *skc_last_error(void);

struct SkcTrainConfig skc_train_config_default(void);

/**
 * Trains on the corpus at `corpus_path` and stores a new model in `*out`.
 *
 * # Safety
 * `corpus_path` must be a NUL-terminated string, `config` and `out`
 * valid pointers.
 */
enum SkcStatus skc_train(const char *corpus_path,
                         const struct SkcTrainConfig *config,
                         struct SkcModel **out);

/**
 * Loads a text or binary model file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SkcStatus skc_model_load(const char *path, struct SkcModel **out);

/**
 * Saves in binary format when `binary` is non-zero, text otherwise.
 *
 * # Safety
 * `model` must come from this library and `path` be NUL-terminated.
 */
enum SkcStatus skc_model_save(const struct SkcModel *model, const char *path, int32_t binary);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void skc_model_free(struct SkcModel *model);

/**
 * Number of words, 0 for null.
 *
 * # Safety
 * `model` must be null or come from this library.
 */
size_t skc_model_len(const struct SkcModel *model);

/**
 * Vector dimension, 0 for null.
 *
 * # Safety
 * `model` must be null or come from this library.
 */
size_t skc_model_dim(const struct SkcModel *model);

/**
 * Word with id `index`. The string is owned by the model.
 *
 * # Safety
 * `model` must come from this library and `out` be a valid pointer.
 */
enum SkcStatus skc_model_word(const struct SkcModel *model, size_t index, const char **out);

/**
 * Copies the vector of `word` into `out`, which holds `len` floats.
 *
 * # Safety
 * `model` must come from this library, `word` be NUL-terminated and `out`
 * point to `len` writable floats.
 */
enum SkcStatus skc_model_vector(const struct SkcModel *model,
                                const char *word,
                                float *out,
                                size_t len);

/**
 * Scores the model on a question-words file. `restrict_top = 0` uses the
 * whole vocabulary.
 *
 * # Safety
 * `model` must come from this library, `questions_path` be NUL-terminated
 * and `out` a valid pointer.
 */
enum SkcStatus skc_evaluate(const struct SkcModel *model,
                            const char *questions_path,
                            size_t restrict_top,
                            struct SkcAccuracy *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKIPCACHE_H */
