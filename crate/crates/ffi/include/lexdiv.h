#ifndef LEXDIV_H
#define LEXDIV_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LexdivIccMode {
  LEXDIV_ICC_MODE_AGREEMENT = 0,
  LEXDIV_ICC_MODE_CONSISTENCY = 1,
} LexdivIccMode;

typedef enum LexdivIndexKind {
  LEXDIV_INDEX_KIND_TTR = 0,
  LEXDIV_INDEX_KIND_GUIRAUD_R = 1,
  LEXDIV_INDEX_KIND_HERDAN_C = 2,
  LEXDIV_INDEX_KIND_MAAS_A = 3,
  LEXDIV_INDEX_KIND_MTTRRS = 4,
  LEXDIV_INDEX_KIND_HDD = 5,
  LEXDIV_INDEX_KIND_MATTR = 6,
  LEXDIV_INDEX_KIND_MSTTR = 7,
  LEXDIV_INDEX_KIND_MTTRSS = 8,
  LEXDIV_INDEX_KIND_MTLD = 9,
} LexdivIndexKind;

typedef enum LexdivMaasVariant {
  LEXDIV_MAAS_VARIANT_NATURAL_LOG_A = 0,
  LEXDIV_MAAS_VARIANT_BASE10_A_SQUARED = 1,
} LexdivMaasVariant;

typedef enum LexdivMethod {
  LEXDIV_METHOD_PARALLEL = 0,
  LEXDIV_METHOD_RANDOM = 1,
  LEXDIV_METHOD_ORDERED_RANDOM = 2,
  LEXDIV_METHOD_ALTERNATING = 3,
} LexdivMethod;

/**
 * Result code of every call.
 */
typedef enum LexdivStatus {
  LEXDIV_STATUS_OK = 0,
  LEXDIV_STATUS_NULL_POINTER = 1,
  LEXDIV_STATUS_INVALID_UTF8 = 2,
  LEXDIV_STATUS_INVALID_ARGUMENT = 3,
  LEXDIV_STATUS_IO = 4,
  /**
   * Bad index parameters, or an index or condition undefined for this text.
   */
  LEXDIV_STATUS_INDEX = 5,
  LEXDIV_STATUS_STATS = 6,
  LEXDIV_STATUS_PANIC = 7,
} LexdivStatus;

/**
 * Opaque collection of texts with unique ids.
 */
typedef struct LexdivCorpus LexdivCorpus;

/**
 * Opaque texts × conditions score grid.
 */
typedef struct LexdivScoreMatrix LexdivScoreMatrix;

/**
 * Opaque tokenized text.
 */
typedef struct LexdivText LexdivText;

/**
 * Index and parameters. Obtain defaults from [`lexdiv_index_spec_default`].
 */
typedef struct LexdivIndexSpec {
  enum LexdivIndexKind kind;
  size_t n;
  size_t s;
  double factor;
  enum LexdivMaasVariant maas_variant;
  size_t mtld_min_segment;
  /**
   * Seed for MTTRRS and MTTRSS.
   */
  uint64_t seed;
} LexdivIndexSpec;

typedef struct LexdivSamplingConfig {
  enum LexdivMethod method;
  /**
   * Truncation length; 0 uses the shortest text.
   */
  size_t truncate_to;
  /**
   * Length divisors, or k values for alternating sampling.
   */
  const size_t *divisors;
  size_t n_divisors;
  size_t iterations;
  uint64_t seed;
} LexdivSamplingConfig;

typedef struct LexdivIcc {
  double estimate;
  double ci_low;
  double ci_high;
  double ms_rows;
  double ms_cols;
  double ms_error;
} LexdivIcc;

typedef struct LexdivAnova {
  double f;
  size_t df1;
  size_t df2;
  double p;
  double partial_eta_sq;
} LexdivAnova;

typedef struct LexdivCorrTest {
  double t;
  size_t df;
  double p;
  double zou_low;
  double zou_high;
} LexdivCorrTest;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * The string stays valid until the next call on the same thread.
 */
const char *lexdiv_last_error_message(void);

/**
 * Library version, static string.
 */
const char *lexdiv_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void lexdiv_string_free(char *s);

/**
 * Spec with the customary defaults for `kind`.
 */
struct LexdivIndexSpec lexdiv_index_spec_default(enum LexdivIndexKind kind);

/**
 * Tokenizes `content` on whitespace.
 *
 * # Safety
 * `id` and `content` must be NUL-terminated; `out` must be writable.
 */
enum LexdivStatus lexdiv_text_new(const char *id,
                                  const char *content,
                                  bool preserve_case,
                                  struct LexdivText **out);

/**
 * # Safety
 * `text` must come from [`lexdiv_text_new`] and not be freed twice. Null is ignored.
 */
void lexdiv_text_free(struct LexdivText *text);

/**
 * Token and type counts.
 *
 * # Safety
 * `text` must be a live handle; outputs must be writable.
 */
enum LexdivStatus lexdiv_text_counts(const struct LexdivText *text,
                                     size_t *n_tokens,
                                     size_t *n_types);

/**
 * Scores a text. `undefined_factors` (may be null) is set for MTLD when no
 * factor was completed.
 *
 * # Safety
 * Pointers must be valid; `undefined_factors` may be null.
 */
enum LexdivStatus lexdiv_score(const struct LexdivText *text,
                               const struct LexdivIndexSpec *spec,
                               double *value,
                               bool *undefined_factors);

/**
 * Scores a sequence of type codes (equal codes are the same type).
 *
 * # Safety
 * `codes` must hold `len` elements; other pointers must be valid.
 */
enum LexdivStatus lexdiv_score_codes(const uint32_t *codes,
                                     size_t len,
                                     const struct LexdivIndexSpec *spec,
                                     double *value);

/**
 * Per-position token weights of a windowed index, written to `out[0..n_tokens]`.
 *
 * # Safety
 * `out` must have room for `n_tokens` values.
 */
enum LexdivStatus lexdiv_token_weights(enum LexdivIndexKind kind,
                                       size_t n_tokens,
                                       size_t n,
                                       double *out);

/**
 * Probability that a type of frequency `f` in a text of `n_tokens` tokens
 * appears in a sample of `sample` tokens drawn without replacement.
 *
 * # Safety
 * `out` must be writable.
 */
enum LexdivStatus lexdiv_hypergeom_presence(uint64_t n_tokens,
                                            uint64_t f,
                                            uint64_t sample,
                                            double *out);

/**
 * Empty corpus.
 */
struct LexdivCorpus *lexdiv_corpus_new(void);

/**
 * Loads every token file of a directory; texts shorter than `min_length` are skipped.
 *
 * # Safety
 * `dir` must be NUL-terminated; `out` must be writable.
 */
enum LexdivStatus lexdiv_corpus_load(const char *dir,
                                     bool preserve_case,
                                     size_t min_length,
                                     struct LexdivCorpus **out);

/**
 * Appends a copy of `text`. Fails on a duplicate id.
 *
 * # Safety
 * Both handles must be live.
 */
enum LexdivStatus lexdiv_corpus_add_text(struct LexdivCorpus *corpus,
                                         const struct LexdivText *text);

/**
 * # Safety
 * `corpus` must be a live handle or null.
 */
size_t lexdiv_corpus_len(const struct LexdivCorpus *corpus);

/**
 * # Safety
 * `corpus` must come from this library and not be freed twice. Null is ignored.
 */
void lexdiv_corpus_free(struct LexdivCorpus *corpus);

/**
 * Scores every text of `corpus` under one sampling method.
 *
 * # Safety
 * Handles and config pointers must be valid; `out` must be writable.
 */
enum LexdivStatus lexdiv_run_method(const struct LexdivCorpus *corpus,
                                    const struct LexdivSamplingConfig *config,
                                    const struct LexdivIndexSpec *spec,
                                    struct LexdivScoreMatrix **out);

/**
 * Matrix from `n_rows * n_cols` row-major values; ids and labels are generated.
 *
 * # Safety
 * `values` must hold `n_rows * n_cols` elements; `out` must be writable.
 */
enum LexdivStatus lexdiv_matrix_new(size_t n_rows,
                                    size_t n_cols,
                                    const double *values,
                                    struct LexdivScoreMatrix **out);

/**
 * # Safety
 * `m` must be a live handle; outputs must be writable.
 */
enum LexdivStatus lexdiv_matrix_shape(const struct LexdivScoreMatrix *m,
                                      size_t *n_rows,
                                      size_t *n_cols);

/**
 * Copies the row-major values into `out`, which holds `len` elements.
 *
 * # Safety
 * `m` must be live; `out` must hold `len` writable values.
 */
enum LexdivStatus lexdiv_matrix_values(const struct LexdivScoreMatrix *m, double *out, size_t len);

/**
 * Long-form `text_id,condition,score` CSV; free with [`lexdiv_string_free`].
 *
 * # Safety
 * `m` must be live; `out` must be writable.
 */
enum LexdivStatus lexdiv_matrix_to_csv(const struct LexdivScoreMatrix *m, char **out);

/**
 * # Safety
 * `m` must come from this library and not be freed twice. Null is ignored.
 */
void lexdiv_matrix_free(struct LexdivScoreMatrix *m);

/**
 * ICC(2,1) with its 95% interval.
 *
 * # Safety
 * `m` must be live; `out` must be writable.
 */
enum LexdivStatus lexdiv_icc(const struct LexdivScoreMatrix *m,
                             enum LexdivIccMode mode,
                             struct LexdivIcc *out);

/**
 * One-way repeated-measures ANOVA over the columns.
 *
 * # Safety
 * `m` must be live; `out` must be writable.
 */
enum LexdivStatus lexdiv_rm_anova(const struct LexdivScoreMatrix *m, struct LexdivAnova *out);

/**
 * Williams' t and Zou's 95% interval for r_jk − r_jh, which share variable j.
 *
 * # Safety
 * `out` must be writable.
 */
enum LexdivStatus lexdiv_compare_correlations(double r_jk,
                                              double r_jh,
                                              double r_kh,
                                              size_t n,
                                              struct LexdivCorrTest *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEXDIV_H */
