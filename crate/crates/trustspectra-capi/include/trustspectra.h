#ifndef TRUSTSPECTRA_H
#define TRUSTSPECTRA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every API call.
 */
typedef enum ts_status {
  /**
   * Success.
   */
  TS_OK = 0,
  /**
   * Malformed or inconsistent input data.
   */
  TS_ERR_DATA = 2,
  /**
   * Iteration cap exceeded without convergence.
   */
  TS_ERR_CONVERGENCE = 3,
  /**
   * Invalid argument (bad enum value, non-UTF-8 string, ...).
   */
  TS_ERR_INVALID = 4,
  /**
   * A required pointer was null.
   */
  TS_ERR_NULL = 5,
} ts_status;

/**
 * Input format selector for the parse/load calls.
 */
typedef enum ts_format {
  /**
   * Header row of trustor ids, one row per trustee; empty cells missing.
   */
  TS_FORMAT_WIDE_CSV = 0,
  /**
   * `trustor,trustee,rating` triples.
   */
  TS_FORMAT_LONG_CSV = 1,
  /**
   * JSON document with `subjects`, `objects`, and `cells`.
   */
  TS_FORMAT_JSON = 2,
} ts_format;

/**
 * Decomposition method selector.
 */
typedef enum ts_method {
  TS_METHOD_GOLUB_KAHAN = 0,
  TS_METHOD_JACOBI = 1,
} ts_method;

/**
 * Opaque spectral decomposition of a complete block.
 */
typedef struct ts_decomposition ts_decomposition;

/**
 * Opaque parsed score table.
 */
typedef struct ts_table ts_table;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a score table from an in-memory document.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be a valid pointer.
 */
enum ts_status ts_table_parse(const char *text, enum ts_format format, struct ts_table **out);

/**
 * Parses a score table from a file.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be a valid pointer.
 */
enum ts_status ts_table_load(const char *path, enum ts_format format, struct ts_table **out);

/**
 * Frees a table handle. Null is ignored.
 *
 * # Safety
 * `table` must come from this library and not be freed twice.
 */
void ts_table_free(struct ts_table *table);

/**
 * Decomposes a complete block of the table. Passing null `rows`/`cols`
 * (with zero lengths) selects the largest complete block greedily.
 *
 * # Safety
 * Pointer arguments must satisfy the conventions above.
 */
enum ts_status ts_decompose(const struct ts_table *table,
                            const char *const *rows,
                            uintptr_t n_rows,
                            const char *const *cols,
                            uintptr_t n_cols,
                            double tol,
                            enum ts_method method,
                            struct ts_decomposition **out);

/**
 * Frees a decomposition handle. Null is ignored.
 *
 * # Safety
 * `d` must come from this library and not be freed twice.
 */
void ts_decomposition_free(struct ts_decomposition *d);

/**
 * Number of retained concepts; 0 for a null handle.
 *
 * # Safety
 * `d` must be a live handle or null.
 */
uintptr_t ts_rank(const struct ts_decomposition *d);

/**
 * Copies the singular weights into `out` (capacity `cap`).
 *
 * # Safety
 * `out` must point to at least `cap` doubles.
 */
enum ts_status ts_lambdas(const struct ts_decomposition *d, double *out, uintptr_t cap);

/**
 * Serializes the decomposition to JSON. Free with [`ts_string_free`].
 *
 * # Safety
 * `d` must be a live handle; `out` must be a valid pointer.
 */
enum ts_status ts_to_json(const struct ts_decomposition *d, char **out);

/**
 * Per-concept contributions of one rating, as JSON. Free with
 * [`ts_string_free`].
 *
 * # Safety
 * Pointer arguments must satisfy the conventions above.
 */
enum ts_status ts_edge_json(const struct ts_decomposition *d,
                            const char *subject,
                            const char *object,
                            char **out);

/**
 * Trustee ranking for a subject under a 1-based concept, as JSON. Free
 * with [`ts_string_free`].
 *
 * # Safety
 * Pointer arguments must satisfy the conventions above.
 */
enum ts_status ts_recommend_json(const struct ts_decomposition *d,
                                 const char *subject,
                                 uintptr_t concept,
                                 char **out);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ts_string_free(char *s);

/**
 * Message of the most recent error on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *ts_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRUSTSPECTRA_H */
