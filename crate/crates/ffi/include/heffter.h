#ifndef HEFFTER_H
#define HEFFTER_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible function.
 */
typedef enum HeffterStatus {
  HEFFTER_STATUS_OK = 0,
  HEFFTER_STATUS_NULL_POINTER = 1,
  HEFFTER_STATUS_INVALID_UTF8 = 2,
  HEFFTER_STATUS_PARSE = 3,
  HEFFTER_STATUS_INVALID_ARGUMENT = 4,
  HEFFTER_STATUS_NOT_COMPATIBLE = 5,
  HEFFTER_STATUS_HYPOTHESIS = 6,
  HEFFTER_STATUS_DOMAIN = 7,
  HEFFTER_STATUS_BUDGET = 8,
  HEFFTER_STATUS_FAILED = 9,
  HEFFTER_STATUS_PANIC = 10,
} HeffterStatus;

/**
 * Opaque handle to a partially filled array.
 */
typedef struct HeffterArray HeffterArray;

/**
 * Opaque handle to a rotation system.
 */
typedef struct HeffterEmbedding HeffterEmbedding;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *heffter_last_error(void);

/**
 * Parses an array from its text form (`v=.. t=.. m=.. n=..` header, then
 * comma separated rows with empty fields for empty cells).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HeffterStatus heffter_array_parse(const char *text, struct HeffterArray **out);

/**
 * # Safety
 * `a` must come from [`heffter_array_parse`] and not be freed twice.
 */
void heffter_array_free(struct HeffterArray *a);

/**
 * # Safety
 * `a` must be a live handle; the out-pointers must be valid.
 */
enum HeffterStatus heffter_array_dims(const struct HeffterArray *a,
                                      size_t *rows,
                                      size_t *cols,
                                      uint32_t *v,
                                      uint32_t *t);

/**
 * Writes whether the array is a Heffter array.
 *
 * # Safety
 * `a` must be a live handle and `pass` a valid pointer.
 */
enum HeffterStatus heffter_array_validate(const struct HeffterArray *a, bool *pass);

/**
 * Full validation report as JSON.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum HeffterStatus heffter_array_validate_json(const struct HeffterArray *a, char **out);

/**
 * # Safety
 * `a` must be a live handle and `simple` a valid pointer.
 */
enum HeffterStatus heffter_array_globally_simple(const struct HeffterArray *a, bool *simple);

/**
 * Writes whether the orientation pair `(r, c)` (entries ±1) solves the
 * crazy knight's tour on the array's skeleton.
 *
 * # Safety
 * `a` must be a live handle, `r` and `c` must point to `r_len` and `c_len`
 * bytes, and `solution` must be valid.
 */
enum HeffterStatus heffter_tour_is_solution(const struct HeffterArray *a,
                                            const int8_t *r,
                                            size_t r_len,
                                            const int8_t *c,
                                            size_t c_len,
                                            bool *solution);

/**
 * Builds the rotation system induced by the orientation pair.
 * Fails with `NOT_COMPATIBLE` when the pair is not a tour solution.
 *
 * # Safety
 * As for [`heffter_tour_is_solution`]; `out` must be valid.
 */
enum HeffterStatus heffter_embedding_build(const struct HeffterArray *a,
                                           const int8_t *r,
                                           size_t r_len,
                                           const int8_t *c,
                                           size_t c_len,
                                           struct HeffterEmbedding **out);

/**
 * # Safety
 * `e` must come from [`heffter_embedding_build`] and not be freed twice.
 */
void heffter_embedding_free(struct HeffterEmbedding *e);

/**
 * Face census of the embedding as JSON.
 *
 * # Safety
 * `a` must be the array `e` was built from; `out` must be valid.
 */
enum HeffterStatus heffter_embedding_report_json(const struct HeffterArray *a,
                                                 const struct HeffterEmbedding *e,
                                                 char **out);

/**
 * Genus from the Euler characteristic of the traced faces.
 *
 * # Safety
 * `a` must be the array `e` was built from; `genus` must be valid.
 */
enum HeffterStatus heffter_embedding_genus(const struct HeffterArray *a,
                                           const struct HeffterEmbedding *e,
                                           int64_t *genus);

/**
 * Closed-form genus of a biembedding of an `H_t(m,n;h,k)`.
 *
 * # Safety
 * `genus` must be valid.
 */
enum HeffterStatus heffter_genus_formula(uint64_t m,
                                         uint64_t n,
                                         uint64_t k,
                                         uint64_t t,
                                         int64_t *genus);

/**
 * Evaluates a lower bound by theorem name (for example `"CDY"` or
 * `"PropK7"`) and writes the result as JSON. `subgroup_t` is ignored when 0.
 *
 * # Safety
 * `theorem` must be NUL-terminated and `out` valid.
 */
enum HeffterStatus heffter_bounds_json(const char *theorem,
                                       uint64_t n,
                                       uint64_t k,
                                       uint64_t subgroup_t,
                                       char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void heffter_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEFFTER_H */
