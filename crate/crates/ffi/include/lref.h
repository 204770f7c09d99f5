#ifndef LREF_H
#define LREF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LrefStatus {
  LREF_STATUS_OK = 0,
  LREF_STATUS_NULL_ARGUMENT = 1,
  LREF_STATUS_INVALID_UTF8 = 2,
  LREF_STATUS_PARSE = 3,
  LREF_STATUS_TYPE = 4,
  LREF_STATUS_EVAL = 5,
  LREF_STATUS_SEMANTIC = 6,
  LREF_STATUS_USAGE = 7,
  /**
   * The call completed and its report lists failures.
   */
  LREF_STATUS_FAILURES = 8,
  LREF_STATUS_PANIC = 9,
} LrefStatus;

typedef enum LrefVerdict {
  LREF_VERDICT_EQUAL = 0,
  LREF_VERDICT_NOT_EQUAL = 1,
  LREF_VERDICT_APPROXIMATE = 2,
} LrefVerdict;

/**
 * A parsed program: signature, layout and core term.
 */
typedef struct LrefProgram LrefProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the most recent failure on this thread, or null. Free it
 * with `lref_string_free`.
 */
char *lref_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void lref_string_free(char *s);

/**
 * Parses a program file's text into a new handle.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LrefStatus lref_program_parse(const char *source, struct LrefProgram **out);

/**
 * # Safety
 * `p` must be null or a handle from `lref_program_parse` not yet freed.
 */
void lref_program_free(struct LrefProgram *p);

/**
 * The principal type of the program, with `_` for undetermined parts.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum LrefStatus lref_program_type(const struct LrefProgram *p, char **out);

/**
 * Evaluates the program. `heap` is null or a literal such as `{#0 = true}`;
 * cells it leaves out start at their first value. The result is JSON with
 * fields `value` and `heap`.
 *
 * # Safety
 * `p` must be a live handle, `heap` null or NUL-terminated, `out` valid.
 */
enum LrefStatus lref_program_run(const struct LrefProgram *p, const char *heap, char **out);

/**
 * Compares the denotations of two programs with the same signature and
 * layout over extensions of at most `bound` cells. `ty` is null to infer
 * the result type.
 *
 * # Safety
 * Both handles must be live, `ty` null or NUL-terminated, `out` valid.
 */
enum LrefStatus lref_programs_equal(const struct LrefProgram *p1,
                                    const struct LrefProgram *p2,
                                    const char *ty,
                                    uint32_t bound,
                                    enum LrefVerdict *out);

/**
 * Runs a law suite (`monad`, `hiding`, `gs`, `masking` or `soundness`) on
 * the bundled signatures and writes the reports as a JSON array. Returns
 * `LREF_STATUS_FAILURES` when any report lists failures.
 *
 * # Safety
 * `suite` must be NUL-terminated and `out` valid.
 */
enum LrefStatus lref_laws(const char *suite,
                          uint32_t bound,
                          uint64_t seed,
                          uint32_t programs,
                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LREF_H */
