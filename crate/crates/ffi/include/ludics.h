#ifndef LUDICS_H
#define LUDICS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LudStatus {
  LUD_STATUS_OK = 0,
  LUD_STATUS_NULL_POINTER = 1,
  LUD_STATUS_INVALID_UTF8 = 2,
  LUD_STATUS_PARSE = 3,
  LUD_STATUS_VALIDATION = 4,
  LUD_STATUS_NET = 5,
  LUD_STATUS_NOT_FOUND = 6,
  LUD_STATUS_ENGINE = 7,
  LUD_STATUS_PANIC = 8,
} LudStatus;

typedef enum LudVerdict {
  LUD_VERDICT_CONVERGED = 0,
  LUD_VERDICT_DIVERGED = 1,
  LUD_VERDICT_OUT_OF_FUEL = 2,
} LudVerdict;

/**
 * A parsed design file.
 */
typedef struct LudLibrary LudLibrary;

/**
 * The result of a normalization.
 */
typedef struct LudOutcome LudOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a design file. On success `*out` holds a new library.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LudStatus lud_library_parse(const char *source, struct LudLibrary **out);

/**
 * Number of designs in the library, 0 for a null handle.
 *
 * # Safety
 * `lib` must be null or a handle from [`lud_library_parse`].
 */
size_t lud_library_design_count(const struct LudLibrary *lib);

/**
 * # Safety
 * `lib` must be null or a handle from [`lud_library_parse`] not yet freed.
 */
void lud_library_free(struct LudLibrary *lib);

/**
 * Normalizes the net made of the comma-separated `members`. `cuts` is a
 * comma-separated list of loci, or null to take every handle that is
 * also some member's tine.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum LudStatus lud_normalize(const struct LudLibrary *lib,
                             const char *members,
                             const char *cuts,
                             size_t fuel,
                             struct LudOutcome **out);

/**
 * # Safety
 * `outcome` must be a valid handle.
 */
enum LudVerdict lud_outcome_verdict(const struct LudOutcome *outcome);

/**
 * Number of actions in the trace, 0 for a null handle.
 *
 * # Safety
 * `outcome` must be null or a valid handle.
 */
size_t lud_outcome_step_count(const struct LudOutcome *outcome);

/**
 * The trace in its line form. Release with [`lud_string_free`].
 *
 * # Safety
 * `outcome` must be null or a valid handle.
 */
char *lud_outcome_trace_text(const struct LudOutcome *outcome);

/**
 * # Safety
 * `outcome` must be null or a handle not yet freed.
 */
void lud_outcome_free(struct LudOutcome *outcome);

/**
 * Orthogonality of two designs on dual bases: `*answer` is 1 (yes),
 * 0 (no) or -1 (out of fuel).
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum LudStatus lud_orthogonal(const struct LudLibrary *lib,
                              const char *left,
                              const char *right,
                              size_t fuel,
                              int *answer);

/**
 * Checks that the copy-cat design moves `design` to the locus `to`;
 * `*holds` is 1 when it does.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum LudStatus lud_fax_check(const struct LudLibrary *lib,
                             const char *design,
                             const char *to,
                             size_t fuel,
                             int *holds);

/**
 * The message of the last failed call on this thread, or null. Release
 * with [`lud_string_free`].
 */
char *lud_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void lud_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LUDICS_H */
