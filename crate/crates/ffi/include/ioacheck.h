#ifndef IOACHECK_H
#define IOACHECK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Per-axiom outcome, for `ioa_report_count`.
 */
typedef enum IoaCheckStatus {
  IOA_CHECK_STATUS_PASS = 0,
  IOA_CHECK_STATUS_FAIL = 1,
  IOA_CHECK_STATUS_SKIPPED = 2,
} IoaCheckStatus;

/**
 * Result of every call.
 */
typedef enum IoaStatus {
  IOA_STATUS_OK = 0,
  IOA_STATUS_NULL_POINTER = 1,
  IOA_STATUS_INVALID_UTF8 = 2,
  IOA_STATUS_PARSE = 3,
  IOA_STATUS_INVALID = 4,
  IOA_STATUS_IO = 5,
  IOA_STATUS_UNKNOWN_SUITE = 6,
  IOA_STATUS_BAD_ARGUMENT = 7,
  IOA_STATUS_INTERNAL = 8,
} IoaStatus;

/**
 * A loaded, validated algebra instance.
 */
typedef struct IoaInstance IoaInstance;

/**
 * The outcome of a check run.
 */
typedef struct IoaReport IoaReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next call.
 */
const char *ioa_last_error(void);

/**
 * Loads and validates an instance file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum IoaStatus ioa_instance_load(const char *path, struct IoaInstance **out);

/**
 * Parses and validates instance text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum IoaStatus ioa_instance_parse(const char *text, struct IoaInstance **out);

/**
 * Generated example: `kind` is "trivial" or "abelian"; `params` is a space-separated list
 * such as "Z2 q=1/4" (may be NULL for trivial).
 *
 * # Safety
 * String arguments must be NUL-terminated or NULL where allowed; `out` must be writable.
 */
enum IoaStatus ioa_instance_generate(const char *kind,
                                     const char *params,
                                     struct IoaInstance **out);

/**
 * # Safety
 * `inst` must come from an `ioa_instance_*` constructor and not be freed twice.
 */
void ioa_instance_free(struct IoaInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle; `out` writable.
 */
enum IoaStatus ioa_instance_num_colors(const struct IoaInstance *inst, size_t *out);

/**
 * Cyclotomic order N of the coefficient field.
 *
 * # Safety
 * `inst` must be a live handle; `out` writable.
 */
enum IoaStatus ioa_instance_order(const struct IoaInstance *inst, uint32_t *out);

/**
 * Instance in the textual file format; free with `ioa_string_free`.
 *
 * # Safety
 * `inst` must be a live handle; `out` writable.
 */
enum IoaStatus ioa_instance_save(const struct IoaInstance *inst, char **out);

/**
 * Braiding matrices derived from F and Omega, as text; free with `ioa_string_free`.
 *
 * # Safety
 * `inst` must be a live handle; `out` writable.
 */
enum IoaStatus ioa_derive_braiding(const struct IoaInstance *inst, char **out);

/**
 * Runs suites. `suites` is a comma-separated list of suite names, or NULL for all;
 * `jobs` = 0 uses the default thread pool.
 *
 * # Safety
 * `inst` must be a live handle; `suites` NUL-terminated or NULL; `out` writable.
 */
enum IoaStatus ioa_check(const struct IoaInstance *inst,
                         const char *suites,
                         int64_t window,
                         size_t jobs,
                         struct IoaReport **out);

/**
 * # Safety
 * `rep` must come from `ioa_check` and not be freed twice.
 */
void ioa_report_free(struct IoaReport *rep);

/**
 * 1 when no axiom failed, else 0.
 *
 * # Safety
 * `rep` must be a live handle; `out` writable.
 */
enum IoaStatus ioa_report_passed(const struct IoaReport *rep, int32_t *out);

/**
 * Number of axiom results with the given status, over all suites.
 *
 * # Safety
 * `rep` must be a live handle; `out` writable.
 */
enum IoaStatus ioa_report_count(const struct IoaReport *rep,
                                enum IoaCheckStatus status,
                                size_t *out);

/**
 * Structured report; free with `ioa_string_free`.
 *
 * # Safety
 * `rep` must be a live handle; `out` writable.
 */
enum IoaStatus ioa_report_json(const struct IoaReport *rep, char **out);

/**
 * Human-readable report; free with `ioa_string_free`.
 *
 * # Safety
 * `rep` must be a live handle; `out` writable.
 */
enum IoaStatus ioa_report_text(const struct IoaReport *rep, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ioa_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IOACHECK_H */
