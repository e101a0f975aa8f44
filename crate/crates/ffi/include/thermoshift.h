#ifndef THERMOSHIFT_H
#define THERMOSHIFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TsStatus {
  TS_STATUS_OK = 0,
  TS_STATUS_NULL_ARGUMENT = 1,
  TS_STATUS_INVALID_UTF8 = 2,
  TS_STATUS_INVALID_INPUT = 3,
  TS_STATUS_BUDGET_EXCEEDED = 4,
  TS_STATUS_CONDITION_FAILED = 5,
  TS_STATUS_BUFFER_TOO_SMALL = 6,
  TS_STATUS_INTERNAL = 7,
} TsStatus;

/**
 * Opaque weight system.
 */
typedef struct TsPotential TsPotential;

/**
 * Opaque shift space.
 */
typedef struct TsShift TsShift;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string.
 */
const char *ts_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *ts_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ts_string_free(char *s);

/**
 * Build a shift from a JSON shift spec.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TsStatus ts_shift_from_json(const char *json, struct TsShift **out);

/**
 * # Safety
 * `shift` must come from [`ts_shift_from_json`] and not have been freed.
 */
void ts_shift_free(struct TsShift *shift);

/**
 * Build a weight system from a JSON potential spec.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TsStatus ts_potential_from_json(const char *json, struct TsPotential **out);

/**
 * # Safety
 * `potential` must come from [`ts_potential_from_json`] and not have been freed.
 */
void ts_potential_free(struct TsPotential *potential);

/**
 * `|B_n|`. Counts above `UINT64_MAX` give `BUDGET_EXCEEDED`.
 *
 * # Safety
 * `shift` must be a live handle; `out` must be writable.
 */
enum TsStatus ts_count_words(const struct TsShift *shift, size_t n, uint64_t *out);

/**
 * `log Z_n` for `n = 1..=n_max` into `out[0..n_max]`.
 *
 * # Safety
 * Handles must be live; `out` must hold `out_len` doubles.
 */
enum TsStatus ts_log_partition(const struct TsShift *shift,
                               const struct TsPotential *potential,
                               size_t n_max,
                               double *out,
                               size_t out_len);

/**
 * `log Z_n(F, anchor)` for `n = 1..=n_max`; `-inf` where no cycle exists.
 *
 * # Safety
 * Handles must be live; `out` must hold `out_len` doubles.
 */
enum TsStatus ts_gurevich(const struct TsShift *shift,
                          const struct TsPotential *potential,
                          uint32_t anchor,
                          size_t n_max,
                          double *out,
                          size_t out_len);

/**
 * Full pressure report as JSON; free with [`ts_string_free`].
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum TsStatus ts_pressure_report_json(const struct TsShift *shift,
                                      const struct TsPotential *potential,
                                      size_t n_max,
                                      char **out);

/**
 * Singular values of the row-major `d × d` matrix `a`, largest first,
 * into `out[0..d]`. `d` is 2 or 3.
 *
 * # Safety
 * `a` must hold `d * d` doubles and `out` `d` doubles.
 */
enum TsStatus ts_singular_values(const double *a, size_t d, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THERMOSHIFT_H */
