#ifndef BRST_H
#define BRST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum BrstStatus {
  BRST_STATUS_OK = 0,
  BRST_STATUS_NULL_POINTER = 1,
  BRST_STATUS_INVALID_UTF8 = 2,
  BRST_STATUS_INVALID_ARGUMENT = 3,
  BRST_STATUS_PARSE_ERROR = 4,
  BRST_STATUS_UNKNOWN_NAME = 5,
  BRST_STATUS_SINGULARITY = 6,
  BRST_STATUS_BLOW_UP = 7,
  BRST_STATUS_STABILITY_VIOLATION = 8,
  BRST_STATUS_SYMBOLIC_FAILURE = 9,
  BRST_STATUS_IO = 10,
  BRST_STATUS_PANIC = 11,
} BrstStatus;

/**
 * Opaque grid state.
 */
typedef struct BrstState BrstState;

/**
 * Opaque evolution system.
 */
typedef struct BrstSystem BrstSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call on this thread.
 */
const char *brst_last_error(void);

/**
 * Library version as a static string.
 */
const char *brst_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` is null or was returned through a `char **` out-parameter of this
 * library and not freed before.
 */
void brst_string_free(char *s);

/**
 * Builds a catalog system. `params` may be null or empty.
 *
 * # Safety
 * String arguments are null or NUL-terminated; `out` is a valid slot.
 */
enum BrstStatus brst_system_new(const char *name, const char *params, struct BrstSystem **out);

/**
 * Builds a system from a JSON manifest.
 *
 * # Safety
 * `json` is NUL-terminated; `out` is a valid slot.
 */
enum BrstStatus brst_system_from_json(const char *json, struct BrstSystem **out);

/**
 * JSON manifest of a system.
 *
 * # Safety
 * `system` is a live handle; `out` is a valid slot.
 */
enum BrstStatus brst_system_to_json(const struct BrstSystem *system, char **out);

/**
 * # Safety
 * `system` is null or a handle from this library not freed before.
 */
void brst_system_free(struct BrstSystem *system);

/**
 * Empty state on a periodic grid of `n` points over `[0, length)`.
 *
 * # Safety
 * `out` is a valid slot.
 */
enum BrstStatus brst_state_new(double length, size_t n, struct BrstState **out);

/**
 * Built-in soliton data (`kdv` or `mkdv`) with the ghost set to `d_x` of
 * the field.
 *
 * # Safety
 * `system` is a live handle; `out` is a valid slot.
 */
enum BrstStatus brst_state_soliton(const struct BrstSystem *system,
                                   double k,
                                   double x0,
                                   double length,
                                   size_t n,
                                   struct BrstState **out);

/**
 * Sets (or replaces) a field from `len` values.
 *
 * # Safety
 * `state` is a live handle; `values` points to `len` doubles.
 */
enum BrstStatus brst_state_set_field(struct BrstState *state,
                                     const char *name,
                                     const double *values,
                                     size_t len);

/**
 * Copies a field into `out`, which must hold `len` = grid size doubles.
 *
 * # Safety
 * `state` is a live handle; `out` points to `len` writable doubles.
 */
enum BrstStatus brst_state_get_field(const struct BrstState *state,
                                     const char *name,
                                     double *out,
                                     size_t len);

/**
 * Grid size and current time.
 *
 * # Safety
 * `state` is a live handle; `n` and `t` are null or valid.
 */
enum BrstStatus brst_state_info(const struct BrstState *state, size_t *n, double *t);

/**
 * # Safety
 * `state` is null or a handle from this library not freed before.
 */
void brst_state_free(struct BrstState *state);

/**
 * Integrates `state` to `t_end` with step `dt` and returns the final state
 * as a new handle.
 *
 * # Safety
 * Handles are live; `out` is a valid slot.
 */
enum BrstStatus brst_evolve(const struct BrstSystem *system,
                            const struct BrstState *state,
                            double t_end,
                            double dt,
                            struct BrstState **out);

/**
 * Integral of a named density of `system` on `state`.
 *
 * # Safety
 * Handles are live; `density` is NUL-terminated; `out` is valid.
 */
enum BrstStatus brst_functional(const struct BrstSystem *system,
                                const char *density,
                                const struct BrstState *state,
                                double *out);

/**
 * Runs a named check (or `all`), writing the JSON reports to `out_json`
 * and `1` or `0` to `passed`.
 *
 * # Safety
 * `check` is NUL-terminated; `out_json` and `passed` are valid.
 */
enum BrstStatus brst_verify(const char *check, char **out_json, int *passed);

/**
 * Variational derivative of `density` with respect to the even `field`.
 *
 * # Safety
 * Strings are NUL-terminated; `out` is a valid slot.
 */
enum BrstStatus brst_euler(const char *density, const char *field, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BRST_H */
