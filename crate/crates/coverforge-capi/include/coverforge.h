#ifndef COVERFORGE_H
#define COVERFORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum CfStatus {
  /**
   * Success; for verdict-producing calls, the property is verified.
   */
  CfOk = 0,
  /**
   * Input text failed to parse.
   */
  CfParseError = 1,
  /**
   * The object violates its invariants, or the verdict is refuted.
   */
  CfInvalid = 2,
  /**
   * The truncation is too shallow to decide.
   */
  CfUndecided = 3,
  /**
   * A null pointer or out-of-range argument.
   */
  CfBadArgument = 4,
  /**
   * Any other failure; see cf_last_error_message.
   */
  CfError = 5,
} CfStatus;

/**
 * Opaque handle to a cover tower.
 */
typedef struct CfTower CfTower;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread; do not free it.
 */
const char *cf_last_error_message(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must have been returned by a `cf_*` call and not freed before.
 */
void cf_string_free(char *s);

/**
 * Frees a tower handle.
 *
 * # Safety
 * `t` must have been returned by a `cf_tower_*` constructor and not freed
 * before.
 */
void cf_tower_free(struct CfTower *t);

/**
 * Parses a tower document.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CfStatus cf_tower_parse(const char *text, struct CfTower **out);

/**
 * Builds the two-loop weighted cover of a continued fraction.
 *
 * # Safety
 * `quotients` must point to `len` readable values; `out` must be valid.
 */
enum CfStatus cf_tower_ostrowski(const uint64_t *quotients,
                                 uintptr_t len,
                                 uintptr_t depth,
                                 struct CfTower **out);

/**
 * Builds the single-loop tower wrapping `wraps[n]` times at level `n + 1`.
 *
 * # Safety
 * `wraps` must point to `len` readable values; `out` must be valid.
 */
enum CfStatus cf_tower_odometer(const uint64_t *wraps,
                                uintptr_t len,
                                uintptr_t depth,
                                struct CfTower **out);

/**
 * Number of levels above the base.
 *
 * # Safety
 * `t` must be a live tower handle.
 */
uintptr_t cf_tower_depth(const struct CfTower *t);

/**
 * Checks the cover axioms; `CfOk` for a legal tower.
 *
 * # Safety
 * `t` must be a live tower handle.
 */
enum CfStatus cf_tower_validate(const struct CfTower *t);

/**
 * Prints the canonical tower document.
 *
 * # Safety
 * `t` must be a live tower handle; `out` receives an owned string.
 */
enum CfStatus cf_tower_print(const struct CfTower *t, char **out);

/**
 * Emits graph-description text for `level`, or all levels when `level < 0`.
 *
 * # Safety
 * `t` must be a live tower handle; `out` receives an owned string.
 */
enum CfStatus cf_tower_to_dot(const struct CfTower *t, int level, char **out);

/**
 * Writes the weight vector of one level into `buf` and reports the count.
 *
 * # Safety
 * `buf` must hold `buf_len` writable values; `written` must be valid.
 */
enum CfStatus cf_tower_weights(const struct CfTower *t,
                               uintptr_t level,
                               uint64_t *buf,
                               uintptr_t buf_len,
                               uintptr_t *written);

/**
 * Chain transitivity of the truncation.
 *
 * # Safety
 * `t` must be a live tower handle.
 */
enum CfStatus cf_analyze_chain_transitive(const struct CfTower *t);

/**
 * Minimality at `level`; on `CfOk` the witness level is stored.
 *
 * # Safety
 * `t` must be a live tower handle; `witness` may be null.
 */
enum CfStatus cf_analyze_minimal(const struct CfTower *t,
                                 uintptr_t level,
                                 uintptr_t cycle_budget,
                                 uintptr_t *witness);

/**
 * Itinerary of `steps` symbols starting at position `offset` of the given
 * deepest-level arrow.
 *
 * # Safety
 * `t` must be a live tower handle; `out` receives an owned string.
 */
enum CfStatus cf_tower_itinerary(const struct CfTower *t,
                                 uintptr_t top_arrow,
                                 uint64_t offset,
                                 uintptr_t steps,
                                 char **out);

/**
 * Reads an S-adic system off single-vertex levels and prints its document.
 *
 * # Safety
 * `t` must be a live tower handle; `out` receives an owned string.
 */
enum CfStatus cf_tower_to_sadic(const struct CfTower *t, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COVERFORGE_H */
