#ifndef HYTW_H
#define HYTW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HytwStatus {
  HYTW_STATUS_OK = 0,
  HYTW_STATUS_NULL_ARGUMENT = 1,
  HYTW_STATUS_INVALID_UTF8 = 2,
  HYTW_STATUS_SYNTAX = 3,
  HYTW_STATUS_TYPE = 4,
  HYTW_STATUS_BUDGET = 5,
  HYTW_STATUS_DOMAIN = 6,
  HYTW_STATUS_PANIC = 7,
} HytwStatus;

/**
 * A tagged tree; not necessarily a valid condition.
 */
typedef struct HytwCondition HytwCondition;

/**
 * A finite game tree.
 */
typedef struct HytwGame HytwGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The library version as a static string.
 */
const char *hytw_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *hytw_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void hytw_string_free(char *s);

/**
 * Normalizes every term of a term file and writes the canonical normal
 * forms, one per line, to `*out`. A `budget` of 0 means the default.
 *
 * # Safety
 * `src` must be a nul-terminated string and `out` writable.
 */
enum HytwStatus hytw_normalize(const char *src, uint64_t budget, char **out);

/**
 * Writes -1, 0 or 1 to `*cmp` as ordinal `a` is below, equal to or above `b`.
 *
 * # Safety
 * `a` and `b` must be nul-terminated strings and `cmp` writable.
 */
enum HytwStatus hytw_ordinal_compare(const char *a, const char *b, int32_t *cmp);

/**
 * Writes the Cantor normal form of `a + b` to `*out`.
 *
 * # Safety
 * `a` and `b` must be nul-terminated strings and `out` writable.
 */
enum HytwStatus hytw_ordinal_add(const char *a, const char *b, char **out);

/**
 * Parses a game file (one node per line, moves separated by spaces).
 *
 * # Safety
 * `src` must be a nul-terminated string and `out` writable.
 */
enum HytwStatus hytw_game_parse(const char *src, struct HytwGame **out);

/**
 * # Safety
 * `g` must be null or a handle from this library, freed once.
 */
void hytw_game_free(struct HytwGame *g);

/**
 * Number of nodes, counting the root; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
uint64_t hytw_game_node_count(const struct HytwGame *g);

/**
 * Solves the game: `*winner` is 1 or 2 for player I or II, `*rank` the
 * rank of the root. A `budget` of 0 means the default node budget.
 *
 * # Safety
 * `g` must be a live handle and `winner`, `rank` writable.
 */
enum HytwStatus hytw_game_solve(const struct HytwGame *g,
                                uint64_t budget,
                                uint8_t *winner,
                                uint64_t *rank);

/**
 * Parses a condition file of `PATH TAG0 TAG1` lines. The result is not
 * checked; see [`hytw_condition_violations`].
 *
 * # Safety
 * `src` must be a nul-terminated string and `out` writable.
 */
enum HytwStatus hytw_condition_parse(const char *src, struct HytwCondition **out);

/**
 * # Safety
 * `c` must be null or a handle from this library, freed once.
 */
void hytw_condition_free(struct HytwCondition *c);

/**
 * Writes the condition in file format to `*out`.
 *
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum HytwStatus hytw_condition_print(const struct HytwCondition *c, char **out);

/**
 * Writes the number of rule violations to `*count`, 0 for a condition.
 *
 * # Safety
 * `c` must be a live handle and `count` writable.
 */
enum HytwStatus hytw_condition_violations(const struct HytwCondition *c, uint64_t *count);

/**
 * The projection replacing every tag at or above `alpha` by `inf`.
 *
 * # Safety
 * `c` must be a live handle, `alpha` a nul-terminated string and `out` writable.
 */
enum HytwStatus hytw_condition_project(const struct HytwCondition *c,
                                       const char *alpha,
                                       struct HytwCondition **out);

/**
 * Retags `r`, an extension of `q`, into an extension of `p` that agrees
 * with `r` below a bound at least `gamma`.
 *
 * # Safety
 * `p`, `q`, `r` must be live handles, `alpha` and `gamma` nul-terminated
 * strings and `out` writable.
 */
enum HytwStatus hytw_retag(const struct HytwCondition *p,
                           const struct HytwCondition *q,
                           const struct HytwCondition *r,
                           const char *alpha,
                           const char *gamma,
                           struct HytwCondition **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYTW_H */
