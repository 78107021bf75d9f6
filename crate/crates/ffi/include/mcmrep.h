#ifndef MCMREP_H
#define MCMREP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `Input` and `Computation` mirror CLI exit codes 2 and 1.
 */
typedef enum McmStatus {
  MCM_STATUS_OK = 0,
  MCM_STATUS_COMPUTATION = 1,
  MCM_STATUS_INPUT = 2,
  MCM_STATUS_NULL_ARGUMENT = 3,
  MCM_STATUS_INVALID_UTF8 = 4,
  MCM_STATUS_PANIC = 5,
} McmStatus;

/**
 * Opaque parsed problem.
 */
typedef struct McmProblem McmProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mcm_version(void);

/**
 * Structured error JSON for the last failed call on this thread, or NULL.
 * The pointer stays valid until the next call into the library.
 */
const char *mcm_last_error(void);

/**
 * Parses a problem from TOML text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum McmStatus mcm_problem_from_str(const char *toml, struct McmProblem **out);

/**
 * Parses a problem file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum McmStatus mcm_problem_from_file(const char *path, struct McmProblem **out);

/**
 * Releases a problem handle. NULL is ignored.
 *
 * # Safety
 * `problem` must come from this library and not be used afterwards.
 */
void mcm_problem_free(struct McmProblem *problem);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void mcm_string_free(char *s);

/**
 * Number of named modules in the problem, or 0 for NULL.
 *
 * # Safety
 * `problem` must be NULL or a live handle.
 */
size_t mcm_problem_module_count(const struct McmProblem *problem);

/**
 * Equation system report (`mcmrep.equations/1`).
 *
 * # Safety
 * Pointers must be valid; `framing` NUL-terminated.
 */
enum McmStatus mcm_equations_json(const struct McmProblem *problem,
                                  const char *framing,
                                  char **out);

/**
 * Tangent report (`mcmrep.tangent/1`).
 *
 * # Safety
 * Pointers must be valid; `module` NUL-terminated.
 */
enum McmStatus mcm_tangent_json(const struct McmProblem *problem,
                                const char *module,
                                bool crosscheck,
                                char **out);

/**
 * Ext¹ window report (`mcmrep.ext/1`) over internal degrees `lo..=hi`.
 *
 * # Safety
 * Pointers must be valid; names NUL-terminated.
 */
enum McmStatus mcm_ext1_json(const struct McmProblem *problem,
                             const char *source,
                             const char *target,
                             int64_t lo,
                             int64_t hi,
                             char **out);

/**
 * Module statistics report (`mcmrep.stats/1`).
 *
 * # Safety
 * Pointers must be valid; `module` NUL-terminated.
 */
enum McmStatus mcm_stats_json(const struct McmProblem *problem, const char *module, char **out);

/**
 * Gap splitting report (`mcmrep.split/1`).
 *
 * # Safety
 * Pointers must be valid; `module` NUL-terminated.
 */
enum McmStatus mcm_split_json(const struct McmProblem *problem, const char *module, char **out);

/**
 * Rigid class report (`mcmrep.classify/1`).
 *
 * # Safety
 * Pointers must be valid; `framing` NUL-terminated.
 */
enum McmStatus mcm_classify_json(const struct McmProblem *problem,
                                 const char *framing,
                                 size_t samples,
                                 uint64_t seed,
                                 char **out);

/**
 * Writes the catalog of a curve singularity as problem-file TOML.
 *
 * # Safety
 * `name` must be NUL-terminated and `out` valid.
 */
enum McmStatus mcm_ade_problem_toml(const char *name,
                                    uint32_t n,
                                    uint64_t p,
                                    uint64_t seed,
                                    char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MCMREP_H */
