#ifndef FVX_H
#define FVX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum FvxStatus {
  FVX_STATUS_OK = 0,
  // A required pointer was null or a string was not UTF-8.
  FVX_STATUS_NULL_OR_INVALID_ARGUMENT = 1,
  // The problem document or LP text was rejected.
  FVX_STATUS_INVALID_INPUT = 2,
  // Every point is forbidden, or no distinct assignment exists.
  FVX_STATUS_INFEASIBLE = 3,
  // Verification ran and found a disagreement.
  FVX_STATUS_VERIFICATION_FAILED = 4,
  // The method does not apply to this problem.
  FVX_STATUS_INCOMPATIBLE_METHOD = 5,
  // The instance is too large to enumerate.
  FVX_STATUS_GUARD_EXCEEDED = 6,
  // Any other library error.
  FVX_STATUS_FAILED = 7,
  // A panic was caught at the boundary.
  FVX_STATUS_PANIC = 8,
} FvxStatus;

// Opaque problem handle.
typedef struct FvxProblem FvxProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a problem document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum FvxStatus fvx_problem_from_json(const char *json, struct FvxProblem **out);

// Releases a handle; null is ignored.
//
// # Safety
// `p` must come from [`fvx_problem_from_json`] and not be used afterwards.
void fvx_problem_free(struct FvxProblem *p);

// Dimension of the problem, or 0 for a null handle.
//
// # Safety
// `p` must be null or a live handle.
size_t fvx_problem_dim(const struct FvxProblem *p);

// Solves the problem; writes `{status, value, vertex, oracle_calls}`.
// An infeasible problem returns [`FvxStatus::Infeasible`] with the report.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum FvxStatus fvx_solve(const struct FvxProblem *p, char **out);

// The `k` best allowed vertices; `k == 0` uses the `k` of the document.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum FvxStatus fvx_kbest(const struct FvxProblem *p, size_t k, char **out);

// All-different over the slots of the document.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum FvxStatus fvx_alldiff(const struct FvxProblem *p, char **out);

// Compiles to LP text. `method_name` may be null for the default builder.
//
// # Safety
// `p` must be a live handle; `method_name` null or NUL-terminated; `out`
// writable.
enum FvxStatus fvx_compile(const struct FvxProblem *p, const char *method_name, char **out);

// Compiles with `method_name` (null for the default) and verifies the result.
//
// # Safety
// As [`fvx_compile`].
enum FvxStatus fvx_verify(const struct FvxProblem *p,
                          const char *method_name,
                          size_t trials,
                          uint64_t seed,
                          char **out);

// Verifies LP text that embeds its problem document.
//
// # Safety
// `lp` must be NUL-terminated; `out` writable.
enum FvxStatus fvx_verify_lp(const char *lp, size_t trials, uint64_t seed, char **out);

// Allowed vertices, one per line, sorted.
//
// # Safety
// `p` must be a live handle; `out` writable.
enum FvxStatus fvx_enumerate(const struct FvxProblem *p, char **out);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void fvx_string_free(char *s);

// Message for the last failure on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *fvx_last_error(void);

// Library version, static.
const char *fvx_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FVX_H */
