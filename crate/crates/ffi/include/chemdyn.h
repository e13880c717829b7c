#ifndef CHEMDYN_H
#define CHEMDYN_H

/* Generated by build.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ChemdynStatus {
  CHEMDYN_STATUS_OK = 0,
  CHEMDYN_STATUS_NULL_POINTER = 1,
  CHEMDYN_STATUS_INVALID_ARGUMENT = 2,
  CHEMDYN_STATUS_PARSE = 3,
  CHEMDYN_STATUS_UNKNOWN_ID = 4,
  CHEMDYN_STATUS_NOT_CHEMICAL = 5,
  CHEMDYN_STATUS_RANK_COLLAPSE = 6,
  CHEMDYN_STATUS_DIMENSION = 7,
  CHEMDYN_STATUS_IO = 8,
  // The run stopped before `t_end`; the partial result is still returned.
  CHEMDYN_STATUS_DIVERGED = 9,
  CHEMDYN_STATUS_PANIC = 10,
} ChemdynStatus;

// Finite-time Lyapunov exponents, one row per window.
typedef struct ChemdynLce ChemdynLce;

// A polynomial system.
typedef struct ChemdynSystem ChemdynSystem;

// Sampled solution of a system.
typedef struct ChemdynTrajectory ChemdynTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty if none. Valid
// until the next failing call on the same thread.
const char *chemdyn_last_error(void);

// Free a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void chemdyn_string_free(char *s);

// Instantiate a catalog entry. `eps` and `mu` (decimal or `p/q`) may be
// null to take the entry's defaults.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be writable.
enum ChemdynStatus chemdyn_system_from_catalog(const char *id,
                                               const char *eps,
                                               const char *mu,
                                               struct ChemdynSystem **out);

// Parse a system file (JSON text).
//
// # Safety
// `json` must be NUL-terminated; `out` must be writable.
enum ChemdynStatus chemdyn_system_from_json(const char *json, struct ChemdynSystem **out);

// # Safety
// `s` must be null or a live handle.
void chemdyn_system_free(struct ChemdynSystem *s);

// Number of variables, or 0 for a null handle.
//
// # Safety
// `s` must be null or a live handle.
uintptr_t chemdyn_system_dim(const struct ChemdynSystem *s);

// System file text. Free with `chemdyn_string_free`.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum ChemdynStatus chemdyn_system_to_json(const struct ChemdynSystem *s, char **out);

// Complexity label such as `(10,3)`. Free with `chemdyn_string_free`.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum ChemdynStatus chemdyn_system_complexity(const struct ChemdynSystem *s, char **out);

// Sets `*chemical` to 1 or 0.
//
// # Safety
// `s` must be a live handle; `chemical` must be writable.
enum ChemdynStatus chemdyn_system_is_chemical(const struct ChemdynSystem *s, int *chemical);

// Vector field at `x` (length `n`) into `f` (length `n`).
//
// # Safety
// `x` and `f` must point to `n` doubles.
enum ChemdynStatus chemdyn_system_evaluate(const struct ChemdynSystem *s,
                                           const double *x,
                                           uintptr_t n,
                                           double *f);

// Canonical reaction network (fused when `fused` is nonzero) in text form.
// Fails with `NOT_CHEMICAL` for non-chemical systems.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum ChemdynStatus chemdyn_system_crn(const struct ChemdynSystem *s, int fused, char **out);

// Integrate from `x0` over `[0, t_end]` with `samples` equally spaced
// outputs. Non-positive `rtol`/`atol` select the defaults. On `DIVERGED`
// `*out` still holds the samples up to the stop.
//
// # Safety
// `x0` must point to `n` doubles; `out` must be writable.
enum ChemdynStatus chemdyn_simulate(const struct ChemdynSystem *s,
                                    const double *x0,
                                    uintptr_t n,
                                    double t_end,
                                    uintptr_t samples,
                                    double rtol,
                                    double atol,
                                    struct ChemdynTrajectory **out);

// # Safety
// `t` must be null or a live handle.
void chemdyn_trajectory_free(struct ChemdynTrajectory *t);

// Number of samples.
//
// # Safety
// `t` must be null or a live handle.
uintptr_t chemdyn_trajectory_len(const struct ChemdynTrajectory *t);

// Sample `k`: its time into `*time` and its state into `x` (length `n`).
//
// # Safety
// `time` must be writable and `x` must point to `n` doubles.
enum ChemdynStatus chemdyn_trajectory_sample(const struct ChemdynTrajectory *t,
                                             uintptr_t k,
                                             double *time,
                                             double *x,
                                             uintptr_t n);

// Lyapunov exponents by repeated QR over windows of length `tau`
// (non-positive selects the default). Rows hold the exponents in
// descending order.
//
// # Safety
// `x0` must point to `n` doubles; `out` must be writable.
enum ChemdynStatus chemdyn_lce(const struct ChemdynSystem *s,
                               const double *x0,
                               uintptr_t n,
                               double t_end,
                               double tau,
                               struct ChemdynLce **out);

// # Safety
// `l` must be null or a live handle.
void chemdyn_lce_free(struct ChemdynLce *l);

// Number of windows.
//
// # Safety
// `l` must be null or a live handle.
uintptr_t chemdyn_lce_len(const struct ChemdynLce *l);

// Window `k`: its end time into `*time` and the exponents into `lambdas`.
//
// # Safety
// `time` must be writable and `lambdas` must point to `n` doubles.
enum ChemdynStatus chemdyn_lce_row(const struct ChemdynLce *l,
                                   uintptr_t k,
                                   double *time,
                                   double *lambdas,
                                   uintptr_t n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHEMDYN_H */
