#ifndef NCOL_H
#define NCOL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum NcolStatus {
  NCOL_STATUS_OK = 0,
  NCOL_STATUS_NULL_POINTER = 1,
  NCOL_STATUS_INVALID_ARGUMENT = 2,
  NCOL_STATUS_PARSE_ERROR = 3,
  NCOL_STATUS_NOT_CENTRAL = 4,
  NCOL_STATUS_NO_CONVERGENCE = 5,
  NCOL_STATUS_INTEGRATION_FAILURE = 6,
  NCOL_STATUS_OUT_OF_RANGE = 7,
  NCOL_STATUS_NUMERIC_FAILURE = 8,
  NCOL_STATUS_PANIC = 99,
} NcolStatus;

/**
 * A verified central configuration.
 */
typedef struct NcolConfig NcolConfig;

/**
 * Stored states of a reduced collision run.
 */
typedef struct NcolTrajectory NcolTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *ncol_status_str(enum NcolStatus status);

/**
 * Symmetric collinear configuration with masses (m1, m2, m1).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NcolStatus ncol_config_collinear3(double m1, double m2, double alpha, struct NcolConfig **out);

/**
 * Regular N-gon with unit masses in dimension `dim`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NcolStatus ncol_config_ngon(uintptr_t n, double alpha, uintptr_t dim, struct NcolConfig **out);

/**
 * Parses and verifies a configuration JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum NcolStatus ncol_config_from_json(const char *json, struct NcolConfig **out);

/**
 * # Safety
 * `cfg` must come from an `ncol_config_*` constructor and not be used again.
 */
void ncol_config_free(struct NcolConfig *cfg);

/**
 * Potential level, centrality residual, body count and dimension.
 *
 * # Safety
 * `cfg` must be a live handle; out-pointers must be valid for writes.
 */
enum NcolStatus ncol_config_info(const struct NcolConfig *cfg,
                                 double *b,
                                 double *residual,
                                 uintptr_t *n,
                                 uintptr_t *dim);

/**
 * Copies the flattened positions into `buf` (length at least N·dim).
 *
 * # Safety
 * `cfg` must be a live handle; `buf` must hold `len` doubles.
 */
enum NcolStatus ncol_config_positions(const struct NcolConfig *cfg, double *buf, uintptr_t len);

/**
 * Smallest constrained Hessian eigenvalue, the criterion margin and
 * whether the margin is negative.
 *
 * # Safety
 * `cfg` must be a live handle; out-pointers must be valid for writes.
 */
enum NcolStatus ncol_spectral(const struct NcolConfig *cfg,
                              double *mu1,
                              double *margin,
                              bool *satisfied);

/**
 * Threshold exponent of the equal-mass collinear inequality.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NcolStatus ncol_collinear_threshold(double *out);

/**
 * Threshold exponent of the polygon inequality.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NcolStatus ncol_ngon_threshold(uintptr_t n, double *out);

/**
 * Homothetic collision at energy `h` from ρ = 1, integrated for `tau_max`
 * (stopping at ρ < `rho_min` when positive).
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be valid for writes.
 */
enum NcolStatus ncol_simulate_homothetic(const struct NcolConfig *cfg,
                                         double h,
                                         double tau_max,
                                         double rho_min,
                                         struct NcolTrajectory **out);

/**
 * # Safety
 * `traj` must be a live handle.
 */
enum NcolStatus ncol_trajectory_len(const struct NcolTrajectory *traj, uintptr_t *out);

/**
 * τ, ρ, ρ′ and λ1 of stored state `i`.
 *
 * # Safety
 * `traj` must be a live handle; out-pointers must be valid for writes.
 */
enum NcolStatus ncol_trajectory_state(const struct NcolTrajectory *traj,
                                      uintptr_t i,
                                      double *tau,
                                      double *rho,
                                      double *rho_prime,
                                      double *lambda1);

/**
 * # Safety
 * `traj` must come from `ncol_simulate_homothetic` and not be used again.
 */
void ncol_trajectory_free(struct NcolTrajectory *traj);

/**
 * Witness count of the default bump family (flat-top, width 20) along the
 * zero-energy homothetic collision, and the total Q.
 *
 * # Safety
 * `cfg` must be a live handle; out-pointers must be valid for writes.
 */
enum NcolStatus ncol_morse_witnesses(const struct NcolConfig *cfg,
                                     uintptr_t bumps,
                                     uintptr_t *witnesses,
                                     double *q);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCOL_H */
