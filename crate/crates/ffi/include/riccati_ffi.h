/* Copyright 2026 riccati-qs Contributors */
/* SPDX-License-Identifier: Apache-2.0 */

#ifndef RICCATI_FFI_H
#define RICCATI_FFI_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call. `RQS_STATUS_OK` is zero.
 */
typedef enum RqsStatus {
  RQS_STATUS_OK = 0,
  RQS_STATUS_NULL_POINTER = 1,
  RQS_STATUS_INVALID_UTF8 = 2,
  RQS_STATUS_BUFFER_TOO_SMALL = 3,
  RQS_STATUS_CONFIG = 4,
  RQS_STATUS_INVALID_INPUT = 5,
  RQS_STATUS_SOLVER_FAILED = 6,
  RQS_STATUS_INVARIANT_VIOLATED = 7,
  RQS_STATUS_PANIC = 8,
} RqsStatus;

/**
 * A validated run configuration with its Hamiltonian, environment state and propagator.
 */
typedef struct RqsModel RqsModel;

/**
 * A Riccati solution `X` for a model.
 */
typedef struct RqsSolution RqsSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a JSON run configuration and builds a model.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RqsStatus rqs_model_from_json(const char *json, struct RqsModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from [`rqs_model_from_json`] and not be used afterwards.
 */
void rqs_model_free(struct RqsModel *model);

/**
 * Environment dimension `n_max + 1`, or 0 for a null model.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t rqs_model_dim(const struct RqsModel *model);

/**
 * Copies the model's Riccati solution into a new handle.
 * Fails with `RQS_STATUS_SOLVER_FAILED` when the model was built with direct evolution only.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum RqsStatus rqs_solve(const struct RqsModel *model, struct RqsSolution **out);

/**
 * Releases a solution. Null is ignored.
 *
 * # Safety
 * `sol` must come from [`rqs_solve`] and not be used afterwards.
 */
void rqs_solution_free(struct RqsSolution *sol);

/**
 * Dimension of `X`, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
size_t rqs_solution_dim(const struct RqsSolution *sol);

/**
 * Frobenius norm of the Riccati residual at `X`, or NaN for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
double rqs_solution_residual(const struct RqsSolution *sol);

/**
 * Writes `X` row-major as `2·d²` doubles.
 *
 * # Safety
 * `sol` must be a live handle and `out` must point to `len` writable doubles.
 */
enum RqsStatus rqs_solution_x(const struct RqsSolution *sol, double *out, size_t len);

/**
 * Reduced qubit state at time `t` from the configured initial state and environment,
 * written as 8 doubles (2×2, row-major, interleaved).
 *
 * # Safety
 * `model` must be a live handle and `out` must point to `len` writable doubles.
 */
enum RqsStatus rqs_reduced_state(const struct RqsModel *model, double t, double *out, size_t len);

/**
 * Choi matrix of the reduced channel at time `t`, written as 32 doubles
 * (4×4, row-major, interleaved, `choi[2i+k, 2j+l] = Φ(|i⟩⟨j|)[k, l]`).
 * `min_eigenvalue` and `tp_defect` may be null.
 *
 * # Safety
 * `model` must be a live handle, `out` must point to `len` writable doubles and
 * the optional outputs must be null or valid.
 */
enum RqsStatus rqs_channel(const struct RqsModel *model,
                           double t,
                           double *out,
                           size_t len,
                           double *min_eigenvalue,
                           double *tp_defect);

/**
 * Residuals of the parity operator in the scalar-coupling model
 * (`r11` symmetric form, `r12` quadratic form).
 *
 * # Safety
 * `r11` and `r12` must be valid pointers.
 */
enum RqsStatus rqs_counterexample(size_t n_max,
                                  double g_re,
                                  double g_im,
                                  double alpha,
                                  double *r11,
                                  double *r12);

/**
 * Seed recorded in the model's configuration.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
uint64_t rqs_model_seed(const struct RqsModel *model);

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *rqs_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rqs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RICCATI_FFI_H */
