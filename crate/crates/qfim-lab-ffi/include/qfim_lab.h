/* C interface of qfim-lab: quantum Fisher information, Cramér–Rao bounds and correlation measures of a dephasing two-qubit system. */

#ifndef QFIM_LAB_H
#define QFIM_LAB_H

/* Generated by cbindgen from qfim-lab-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of doubles written by `qfim_lab_evolved_state`
 * (4x4 complex, row-major, interleaved re/im).
 */
#define QFIM_LAB_STATE_LEN 32

/**
 * Number of doubles written by `qfim_lab_correlations`.
 */
#define QFIM_LAB_CORRELATIONS_LEN 9

/**
 * Which encoded parameter a QFI refers to.
 */
typedef enum QfimLabParam {
  QFIM_LAB_PARAM_P = 0,
  QFIM_LAB_PARAM_R = 1,
} QfimLabParam;

/**
 * Status codes returned by every fallible call.
 */
typedef enum QfimLabStatus {
  /**
   * Success.
   */
  QFIM_LAB_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  QFIM_LAB_STATUS_NULL_POINTER = 1,
  /**
   * The configuration JSON failed to parse or validate.
   */
  QFIM_LAB_STATUS_INVALID_CONFIG = 2,
  /**
   * The quantity is undefined at the requested parameter point
   * (boundary p, pure state for the mixedness QFI, singular QFIM, ...).
   */
  QFIM_LAB_STATUS_UNDEFINED = 3,
  /**
   * A numerical routine failed.
   */
  QFIM_LAB_STATUS_NUMERICAL = 4,
} QfimLabStatus;

/**
 * Opaque model configuration handle.
 */
typedef struct QfimLabConfig QfimLabConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a configuration from JSON (same schema as the CLI) into an opaque
 * handle. On success writes the handle to `out`; free it with
 * `qfim_lab_config_free`.
 *
 * # Safety
 * `json` must point to a NUL-terminated string and `out` to a writable
 * pointer slot.
 */
enum QfimLabStatus qfim_lab_config_parse(const char *json, struct QfimLabConfig **out);

/**
 * Release a configuration handle. Null is a no-op.
 *
 * # Safety
 * `cfg` must be a pointer previously returned by `qfim_lab_config_parse`
 * and not yet freed.
 */
void qfim_lab_config_free(struct QfimLabConfig *cfg);

/**
 * Evolved 4x4 density matrix at time `t`, written row-major as
 * interleaved re/im pairs (`QFIM_LAB_STATE_LEN` doubles).
 *
 * # Safety
 * `out` must point to at least `QFIM_LAB_STATE_LEN` doubles.
 */
enum QfimLabStatus qfim_lab_evolved_state(const struct QfimLabConfig *cfg, double t, double *out);

/**
 * Closed-form quantum Fisher information for one parameter.
 *
 * # Safety
 * `out` must point to a writable double.
 */
enum QfimLabStatus qfim_lab_qfi(const struct QfimLabConfig *cfg,
                                enum QfimLabParam param,
                                double t,
                                double *out);

/**
 * QFI matrix entries `[F_pp, F_rr, F_pr]`.
 *
 * # Safety
 * `out` must point to at least 3 doubles.
 */
enum QfimLabStatus qfim_lab_qfim(const struct QfimLabConfig *cfg, double t, double *out);

/**
 * Cramér–Rao bounds `[delta_p_indep, delta_r_indep, delta_p_simul,
 * delta_r_simul, delta_min]`.
 *
 * # Safety
 * `out` must point to at least 5 doubles.
 */
enum QfimLabStatus qfim_lab_crb(const struct QfimLabConfig *cfg, double t, double *out);

/**
 * Correlation report `[ip, lqu, w1, w2, coherence_l1, purity,
 * fidelity_closed, fidelity_uhlmann, trace_distance]`
 * (`QFIM_LAB_CORRELATIONS_LEN` doubles); fidelities and trace distance
 * are taken against the initial state.
 *
 * # Safety
 * `out` must point to at least `QFIM_LAB_CORRELATIONS_LEN` doubles.
 */
enum QfimLabStatus qfim_lab_correlations(const struct QfimLabConfig *cfg, double t, double *out);

/**
 * Revival period of a uniform spin environment; `Undefined` for bosonic
 * or heterogeneous-spin configurations.
 *
 * # Safety
 * `out` must point to a writable double.
 */
enum QfimLabStatus qfim_lab_predicted_period(const struct QfimLabConfig *cfg, double *out);

/**
 * Static description of a status code.
 */
const char *qfim_lab_status_message(enum QfimLabStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFIM_LAB_H */
