#ifndef KRAUSLAB_H
#define KRAUSLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum KlStatus {
  KL_STATUS_OK = 0,
  KL_STATUS_NULL_POINTER = 1,
  KL_STATUS_INVALID_ARGUMENT = 2,
  KL_STATUS_DIMENSION_MISMATCH = 3,
  KL_STATUS_INVALID_STATE = 4,
  KL_STATUS_NOT_HERMITIAN = 5,
  KL_STATUS_NOT_UNITARY = 6,
  KL_STATUS_NO_CONVERGENCE = 7,
  KL_STATUS_COMPLETENESS = 8,
  KL_STATUS_NOT_FACTORABLE = 9,
  KL_STATUS_SERIALIZATION = 10,
  KL_STATUS_PANIC = 11,
} KlStatus;

/**
 * Opaque Kraus set.
 */
typedef struct KlKrausSet KlKrausSet;

/**
 * Opaque dense complex matrix.
 */
typedef struct KlMatrix KlMatrix;

/**
 * Opaque validated density matrix.
 */
typedef struct KlState KlState;

/**
 * Bloch coordinates of a qubit state.
 */
typedef struct KlBloch {
  double r;
  double theta;
  double phi;
} KlBloch;

/**
 * Residuals reported by `kl_kraus_verify`.
 */
typedef struct KlChannelReport {
  double completeness_residual;
  double reconstruction_residual;
  double choi_min_eigenvalue;
  double output_trace_residual;
  double output_min_eigenvalue;
} KlChannelReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on this thread.
 */
const char *kl_last_error_message(void);

/**
 * Default absolute tolerance used by the library.
 */
double kl_default_tolerance(void);

/**
 * Builds a `rows × cols` matrix from `2·rows·cols` interleaved doubles.
 */
enum KlStatus kl_matrix_new(size_t rows, size_t cols, const double *data, struct KlMatrix **out);

void kl_matrix_free(struct KlMatrix *m);

/**
 * Row count, or 0 for NULL.
 */
size_t kl_matrix_rows(const struct KlMatrix *m);

/**
 * Column count, or 0 for NULL.
 */
size_t kl_matrix_cols(const struct KlMatrix *m);

enum KlStatus kl_matrix_get(const struct KlMatrix *m,
                            size_t row,
                            size_t col,
                            double *re,
                            double *im);

/**
 * Copies the entries into `buf` as interleaved doubles; `len` is the
 * capacity of `buf` in doubles and must be at least `2·rows·cols`.
 */
enum KlStatus kl_matrix_copy_data(const struct KlMatrix *m, double *buf, size_t len);

enum KlStatus kl_state_from_bloch(struct KlBloch b, struct KlState **out);

/**
 * Validates `m` as a density matrix at tolerance `tol`.
 */
enum KlStatus kl_state_from_matrix(const struct KlMatrix *m, double tol, struct KlState **out);

void kl_state_free(struct KlState *s);

size_t kl_state_dim(const struct KlState *s);

/**
 * Copies the state's matrix into a new handle.
 */
enum KlStatus kl_state_matrix(const struct KlState *s, struct KlMatrix **out);

enum KlStatus kl_state_to_bloch(const struct KlState *s, struct KlBloch *out);

/**
 * Trace distance `½‖a − b‖₁`.
 */
enum KlStatus kl_state_trace_distance(const struct KlState *a,
                                      const struct KlState *b,
                                      double *out);

/**
 * Builds a set from `n` matrices (copied; the inputs stay owned by the caller).
 */
enum KlStatus kl_kraus_from_ops(const struct KlMatrix *const *ops,
                                size_t n,
                                struct KlKrausSet **out);

/**
 * Two operators taking qubit state `rho0` to `rhot`.
 */
enum KlStatus kl_kraus_general(const struct KlState *rho0,
                               const struct KlState *rhot,
                               struct KlKrausSet **out);

/**
 * Closed-form qubit operators from Bloch coordinates.
 */
enum KlStatus kl_kraus_closed_form(struct KlBloch b0, struct KlBloch bt, struct KlKrausSet **out);

/**
 * Replacement channel onto `rhot`, any dimension.
 */
enum KlStatus kl_kraus_measure_prepare(const struct KlState *rho0,
                                       const struct KlState *rhot,
                                       struct KlKrausSet **out);

/**
 * Closed-form Kraus pair of the two-qubit controlled-NOT example.
 */
enum KlStatus kl_kraus_cnot_analytic(double r0, double t, struct KlKrausSet **out);

void kl_kraus_free(struct KlKrausSet *k);

/**
 * Number of operators, or 0 for NULL.
 */
size_t kl_kraus_len(const struct KlKrausSet *k);

/**
 * Copies operator `index` into a new matrix handle.
 */
enum KlStatus kl_kraus_op(const struct KlKrausSet *k, size_t index, struct KlMatrix **out);

/**
 * `Σ M ρ M†`, after checking completeness at `tol`.
 */
enum KlStatus kl_kraus_apply(const struct KlKrausSet *k,
                             const struct KlState *rho,
                             double tol,
                             struct KlState **out);

enum KlStatus kl_kraus_verify(const struct KlKrausSet *k,
                              const struct KlState *rho0,
                              const struct KlState *rhot,
                              struct KlChannelReport *out);

/**
 * `M̃_μ = Σ_ν M_ν V_μν`.
 */
enum KlStatus kl_kraus_remix(const struct KlKrausSet *k,
                             const struct KlMatrix *v,
                             struct KlKrausSet **out);

/**
 * JSON encoding of the set; release with [`kl_string_free`].
 */
enum KlStatus kl_kraus_to_json(const struct KlKrausSet *k, char **out);

void kl_string_free(char *s);

/**
 * Controlled-NOT example at time `t`: numerically evolved reduced state and
 * inhomogeneous term δρ. Either output pointer may be NULL to skip it.
 */
enum KlStatus kl_cnot_evolve(double r0,
                             double t,
                             struct KlState **rho_t,
                             struct KlMatrix **delta_rho);

/**
 * Splits `u` as `U_i ⊗ U_e`. Returns `NotFactorable` (outputs untouched)
 * when no such split exists within `tol`.
 */
enum KlStatus kl_factor_local_unitary(const struct KlMatrix *u,
                                      size_t d_i,
                                      size_t d_e,
                                      double tol,
                                      struct KlMatrix **out_system,
                                      struct KlMatrix **out_environment);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KRAUSLAB_H */
