#ifndef RIEFFEL_DEFORM_H
#define RIEFFEL_DEFORM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RdStatus {
  RD_STATUS_OK = 0,
  RD_STATUS_NULL_POINTER = 1,
  RD_STATUS_DIMENSION_MISMATCH = 2,
  RD_STATUS_INVALID_SYMPLECTIC_FORM = 3,
  RD_STATUS_NOT_POSITIVE_DEFINITE = 4,
  RD_STATUS_INCOMPATIBLE = 5,
  RD_STATUS_INVALID_HBAR = 6,
  RD_STATUS_CUTOFF_TOO_SMALL = 7,
  RD_STATUS_INVALID_GRID = 8,
  RD_STATUS_INVALID_STATE = 9,
  RD_STATUS_SHAPE_MISMATCH = 10,
  RD_STATUS_INVALID_ARGUMENT = 11,
  RD_STATUS_IO = 12,
  RD_STATUS_INVALID_UTF8 = 13,
  RD_STATUS_PANIC = 14,
} RdStatus;

/**
 * Symplectic form, compatible metric and ℏ.
 */
typedef struct RdData RdData;

/**
 * Trigonometric polynomial on the torus.
 */
typedef struct RdElement RdElement;

/**
 * Classical state given by its moments.
 */
typedef struct RdState RdState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread (empty if none). The
 * pointer stays valid until the next failing call on the thread.
 */
const char *rd_last_error_message(void);

/**
 * Library version, NUL-terminated, static.
 */
const char *rd_version(void);

/**
 * The twist-sign convention string, NUL-terminated, static.
 */
const char *rd_twist_convention(void);

/**
 * Deformation data from row-major `2n×2n` matrices `theta` and `g`.
 *
 * # Safety
 * `theta` and `g` must point to `4n²` doubles; `out` must be writable.
 */
enum RdStatus rd_data_new(size_t n,
                          const double *theta,
                          const double *g,
                          double hbar,
                          struct RdData **out);

/**
 * Standard symplectic form and Euclidean metric on `R^{2n}`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RdStatus rd_data_standard(size_t n, double hbar, struct RdData **out);

/**
 * Copy of `data` with a different ℏ.
 *
 * # Safety
 * `data` must be a live handle; `out` must be writable.
 */
enum RdStatus rd_data_with_hbar(const struct RdData *data, double hbar, struct RdData **out);

/**
 * # Safety
 * `data` must be null or a handle from this library, freed at most once.
 */
void rd_data_free(struct RdData *data);

/**
 * The zero element of the torus algebra in half-dimension `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RdStatus rd_element_new(size_t n, struct RdElement **out);

/**
 * Adds `re + i·im` to the coefficient of the lattice point `k` (`2n` entries).
 *
 * # Safety
 * `el` must be a live handle and `k` must point to `rank` integers.
 */
enum RdStatus rd_element_add_term(struct RdElement *el,
                                  const int64_t *k,
                                  size_t rank,
                                  double re,
                                  double im);

/**
 * Parses the JSON form `{"dim": n, "terms": [{"k": [...], "re": x, "im": y}]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum RdStatus rd_element_from_json(const char *json, struct RdElement **out);

/**
 * JSON form of the element; release with [`rd_string_free`].
 *
 * # Safety
 * `el` must be a live handle; `out` must be writable.
 */
enum RdStatus rd_element_to_json(const struct RdElement *el, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed at most once.
 */
void rd_string_free(char *s);

/**
 * Number of nonzero coefficients.
 *
 * # Safety
 * `el` must be a live handle; `out` must be writable.
 */
enum RdStatus rd_element_len(const struct RdElement *el, size_t *out);

/**
 * Coefficient at the lattice point `k`.
 *
 * # Safety
 * `el` must be a live handle, `k` must point to `rank` integers and the
 * outputs must be writable.
 */
enum RdStatus rd_element_coeff(const struct RdElement *el,
                               const int64_t *k,
                               size_t rank,
                               double *re,
                               double *im);

/**
 * # Safety
 * `el` must be null or a handle from this library, freed at most once.
 */
void rd_element_free(struct RdElement *el);

/**
 * Evaluation at the point `x` of the torus (`len = 2n` angles).
 *
 * # Safety
 * `x` must point to `len` doubles; `out` must be writable.
 */
enum RdStatus rd_state_point(const double *x, size_t len, struct RdState **out);

/**
 * The Haar trace.
 *
 * # Safety
 * `out` must be writable.
 */
enum RdStatus rd_state_haar(struct RdState **out);

/**
 * # Safety
 * `state` must be null or a handle from this library, freed at most once.
 */
void rd_state_free(struct RdState *state);

/**
 * `a ⋆_ℏ b` as a new element.
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
enum RdStatus rd_star_product(const struct RdData *data,
                              const struct RdElement *a,
                              const struct RdElement *b,
                              struct RdElement **out);

/**
 * `S_ℏ a` as a new element.
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
enum RdStatus rd_smooth(const struct RdData *data,
                        const struct RdElement *a,
                        struct RdElement **out);

/**
 * `ω_ℏ(a) = ω(S_ℏ a)`.
 *
 * # Safety
 * All handles must be live; the outputs must be writable.
 */
enum RdStatus rd_deformed_evaluate(const struct RdState *state,
                                   const struct RdData *data,
                                   const struct RdElement *a,
                                   double *re,
                                   double *im);

/**
 * Bracket `lower ≤ ‖a‖_ℏ ≤ upper` from the compression to `{−N..N}^{2n}`.
 *
 * # Safety
 * All handles must be live; the outputs must be writable.
 */
enum RdStatus rd_norm_bracket(const struct RdData *data,
                              const struct RdElement *a,
                              size_t cutoff,
                              double *lower,
                              double *upper);

/**
 * The constant `c(ℏ)²` in `‖S_ℏ a‖² ≤ c(ℏ)² ‖a‖²_ℏ`.
 *
 * # Safety
 * `data` must be live; `out` must be writable.
 */
enum RdStatus rd_smoothing_norm_constant(const struct RdData *data, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIEFFEL_DEFORM_H */
