#ifndef AFREE_H
#define AFREE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AfreeStatus {
  AFREE_STATUS_OK = 0,
  AFREE_STATUS_NULL_POINTER = 1,
  AFREE_STATUS_INVALID_ARGUMENT = 2,
  AFREE_STATUS_NOT_SQUAREFREE = 3,
  AFREE_STATUS_UNSUPPORTED_FIELD = 4,
  AFREE_STATUS_FIELD_MISMATCH = 5,
  AFREE_STATUS_BOUND_TOO_SMALL = 6,
  AFREE_STATUS_TOO_LARGE = 7,
  AFREE_STATUS_DUPLICATE_MEMBERS = 8,
  AFREE_STATUS_OVERFLOW = 9,
  AFREE_STATUS_PARSE = 10,
  AFREE_STATUS_IO = 11,
  AFREE_STATUS_PANIC = 12,
} AfreeStatus;

/**
 * Exact ideal counts up to a bound.
 */
typedef struct AfreeCounter AfreeCounter;

/**
 * A family of ideals.
 */
typedef struct AfreeFamily AfreeFamily;

/**
 * A number field (`Q` or `Q(sqrt m)`).
 */
typedef struct AfreeField AfreeField;

/**
 * One factor `P^e` of an ideal, with `P` the prime above `p` of the given
 * conjugate index.
 */
typedef struct AfreePrimePower {
  uint64_t p;
  uint8_t conjugate_index;
  uint32_t exponent;
} AfreePrimePower;

/**
 * Density estimates from one profile pass.
 */
typedef struct AfreeProfile {
  double natural;
  double logarithmic;
  double lower_natural;
  double upper_natural;
  double lower_log;
  double upper_log;
} AfreeProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *afree_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void afree_string_free(char *s);

/**
 * Parses `"Q"`, `"Q(sqrt m)"` or `"Q(sqrt(m))"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AfreeStatus afree_field_parse(const char *name, struct AfreeField **out);

/**
 * `Q(sqrt m)` for squarefree `m`, or `Q` when `m == 1`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AfreeStatus afree_field_new(int64_t m, struct AfreeField **out);

/**
 * # Safety
 * `field` must come from this library and not have been freed.
 */
void afree_field_free(struct AfreeField *field);

/**
 * # Safety
 * Pointers must be valid.
 */
enum AfreeStatus afree_field_degree(const struct AfreeField *field, uint32_t *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum AfreeStatus afree_field_discriminant(const struct AfreeField *field, int64_t *out);

/**
 * Class number of an imaginary quadratic field.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AfreeStatus afree_field_class_number(const struct AfreeField *field, uint64_t *out);

/**
 * Residue of the Dedekind zeta function at 1, when known in closed form.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AfreeStatus afree_field_residue(const struct AfreeField *field, double *out);

/**
 * Builds exact counts `H(x)` for `x <= bound`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AfreeStatus afree_counter_new(const struct AfreeField *field,
                                   uint64_t bound,
                                   struct AfreeCounter **out);

/**
 * # Safety
 * `counter` must come from this library and not have been freed.
 */
void afree_counter_free(struct AfreeCounter *counter);

/**
 * `H(x)`, the number of ideals of norm at most `x`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AfreeStatus afree_counter_count(const struct AfreeCounter *counter, uint64_t x, uint64_t *out);

/**
 * Truncated Dedekind zeta value with its tail bound.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AfreeStatus afree_dedekind_zeta(const struct AfreeField *field,
                                     double s,
                                     uint64_t truncation,
                                     double *value,
                                     double *tail_bound);

/**
 * Partial Euler product up to `cutoff` divided by `log cutoff`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AfreeStatus afree_mertens_ratio(const struct AfreeField *field, uint64_t cutoff, double *out);

/**
 * Parses a family document (`{"field": ..., "kind": ..., ...}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AfreeStatus afree_family_parse(const char *json, struct AfreeFamily **out);

/**
 * The family of all `P^l` with `P` prime.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AfreeStatus afree_family_prime_powers(const struct AfreeField *field,
                                           uint32_t l,
                                           struct AfreeFamily **out);

/**
 * # Safety
 * `family` must come from this library and not have been freed.
 */
void afree_family_free(struct AfreeFamily *family);

/**
 * Whether the ideal `prod P^e` is a multiple of some member.
 *
 * # Safety
 * `factors` must point to `len` readable entries (or be NULL with
 * `len == 0`); other pointers must be valid.
 */
enum AfreeStatus afree_family_is_multiple(const struct AfreeFamily *family,
                                          const struct AfreePrimePower *factors,
                                          size_t len,
                                          bool *out);

/**
 * Exact density of the multiples of the family (or of its first `r_max`
 * members for infinite families) as a newly allocated `"p/q"` string.
 *
 * # Safety
 * Pointers must be valid. Free the result with [`afree_string_free`].
 */
enum AfreeStatus afree_family_density(const struct AfreeFamily *family,
                                      size_t r_max,
                                      double *value,
                                      char **exact);

/**
 * Natural and logarithmic density estimates of the multiples up to norm
 * `max_norm`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum AfreeStatus afree_family_profile(const struct AfreeFamily *family,
                                      uint64_t max_norm,
                                      size_t samples,
                                      struct AfreeProfile *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AFREE_H */
