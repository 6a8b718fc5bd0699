#ifndef BQF_SIEVE_H
#define BQF_SIEVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BqfStatus {
  BQF_STATUS_OK = 0,
  BQF_STATUS_INVALID_FORM = 1,
  BQF_STATUS_NOT_DISCRIMINANT = 2,
  BQF_STATUS_NOT_SQUAREFREE = 3,
  BQF_STATUS_INVALID_ARGUMENT = 4,
  BQF_STATUS_VACUOUS_BOUND = 5,
  BQF_STATUS_NULL_POINTER = 6,
  BQF_STATUS_PANIC = 7,
} BqfStatus;

/**
 * Opaque list of reduced primitive forms of one discriminant.
 */
typedef struct BqfClassSet BqfClassSet;

typedef struct BqfForm {
  int64_t a;
  int64_t b;
  int64_t c;
} BqfForm;

typedef struct BqfLValues {
  double l1;
  double l1_prime;
  double error_bound;
} BqfLValues;

typedef struct BqfSieveSummary {
  double z;
  double j;
  double main;
  double upper_bound;
  double upper_bound_true;
  uint64_t exact_interval_count;
} BqfSieveSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread. Valid until the next call
 * into this library from the same thread.
 */
const char *bqf_last_error(void);

/**
 * Kronecker symbol `(m / n)`.
 *
 * # Safety
 * `out` must be valid for a write of one `int32_t`.
 */
enum BqfStatus bqf_kronecker(int64_t m, int64_t n, int32_t *out);

/**
 * The reduced form properly equivalent to `f`.
 *
 * # Safety
 * `out` must be valid for a write of one `BqfForm`.
 */
enum BqfStatus bqf_reduce(struct BqfForm f, struct BqfForm *out);

/**
 * Enumerates the reduced primitive forms of discriminant `-d`. Free the
 * handle with [`bqf_class_set_free`].
 *
 * # Safety
 * `out` must be valid for a write of one pointer.
 */
enum BqfStatus bqf_class_set_new(uint64_t d, struct BqfClassSet **out);

/**
 * Class number `h`; 0 for a null handle.
 *
 * # Safety
 * `set` must be null or a live handle from [`bqf_class_set_new`].
 */
size_t bqf_class_set_len(const struct BqfClassSet *set);

/**
 * Number of units `w`; 0 for a null handle.
 *
 * # Safety
 * `set` must be null or a live handle from [`bqf_class_set_new`].
 */
uint32_t bqf_class_set_w(const struct BqfClassSet *set);

/**
 * The `index`-th form in lexicographic order.
 *
 * # Safety
 * `set` must be a live handle and `out` valid for one `BqfForm`.
 */
enum BqfStatus bqf_class_set_get(const struct BqfClassSet *set, size_t index, struct BqfForm *out);

/**
 * # Safety
 * `set` must be null or a handle from [`bqf_class_set_new`] not yet freed.
 */
void bqf_class_set_free(struct BqfClassSet *set);

/**
 * Number of `(u, v)` with `f(u, v) = n`.
 *
 * # Safety
 * `out` must be valid for a write of one `uint64_t`.
 */
enum BqfStatus bqf_r_f(struct BqfForm f, uint64_t n, uint64_t *out);

/**
 * Lattice points with `f(u, v) <= x`, origin included.
 *
 * # Safety
 * `out` must be valid for a write of one `uint64_t`.
 */
enum BqfStatus bqf_count_a(struct BqfForm f, double x, uint64_t *out);

/**
 * Primes `p <= x` represented by `f`.
 *
 * # Safety
 * `out` must be valid for a write of one `uint64_t`.
 */
enum BqfStatus bqf_pi_f(struct BqfForm f, double x, uint64_t *out);

/**
 * `L(1, chi)` and `L'(1, chi)` for `chi = (-d / .)`.
 *
 * # Safety
 * `out` must be valid for a write of one `BqfLValues`.
 */
enum BqfStatus bqf_l_values(uint64_t d, struct BqfLValues *out);

/**
 * Selberg upper bound for `x - y < f <= x`. Pass `z <= 0` for the default
 * sifting variable.
 *
 * # Safety
 * `out` must be valid for a write of one `BqfSieveSummary`.
 */
enum BqfStatus bqf_selberg(struct BqfForm f,
                           double x,
                           double y,
                           double z,
                           double phi,
                           double epsilon,
                           struct BqfSieveSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BQF_SIEVE_H */
