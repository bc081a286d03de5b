/* Generated by cbindgen; do not edit. */

#ifndef MULTL1_H
#define MULTL1_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Multl1Status {
  MULTL1_STATUS_OK = 0,
  MULTL1_STATUS_NULL_POINTER = 1,
  MULTL1_STATUS_DOMAIN = 2,
  MULTL1_STATUS_RESOURCE = 3,
  MULTL1_STATUS_RESOLUTION = 4,
  MULTL1_STATUS_PARSE = 5,
  MULTL1_STATUS_IO = 6,
  MULTL1_STATUS_INVALID_UTF8 = 7,
  MULTL1_STATUS_PANIC = 8,
} Multl1Status;

// Multiplicative function tabulated on prime powers up to its limit.
typedef struct Multl1Function Multl1Function;

// Exponential sum S(j/M), j = 0..M, of a coefficient vector of length N.
typedef struct Multl1Grid Multl1Grid;

// Smallest-prime-factor table.
typedef struct Multl1Sieve Multl1Sieve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *multl1_version(void);

// Copies the calling thread's last error message into `buf` (truncated, always
// NUL-terminated when `len > 0`) and returns the full message length in bytes.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t multl1_last_error(char *buf, size_t len);

// # Safety
// `out` must be null or valid for a pointer write.
enum Multl1Status multl1_sieve_new(uint64_t limit, struct Multl1Sieve **out);

// # Safety
// `sieve` must be null or a handle from `multl1_sieve_new` not yet freed.
void multl1_sieve_free(struct Multl1Sieve *sieve);

// Smallest prime factor of `n` (2 ≤ n ≤ limit).
//
// # Safety
// Pointers must be null or valid.
enum Multl1Status multl1_sieve_spf(const struct Multl1Sieve *sieve, uint64_t n, uint64_t *out);

// Parses a function specification such as `"pretend:5:100:42*twist:0.5"` and tabulates it
// on [1, limit].
//
// # Safety
// `spec` must be null or a NUL-terminated string; other pointers null or valid.
enum Multl1Status multl1_function_parse(const char *spec,
                                        const struct Multl1Sieve *sieve,
                                        uint64_t limit,
                                        struct Multl1Function **out);

// # Safety
// `f` must be null or a handle from `multl1_function_parse` not yet freed.
void multl1_function_free(struct Multl1Function *f);

// f(n) as (re, im).
//
// # Safety
// Pointers must be null or valid.
enum Multl1Status multl1_function_eval(const struct Multl1Function *f,
                                       const struct Multl1Sieve *sieve,
                                       uint64_t n,
                                       double *re,
                                       double *im);

// Grid of S(α) = Σ_{n≤N} f(n) W(n/N) e(nα) with M = oversample·N rounded up to a power of
// two (at most 2^26 points). `eps ≤ 0` means no window; otherwise a plateau window with that parameter.
//
// # Safety
// Pointers must be null or valid.
enum Multl1Status multl1_grid_new(const struct Multl1Function *f,
                                  const struct Multl1Sieve *sieve,
                                  uint64_t n,
                                  uint64_t oversample,
                                  double eps,
                                  struct Multl1Grid **out);

// # Safety
// `grid` must be null or a handle from `multl1_grid_new` not yet freed.
void multl1_grid_free(struct Multl1Grid *grid);

// Coefficient count N and grid size M.
//
// # Safety
// Pointers must be null or valid.
enum Multl1Status multl1_grid_size(const struct Multl1Grid *grid, uint64_t *n, uint64_t *m);

// ‖S‖_p over the circle with a rigorous bound on the discretization error.
//
// # Safety
// Pointers must be null or valid.
enum Multl1Status multl1_lp_norm(const struct Multl1Grid *grid,
                                 double p,
                                 double *value,
                                 double *error_bound);

// Energy of S on the major arcs of level Q and on their complement.
//
// # Safety
// Pointers must be null or valid.
enum Multl1Status multl1_arcs_energy(const struct Multl1Grid *grid,
                                     uint64_t q,
                                     double *major,
                                     double *minor,
                                     double *error_bound);

// Gauss sum of the `index`-th character mod q (same enumeration as `char:q:index`), which
// must be primitive.
//
// # Safety
// Pointers must be null or valid.
enum Multl1Status multl1_gauss_sum(uint64_t q, uint64_t index, double *re, double *im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MULTL1_H */
