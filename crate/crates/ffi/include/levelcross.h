#ifndef LEVELCROSS_H
#define LEVELCROSS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  LC_STATUS_OK = 0,
  LC_STATUS_INVALID_INPUT = 1,
  LC_STATUS_SCHEMA = 2,
  LC_STATUS_DIMENSION_MISMATCH = 3,
  LC_STATUS_UNSUPPORTED_DIMENSION = 4,
  LC_STATUS_EMPTY_INPUT = 5,
  LC_STATUS_INFEASIBLE_ENUMERATION = 6,
  LC_STATUS_THEOREM_VIOLATION = 7,
  LC_STATUS_IO = 8,
  LC_STATUS_NULL_POINTER = 9,
  LC_STATUS_PANIC = 10,
} LcStatus;

/**
 * A cell labeling of `[k]^n` with values in `Z^d`.
 */
typedef struct LcLabeling LcLabeling;

/**
 * A crossing witness of any of the three kinds.
 */
typedef struct LcWitness LcWitness;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *lc_last_error(void);

/**
 * Parses a labeling document.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out_labeling` a valid pointer.
 */
LcStatus lc_labeling_parse(const char *json, LcLabeling **out_labeling);

/**
 * A uniformly random coloring of `[k]^n` with colors `1..=n`.
 *
 * # Safety
 * `out_labeling` must be a valid pointer.
 */
LcStatus lc_labeling_random(size_t n, size_t k, uint64_t seed, LcLabeling **out_labeling);

/**
 * Writes the grid dimension, side length and value dimension.
 *
 * # Safety
 * All pointers must be valid.
 */
LcStatus lc_labeling_shape(const LcLabeling *labeling, size_t *n, size_t *k, size_t *d);

/**
 * # Safety
 * `labeling` must come from this library and not be freed twice.
 */
void lc_labeling_free(LcLabeling *labeling);

/**
 * Color of the lattice point `t[0..n]` in the clustered coloring at distance `m`.
 *
 * # Safety
 * `t` must point to `n` readable values and `out_color` must be valid.
 */
LcStatus lc_color(const int64_t *t, size_t n, int64_t m, size_t *out_color);

/**
 * Finds a monochromatic crossing of a one-dimensional labeling.
 *
 * # Safety
 * `labeling` and `out_witness` must be valid pointers.
 */
LcStatus lc_find_crossing(const LcLabeling *labeling, LcWitness **out_witness);

/**
 * Solves a `Z^(n-1)`-valued labeling for a connected value set.
 *
 * # Safety
 * `labeling` and `out_witness` must be valid pointers.
 */
LcStatus lc_solve_discrete(const LcLabeling *labeling,
                           size_t m,
                           bool shrink,
                           LcWitness **out_witness);

/**
 * Approximate level crossing of a registry function at tolerance `epsilon`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out_witness` valid.
 */
LcStatus lc_levelset(const char *name, size_t n, double epsilon, LcWitness **out_witness);

/**
 * 1-based axis the witness crosses, or 0 for a null handle.
 *
 * # Safety
 * `witness` must be null or a live handle.
 */
size_t lc_witness_axis(const LcWitness *witness);

/**
 * Number of cells in the witness, or 0 for a null handle.
 *
 * # Safety
 * `witness` must be null or a live handle.
 */
size_t lc_witness_cell_count(const LcWitness *witness);

/**
 * Serializes the witness. Release the string with [`lc_string_free`].
 *
 * # Safety
 * `witness` and `out_json` must be valid pointers.
 */
LcStatus lc_witness_to_json(const LcWitness *witness, char **out_json);

/**
 * # Safety
 * `witness` must come from this library and not be freed twice.
 */
void lc_witness_free(LcWitness *witness);

/**
 * # Safety
 * `s` must be a string returned by this library and not be freed twice.
 */
void lc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVELCROSS_H */
