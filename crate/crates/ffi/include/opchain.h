#ifndef OPCHAIN_H
#define OPCHAIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every entry point.
typedef enum OpchainStatus {
  OPCHAIN_STATUS_OK = 0,
  // A required pointer argument was null.
  OPCHAIN_STATUS_NULL = 1,
  // Input text was not valid UTF-8, JSON or a rational.
  OPCHAIN_STATUS_PARSE = 2,
  // The map is not orientation-preserving.
  OPCHAIN_STATUS_NOT_OP = 3,
  // A witness failed verification.
  OPCHAIN_STATUS_VERIFICATION = 4,
  // Any other rejected input (bad parameters, domain errors, ...).
  OPCHAIN_STATUS_INVALID = 5,
  // A panic was caught at the boundary.
  OPCHAIN_STATUS_PANIC = 6,
} OpchainStatus;

// Membership class reported by [`opchain_map_classify`].
typedef enum OpchainMembership {
  OPCHAIN_MEMBERSHIP_ORDER_PRESERVING = 0,
  OPCHAIN_MEMBERSHIP_ORIENTATION_ONLY = 1,
  OPCHAIN_MEMBERSHIP_NEITHER = 2,
} OpchainMembership;

// Opaque piecewise map.
typedef struct OpMap OpMap;

// Opaque factorization witness.
typedef struct OpWitness OpWitness;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null.
//
// The pointer stays valid until the next call into this library on the
// same thread. Do not free it.
const char *opchain_last_error_message(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a pointer obtained from this library that has not
// been freed yet.
void opchain_string_free(char *s);

// Parses a map from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum OpchainStatus opchain_map_from_json(const char *json, struct OpMap **out);

// Serializes a map to JSON. Free the result with [`opchain_string_free`].
//
// # Safety
// `map` must be a live handle and `out` a valid pointer.
enum OpchainStatus opchain_map_to_json(const struct OpMap *map, char **out);

// # Safety
// `map` must be null or a handle from this library not yet freed.
void opchain_map_free(struct OpMap *map);

// Evaluates `map` at the rational `x` (for example `"-3/4"`). The value
// is written as a string; free it with [`opchain_string_free`].
//
// # Safety
// `map` must be a live handle, `x` NUL-terminated and `out` valid.
enum OpchainStatus opchain_map_evaluate(const struct OpMap *map, const char *x, char **out);

// Composes left to right: the result sends x to `second(first(x))`.
//
// # Safety
// Both handles must be live and `out` valid.
enum OpchainStatus opchain_map_compose(const struct OpMap *first,
                                       const struct OpMap *second,
                                       struct OpMap **out);

// # Safety
// `map` must be a live handle and `out` valid.
enum OpchainStatus opchain_map_classify(const struct OpMap *map, enum OpchainMembership *out);

// Builds the distinguished generator for a chain model given as JSON.
// `params_json` may be null to use the default parameters.
//
// # Safety
// `model_json` must be NUL-terminated, `params_json` null or
// NUL-terminated, and `out` valid.
enum OpchainStatus opchain_generator(const char *model_json,
                                     const char *params_json,
                                     struct OpMap **out);

// Factors `map` into order-preserving maps and generators.
// `params_json` may be null to use the default parameters.
//
// # Safety
// `map` must be a live handle, `params_json` null or NUL-terminated, and
// `out` valid.
enum OpchainStatus opchain_factorize(const struct OpMap *map,
                                     const char *params_json,
                                     struct OpWitness **out);

// # Safety
// `json` must be NUL-terminated and `out` valid.
enum OpchainStatus opchain_witness_from_json(const char *json, struct OpWitness **out);

// Serializes a witness. Free the result with [`opchain_string_free`].
//
// # Safety
// `w` must be a live handle and `out` valid.
enum OpchainStatus opchain_witness_to_json(const struct OpWitness *w, char **out);

// Re-checks a witness on `samples` points drawn with `seed`. A witness
// that fails sets `*passed` to false and returns `Verification`.
//
// # Safety
// `w` must be a live handle and `passed` valid.
enum OpchainStatus opchain_witness_verify(const struct OpWitness *w,
                                          size_t samples,
                                          uint64_t seed,
                                          bool *passed);

// # Safety
// `w` must be a live handle and `out` valid.
enum OpchainStatus opchain_witness_factor_count(const struct OpWitness *w, size_t *out);

// # Safety
// `w` must be a live handle and `out` valid.
enum OpchainStatus opchain_witness_generator_count(const struct OpWitness *w, size_t *out);

// # Safety
// `w` must be null or a handle from this library not yet freed.
void opchain_witness_free(struct OpWitness *w);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPCHAIN_H */
