#ifndef SFCAVAIL_H
#define SFCAVAIL_H

#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum SfcStatus {
  SFC_STATUS_OK = 0,
  // A required pointer argument was null.
  SFC_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  SFC_STATUS_INVALID_UTF8 = 2,
  // The configuration is unreadable or invalid.
  SFC_STATUS_CONFIG = 3,
  // The model rejected the arguments (bad redundancy vector, rates, ...).
  SFC_STATUS_MODEL = 4,
  // No configuration meets the availability target.
  SFC_STATUS_INFEASIBLE = 5,
  // A caller-provided buffer is too small or an index is out of range.
  SFC_STATUS_OUT_OF_RANGE = 6,
  // Internal failure; the handle involved should not be reused.
  SFC_STATUS_PANIC = 7,
} SfcStatus;

// A loaded chain with its availability target and memoized subsystem
// distributions.
typedef struct SfcChain SfcChain;

// Minimal-cost configurations returned by [`sfc_chain_optimize`].
typedef struct SfcOptimum SfcOptimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Loads a chain from a JSON configuration document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` valid for writes.
enum SfcStatus sfc_chain_from_json(const char *json, struct SfcChain **out);

// Loads a chain from a JSON configuration file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` valid for writes.
enum SfcStatus sfc_chain_from_file(const char *path, struct SfcChain **out);

// Releases a chain. Null is ignored.
//
// # Safety
// `chain` must come from this library and not be used afterwards.
void sfc_chain_free(struct SfcChain *chain);

// Number of subsystems, i.e. the length of every redundancy vector.
//
// # Safety
// `chain` must be a live handle and `out` valid for writes.
enum SfcStatus sfc_chain_subsystem_count(const struct SfcChain *chain, size_t *out);

// Availability target stored in the configuration.
//
// # Safety
// `chain` must be a live handle and `out` valid for writes.
enum SfcStatus sfc_chain_target(const struct SfcChain *chain, double *out);

// Steady-state availability of redundancy vector `l[0..len]`.
//
// # Safety
// `l` must point to `len` readable values and `out` be valid for writes.
enum SfcStatus sfc_chain_availability(const struct SfcChain *chain,
                                      const uint32_t *l,
                                      size_t len,
                                      double *out);

// Chain performance distribution as JSON
// (`{"dimension":K,"terms":[{"g":[..],"p":..},..]}`), written to `*out`.
//
// # Safety
// `l` must point to `len` readable values and `out` be valid for writes.
// The string must be released with [`sfc_string_free`].
enum SfcStatus sfc_chain_distribution_json(const struct SfcChain *chain,
                                           const uint32_t *l,
                                           size_t len,
                                           char **out);

// Exhaustive minimal-cost search. A non-positive `target` selects the
// configuration's own target. Returns [`SfcStatus::Infeasible`] (and a null
// handle) when no configuration qualifies.
//
// # Safety
// `chain` must be a live handle and `out` valid for writes.
enum SfcStatus sfc_chain_optimize(const struct SfcChain *chain,
                                  double target,
                                  struct SfcOptimum **out);

// Number of tied optima (at least one).
//
// # Safety
// `opt` must be a live handle and `out` valid for writes.
enum SfcStatus sfc_optimum_count(const struct SfcOptimum *opt, size_t *out);

// Cost shared by every optimum.
//
// # Safety
// `opt` must be a live handle and `out` valid for writes.
enum SfcStatus sfc_optimum_min_cost(const struct SfcOptimum *opt, double *out);

// Copies optimum `index` into `l[0..len]` and its availability into
// `*availability` (which may be null).
//
// # Safety
// `l` must be writable for `len` values.
enum SfcStatus sfc_optimum_get(const struct SfcOptimum *opt,
                               size_t index,
                               uint32_t *l,
                               size_t len,
                               double *availability);

// Releases an optimization result. Null is ignored.
//
// # Safety
// `opt` must come from this library and not be used afterwards.
void sfc_optimum_free(struct SfcOptimum *opt);

// Rate (per second) of `param` at which configuration `l` stops meeting
// `target`, all other rates nominal. `param` is one of `lambda_s`, `mu_s`,
// `lambda_v`, `mu_v`, `lambda_h`, `mu_h`.
//
// # Safety
// Pointer arguments must be valid as documented on the other functions.
enum SfcStatus sfc_chain_threshold(const struct SfcChain *chain,
                                   const uint32_t *l,
                                   size_t len,
                                   const char *param,
                                   double target,
                                   double *out);

// Monte Carlo availability estimate; warmup is 1% of `horizon` seconds.
// `std_error` may be null.
//
// # Safety
// Pointer arguments must be valid as documented on the other functions.
enum SfcStatus sfc_chain_simulate(const struct SfcChain *chain,
                                  const uint32_t *l,
                                  size_t len,
                                  double horizon,
                                  uint64_t seed,
                                  uint32_t replications,
                                  double *mean,
                                  double *std_error);

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next library call on the same thread.
const char *sfc_last_error(void);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void sfc_string_free(char *s);

// Library version as a static NUL-terminated string.
const char *sfc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SFCAVAIL_H */
