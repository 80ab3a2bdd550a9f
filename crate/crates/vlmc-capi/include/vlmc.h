/* C interface to the vlmc library. See the crate docs for conventions. */

#ifndef VLMC_H
#define VLMC_H

/* Generated by cbindgen from vlmc-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum VlmcStatus {
  VlmcStatus_Ok = 0,
  // A required pointer argument was NULL.
  VlmcStatus_NullPointer = 1,
  // A string argument was not valid UTF-8.
  VlmcStatus_InvalidUtf8 = 2,
  // Malformed input text (tree/sample/config formats).
  VlmcStatus_ParseError = 3,
  // Structurally valid input violating a model invariant.
  VlmcStatus_ValidationError = 4,
  // Arguments outside the supported domain (caps, empty windows,
  // inadmissible parameters).
  VlmcStatus_DomainError = 5,
  // Operating system I/O failure.
  VlmcStatus_IoError = 6,
  // An internal invariant failed; the handle is still usable.
  VlmcStatus_InternalError = 7,
} VlmcStatus;

// Opaque exact law of the hidden chain.
typedef struct VlmcChain VlmcChain;

// Opaque exact law of the observed (flipped) chain.
typedef struct VlmcPerturbed VlmcPerturbed;

// Opaque probabilistic context tree.
typedef struct VlmcTree VlmcTree;

// Scalar constants of a tree.
typedef struct VlmcTreeConstants {
  // Smallest transition probability.
  double alpha;
  // Summed continuity rate.
  double beta;
  // Product of (1 + beta_k).
  double beta_star;
  // 1 + 4*beta*beta_star/alpha.
  double c_const;
} VlmcTreeConstants;

// Report of the exhaustive conditional-gap certificate.
typedef struct VlmcGapCertificate {
  double epsilon;
  double max_gap;
  double bound;
  // 1 when max_gap <= bound (+1e-10), else 0.
  int32_t holds;
} VlmcGapCertificate;

// Report of the exhaustive floor checks.
typedef struct VlmcFloorReport {
  double alpha;
  double min_conditional;
  double max_flip_posterior;
  double posterior_bound;
  int32_t conditional_holds;
  int32_t posterior_holds;
} VlmcFloorReport;

// Inputs for the recovery error bound; mirror of the library struct.
typedef struct VlmcBoundParams {
  uint32_t d;
  uint32_t k;
  uint64_t n;
  double delta;
  double epsilon;
  double c_const;
  double beta;
  double signal_gap;
  double min_cylinder;
  uint32_t min_depth;
} VlmcBoundParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; valid until the
// next failing call from the same thread.
const char *vlmc_last_error(void);

// Releases a string returned through an out-pointer.
//
// # Safety
// `s` must have been returned by this library and not freed before.
void vlmc_string_free(char *s);

// Parses the tree file format (`<context> <p0> <p1>` lines, `#` comments).
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
enum VlmcStatus vlmc_tree_parse(const char *text, struct VlmcTree **out);

// # Safety
// `tree` must come from `vlmc_tree_parse` and not be freed twice.
void vlmc_tree_free(struct VlmcTree *tree);

// Height of the tree; 0 for a NULL handle.
//
// # Safety
// `tree` must be a live handle or NULL.
uint32_t vlmc_tree_height(const struct VlmcTree *tree);

// Number of contexts; 0 for a NULL handle.
//
// # Safety
// `tree` must be a live handle or NULL.
uint32_t vlmc_tree_num_contexts(const struct VlmcTree *tree);

// 1 when every past has a matching context, else 0.
//
// # Safety
// `tree` must be a live handle or NULL.
int32_t vlmc_tree_is_complete(const struct VlmcTree *tree);

// 1 when no context can be replaced by a proper suffix, else 0.
//
// # Safety
// `tree` must be a live handle or NULL.
int32_t vlmc_tree_is_irreducible(const struct VlmcTree *tree);

// Fills the scalar constants of the tree.
//
// # Safety
// Both pointers must be valid.
enum VlmcStatus vlmc_tree_constants(const struct VlmcTree *tree, struct VlmcTreeConstants *out);

// Continuity-rate entry `beta_k`; zero beyond the tree height.
//
// # Safety
// Both pointers must be valid.
enum VlmcStatus vlmc_tree_continuity_rate(const struct VlmcTree *tree, uint32_t k, double *out);

// Serializes the tree to its file format.
//
// # Safety
// Both pointers must be valid; free the result with `vlmc_string_free`.
enum VlmcStatus vlmc_tree_serialize(const struct VlmcTree *tree, char **out);

// Builds the exact law (embedding + stationary solve) of a complete tree.
//
// # Safety
// `tree` must be a live handle, `out` a valid pointer.
enum VlmcStatus vlmc_chain_new(const struct VlmcTree *tree, struct VlmcChain **out);

// # Safety
// `chain` must come from `vlmc_chain_new` and not be freed twice.
void vlmc_chain_free(struct VlmcChain *chain);

// Stationary cylinder probability `p(w)`.
//
// # Safety
// All pointers must be valid.
enum VlmcStatus vlmc_chain_marginal(const struct VlmcChain *chain, const char *w, double *out);

// Conditional `p(a|w)` for an arbitrary finite past.
//
// # Safety
// All pointers must be valid.
enum VlmcStatus vlmc_chain_conditional(const struct VlmcChain *chain,
                                       uint8_t symbol,
                                       const char *w,
                                       double *out);

// Detection gap `D_k`; +inf when no context is that short.
//
// # Safety
// All pointers must be valid.
enum VlmcStatus vlmc_chain_signal_gap(const struct VlmcChain *chain, uint32_t k, double *out);

// Draws a stationary path of length `len` into `buf` as 0/1 byte values.
//
// # Safety
// `buf` must point to at least `len` writable bytes.
enum VlmcStatus vlmc_chain_sample(const struct VlmcChain *chain,
                                  size_t len,
                                  uint64_t seed,
                                  uint8_t *buf);

// Flips each 0/1 byte of `buf` independently with probability `eps`,
// in place; deterministic for a given seed.
//
// # Safety
// `buf` must point to `len` bytes holding only 0 and 1 values.
enum VlmcStatus vlmc_perturb(uint8_t *buf, size_t len, double eps, uint64_t seed);

// Builds the observed-chain law for a chain and a flip probability.
//
// # Safety
// `chain` must be a live handle, `out` a valid pointer.
enum VlmcStatus vlmc_perturbed_new(const struct VlmcChain *chain,
                                   double eps,
                                   struct VlmcPerturbed **out);

// # Safety
// `law` must come from `vlmc_perturbed_new` and not be freed twice.
void vlmc_perturbed_free(struct VlmcPerturbed *law);

// Observed cylinder probability `q(w)`.
//
// # Safety
// All pointers must be valid.
enum VlmcStatus vlmc_perturbed_marginal(const struct VlmcPerturbed *law,
                                        const char *w,
                                        double *out);

// Observed conditional `q(a|w)`.
//
// # Safety
// All pointers must be valid.
enum VlmcStatus vlmc_perturbed_conditional(const struct VlmcPerturbed *law,
                                           uint8_t symbol,
                                           const char *w,
                                           double *out);

// Minimum positive cylinder probability over windows of length <= d.
//
// # Safety
// All pointers must be valid.
enum VlmcStatus vlmc_perturbed_min_cylinder(const struct VlmcPerturbed *law,
                                            uint32_t d,
                                            double *out);

// Exhaustive conditional-gap certificate up to window length `j_max`.
//
// # Safety
// All pointers must be valid.
enum VlmcStatus vlmc_perturbed_certify(const struct VlmcPerturbed *law,
                                       uint32_t j_max,
                                       struct VlmcGapCertificate *out);

// Exhaustive floor checks up to window length `k_max`.
//
// # Safety
// All pointers must be valid.
enum VlmcStatus vlmc_perturbed_floors(const struct VlmcPerturbed *law,
                                      uint32_t k_max,
                                      struct VlmcFloorReport *out);

// The exact threshold window at depth `d`; a usable threshold exists
// exactly when `*low < *high`.
//
// # Safety
// All pointers must be valid.
enum VlmcStatus vlmc_perturbed_delta_window(const struct VlmcPerturbed *law,
                                            uint32_t d,
                                            double *low,
                                            double *high);

// Estimates a context tree from a 0/1 byte sample and returns the tree
// file text (free with `vlmc_string_free`).
//
// # Safety
// `sample` must point to `len` bytes of 0/1 values; `out` must be valid.
enum VlmcStatus vlmc_estimate(const uint8_t *sample,
                              size_t len,
                              double delta,
                              uint32_t d,
                              char **out);

// Evaluates the recovery error bound (raw, possibly above 1).
//
// # Safety
// Both pointers must be valid.
enum VlmcStatus vlmc_recovery_error_bound(const struct VlmcBoundParams *params, double *out);

// Smallest sample size for which the bound applies.
//
// # Safety
// Both pointers must be valid.
enum VlmcStatus vlmc_min_sample_size(const struct VlmcBoundParams *params, uint64_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* VLMC_H */
