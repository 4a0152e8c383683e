/* SPDX-License-Identifier: Apache-2.0 */

#ifndef CORELAB_H
#define CORELAB_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum CorelabStatus {
  CORELAB_STATUS_OK = 0,
  CORELAB_STATUS_NULL_POINTER = 1,
  CORELAB_STATUS_INVALID_ARGUMENT = 2,
  CORELAB_STATUS_PARSE = 3,
  CORELAB_STATUS_CAP_EXCEEDED = 4,
  CORELAB_STATUS_IO = 5,
  CORELAB_STATUS_INTERNAL = 6,
} CorelabStatus;

/**
 * Opaque graph handle.
 */
typedef struct CorelabGraph CorelabGraph;

/**
 * Rank of an adjacency matrix over the rationals.
 */
typedef struct CorelabRank {
  size_t n;
  size_t rank;
  /**
   * 1 when the rank is certified exact, 0 when it is a lower bound.
   */
  int32_t exact;
  /**
   * Probability bound on the rank being too low; 0 when exact.
   */
  double failure_bound;
} CorelabRank;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t corelab_last_error(char *buf, size_t len);

/**
 * Builds a simple graph on `n` vertices from `m` edges stored as pairs in
 * `edges` (length `2m`).
 *
 * # Safety
 * `edges` must be valid for `2m` reads when `m > 0`; `out` must be writable.
 */
enum CorelabStatus corelab_graph_from_edges(size_t n,
                                            const uint32_t *edges,
                                            size_t m,
                                            struct CorelabGraph **out);

/**
 * Parses a graph in edge-list text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum CorelabStatus corelab_graph_parse(const char *text, struct CorelabGraph **out);

/**
 * Draws `G(n, lambda / n)` from the stream keyed by `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CorelabStatus corelab_graph_sample_gnp(size_t n,
                                            double lambda,
                                            uint64_t seed,
                                            struct CorelabGraph **out);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void corelab_graph_free(struct CorelabGraph *g);

/**
 * Vertex count, or 0 for null.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t corelab_graph_n(const struct CorelabGraph *g);

/**
 * Edge count, or 0 for null.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t corelab_graph_m(const struct CorelabGraph *g);

/**
 * The `k`-core of `g`, relabeled to `0..|core|`.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum CorelabStatus corelab_kcore(const struct CorelabGraph *g, size_t k, struct CorelabGraph **out);

/**
 * Rank of the adjacency matrix over GF(2).
 *
 * # Safety
 * `g` must be a live handle; `rank` must be writable.
 */
enum CorelabStatus corelab_rank_gf2(const struct CorelabGraph *g, size_t *rank);

/**
 * Rational rank from `num_primes` random primes drawn from `seed`, made
 * exact by fraction-free elimination when not full and `n <= 64`.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum CorelabStatus corelab_rank_rational(const struct CorelabGraph *g,
                                         size_t num_primes,
                                         uint64_t seed,
                                         struct CorelabRank *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *corelab_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORELAB_H */
