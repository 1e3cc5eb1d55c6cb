#ifndef MINCAST_H
#define MINCAST_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum McStatus {
  MC_STATUS_OK = 0,
  MC_STATUS_NULL_POINTER = 1,
  MC_STATUS_INVALID_UTF8 = 2,
  MC_STATUS_INVALID_NETWORK = 3,
  MC_STATUS_UNKNOWN_NODE = 4,
  MC_STATUS_INVALID_ARGUMENT = 5,
  MC_STATUS_INFEASIBLE = 6,
  MC_STATUS_NUMERICAL = 7,
  MC_STATUS_PANIC = 8,
} McStatus;

/**
 * Solver selection for [`mc_solve`].
 */
typedef enum McMethod {
  /**
   * Exact coded LP.
   */
  MC_METHOD_LP = 0,
  /**
   * Steiner tree approximation; wireline networks only.
   */
  MC_METHOD_STEINER_TREE = 1,
  /**
   * Decentralised subgradient solver, 50 iterations.
   */
  MC_METHOD_SUBGRADIENT = 2,
} McMethod;

/**
 * Opaque network handle.
 */
typedef struct McNetwork McNetwork;

/**
 * Opaque solution handle.
 */
typedef struct McSolution McSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t mc_last_error(char *buf, size_t len);

/**
 * The seven-node butterfly with nodes `s, a, b, c, d, t1, t2`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum McStatus mc_network_butterfly(struct McNetwork **out);

/**
 * Parse a JSON network document.
 *
 * # Safety
 * `json` must be null or a NUL-terminated string; `out` must be null or
 * valid for writes.
 */
enum McStatus mc_network_from_json(const char *json, struct McNetwork **out);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t mc_network_node_count(const struct McNetwork *net);

/**
 * Number of arcs or hyperarcs, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t mc_network_arc_count(const struct McNetwork *net);

/**
 * # Safety
 * `net` must be null or a handle not yet freed.
 */
void mc_network_free(struct McNetwork *net);

/**
 * Minimum-cost subgraph for a rate-`rate` multicast from `source` to the
 * `n_sinks` named sinks.
 *
 * # Safety
 * `net` must be null or a live handle, `source` and each of the `n_sinks`
 * entries of `sinks` NUL-terminated strings, `out` null or valid for writes.
 */
enum McStatus mc_solve(const struct McNetwork *net,
                       const char *source,
                       const char *const *sinks,
                       size_t n_sinks,
                       double rate,
                       enum McMethod method,
                       struct McSolution **out);

/**
 * Total cost, or NaN for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
double mc_solution_cost(const struct McSolution *sol);

/**
 * Copy up to `len` arc rates into `buf`. Returns the number of arcs.
 *
 * # Safety
 * `sol` must be null or a live handle; `buf` null or valid for `len`
 * writes.
 */
size_t mc_solution_rates(const struct McSolution *sol, double *buf, size_t len);

/**
 * # Safety
 * `sol` must be null or a handle not yet freed.
 */
void mc_solution_free(struct McSolution *sol);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINCAST_H */
