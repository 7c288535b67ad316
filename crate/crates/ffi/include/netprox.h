/* C interface to the netprox graph-structured convex solver. */

#ifndef NETPROX_H
#define NETPROX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum NpStatus {
  NP_STATUS_OK = 0,
  NP_STATUS_NULL_ARGUMENT = 1,
  NP_STATUS_INVALID_UTF8 = 2,
  NP_STATUS_PARSE_ERROR = 3,
  NP_STATUS_GRAPH_ERROR = 4,
  NP_STATUS_UNSUPPORTED = 5,
  NP_STATUS_INVALID_ARGUMENT = 6,
  NP_STATUS_IO_ERROR = 7,
} NpStatus;

/**
 * Penalty adaptation selector for [`NpSolveOptions`].
 */
typedef enum NpRhoPolicy {
  NP_RHO_POLICY_FIXED = 0,
  NP_RHO_POLICY_RESIDUAL_BALANCE = 1,
} NpRhoPolicy;

/**
 * Opaque problem handle.
 */
typedef struct NpGraph NpGraph;

/**
 * Opaque solve-result handle.
 */
typedef struct NpResult NpResult;

/**
 * Optional user hook deciding the next penalty from
 * `(iter, rho, primal_norm, dual_norm)`. Takes precedence over
 * `rho_policy` when non-null. Must return a positive finite value.
 */
typedef double (*NpRhoCallback)(size_t iter, double rho, double primal, double dual);

/**
 * Solver settings; obtain defaults from [`np_solve_options_default`].
 */
typedef struct NpSolveOptions {
  double rho;
  double eps_abs;
  double eps_rel;
  size_t max_iters;
  enum NpRhoPolicy rho_policy;
  double mu;
  double tau_incr;
  double tau_decr;
  /**
   * Worker threads; 0 uses all cores.
   */
  size_t threads;
  /**
   * Print one residual line per iteration to stdout.
   */
  bool verbose;
  NpRhoCallback rho_callback;
} NpSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the most recent error message (NUL-terminated) into `buf` and
 * returns the full length in bytes including the terminator. When the
 * buffer is too small the message is truncated; call with a null buffer
 * to query the required size.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes, or be null.
 */
size_t np_last_error_message(char *buf, size_t cap);

/**
 * Creates an empty problem graph. Free with [`np_graph_free`].
 */
struct NpGraph *np_graph_new(void);

/**
 * # Safety
 * `graph` must be null or a handle from this API that has not been freed.
 */
void np_graph_free(struct NpGraph *graph);

/**
 * Adds a node with the given variable dimension and an empty objective.
 *
 * # Safety
 * `graph` must be a live handle from this API.
 */
enum NpStatus np_graph_add_node(struct NpGraph *graph, uint64_t id, size_t dim);

/**
 * Appends `weight * ||x - shift||_2^2` to a node objective. `shift` has
 * length `shift_len` (the node dimension, or 1 to broadcast).
 *
 * # Safety
 * `graph` must be a live handle; `shift` must point to `shift_len` f64s.
 */
enum NpStatus np_node_add_sum_squares(struct NpGraph *graph,
                                      uint64_t id,
                                      double weight,
                                      const double *shift,
                                      size_t shift_len);

/**
 * Appends `weight * ||x - shift||_1`.
 *
 * # Safety
 * As for [`np_node_add_sum_squares`].
 */
enum NpStatus np_node_add_norm1(struct NpGraph *graph,
                                uint64_t id,
                                double weight,
                                const double *shift,
                                size_t shift_len);

/**
 * Appends `weight * ||x - shift||_2`.
 *
 * # Safety
 * As for [`np_node_add_sum_squares`].
 */
enum NpStatus np_node_add_norm2(struct NpGraph *graph,
                                uint64_t id,
                                double weight,
                                const double *shift,
                                size_t shift_len);

/**
 * Appends a Huber penalty with the given threshold about `shift`.
 *
 * # Safety
 * As for [`np_node_add_sum_squares`].
 */
enum NpStatus np_node_add_huber(struct NpGraph *graph,
                                uint64_t id,
                                double weight,
                                const double *shift,
                                size_t shift_len,
                                double threshold);

/**
 * Appends the linear term `weight * slope' x`.
 *
 * # Safety
 * As for [`np_node_add_sum_squares`].
 */
enum NpStatus np_node_add_linear(struct NpGraph *graph,
                                 uint64_t id,
                                 double weight,
                                 const double *slope,
                                 size_t slope_len);

/**
 * Sets elementwise bounds on a node variable (entries may be infinite;
 * lengths are the node dimension or 1 to broadcast).
 *
 * # Safety
 * `graph` must be a live handle; the bound pointers must be readable for
 * their stated lengths.
 */
enum NpStatus np_node_set_box(struct NpGraph *graph,
                              uint64_t id,
                              const double *lower,
                              size_t lower_len,
                              const double *upper,
                              size_t upper_len);

/**
 * Adds an undirected edge with an empty (zero) objective.
 *
 * # Safety
 * `graph` must be a live handle.
 */
enum NpStatus np_graph_add_edge(struct NpGraph *graph, uint64_t a, uint64_t b);

/**
 * Appends `weight * ||x_a - x_b||_2^2` to an existing edge.
 *
 * # Safety
 * `graph` must be a live handle.
 */
enum NpStatus np_edge_set_sq_diff(struct NpGraph *graph, uint64_t a, uint64_t b, double weight);

/**
 * Appends the network-lasso penalty `weight * ||x_a - x_b||_2`.
 *
 * # Safety
 * `graph` must be a live handle.
 */
enum NpStatus np_edge_set_netlasso(struct NpGraph *graph, uint64_t a, uint64_t b, double weight);

/**
 * Appends `weight * ||x_a - x_b||_1`.
 *
 * # Safety
 * `graph` must be a live handle.
 */
enum NpStatus np_edge_set_abs_diff(struct NpGraph *graph, uint64_t a, uint64_t b, double weight);

/**
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t np_graph_node_count(const struct NpGraph *graph);

/**
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t np_graph_edge_count(const struct NpGraph *graph);

/**
 * Total stacked variable dimension.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t np_graph_total_dim(const struct NpGraph *graph);

/**
 * Builds a problem from an edge-list file, a node-data CSV, objective
 * templates, and an optional edge-data CSV (`edge_data_path` may be null).
 * On success writes a new handle to `out`.
 *
 * # Safety
 * The path and template arguments must be NUL-terminated strings (or null
 * where documented); `out` must be a valid pointer.
 */
enum NpStatus np_graph_load(const char *graph_path,
                            const char *node_data_path,
                            const char *node_template,
                            const char *edge_template,
                            const char *edge_data_path,
                            struct NpGraph **out);

/**
 * Default solver settings (rho 1, eps_abs 1e-4, eps_rel 1e-3, 1000
 * iterations, fixed penalty, all cores).
 */
struct NpSolveOptions np_solve_options_default(void);

/**
 * Runs the solver. `options` may be null for defaults. On success writes a
 * result handle to `out`; free it with [`np_result_free`].
 *
 * # Safety
 * `graph` must be a live handle, `options` null or valid, `out` a valid
 * pointer. A non-null `rho_callback` must be callable for the duration of
 * the solve.
 */
enum NpStatus np_solve(const struct NpGraph *graph,
                       const struct NpSolveOptions *options,
                       struct NpResult **out);

/**
 * # Safety
 * `result` must be null or a handle from [`np_solve`] not yet freed.
 */
void np_result_free(struct NpResult *result);

/**
 * True when the solve stopped on the residual certificates (rather than
 * the iteration cap).
 *
 * # Safety
 * `result` must be null or a live handle.
 */
bool np_result_converged(const struct NpResult *result);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
size_t np_result_iterations(const struct NpResult *result);

/**
 * Objective value at the returned solution (NaN for a null handle).
 *
 * # Safety
 * `result` must be null or a live handle.
 */
double np_result_objective(const struct NpResult *result);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
size_t np_result_node_count(const struct NpResult *result);

/**
 * Node id at `index` in ascending id order; `UINT64_MAX` out of range.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
uint64_t np_result_node_id(const struct NpResult *result, size_t index);

/**
 * Variable dimension of a node (0 when the node is unknown).
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t np_result_node_dim(const struct NpResult *result, uint64_t id);

/**
 * Copies a node's solved values into `out` (capacity must be at least the
 * node dimension).
 *
 * # Safety
 * `result` must be a live handle; `out` must point to `cap` writable f64s.
 */
enum NpStatus np_result_node_value(const struct NpResult *result,
                                   uint64_t id,
                                   double *out,
                                   size_t cap);

/**
 * Final residual norms and thresholds (all zero when the solve converged
 * at iteration zero). Null output pointers are skipped.
 *
 * # Safety
 * `result` must be a live handle; non-null outputs must be writable.
 */
enum NpStatus np_result_final_residuals(const struct NpResult *result,
                                        double *primal_norm,
                                        double *dual_norm,
                                        double *eps_pri,
                                        double *eps_dual);

/**
 * Penalty parameter during the final iteration (NaN when no iterations
 * ran or the handle is null).
 *
 * # Safety
 * `result` must be null or a live handle.
 */
double np_result_final_rho(const struct NpResult *result);

/**
 * Bulk copy of the full solution: node ids into `ids` and all values,
 * concatenated in ascending id order, into `values`. Returns the node
 * count; nothing is written unless both capacities suffice (query sizes
 * with null pointers, using [`np_graph_total_dim`] for the value count).
 *
 * # Safety
 * `result` must be null or a live handle; non-null out pointers must be
 * writable for their stated capacities.
 */
size_t np_result_copy_all(const struct NpResult *result,
                          uint64_t *ids,
                          size_t ids_cap,
                          double *values,
                          size_t values_cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETPROX_H */
