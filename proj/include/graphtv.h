/* C API for the graphtv solver library: opaque handles and error codes.
 * All functions are thread-compatible; handles are immutable after creation
 * and may be shared across threads. Error details for the calling thread are
 * available via gtv_last_error(). */
#ifndef GRAPHTV_H
#define GRAPHTV_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gtv_status {
  GTV_OK = 0,
  GTV_ERROR_INVALID_ARGUMENT = 1,
  GTV_ERROR_IO = 2,
  GTV_ERROR_NOT_CONVERGED = 3,
  GTV_ERROR_GUARD_EXCEEDED = 4,
  GTV_ERROR_INTERNAL = 5
} gtv_status;

typedef struct gtv_graph gtv_graph;
typedef struct gtv_decomposition gtv_decomposition;

const char* gtv_status_name(gtv_status status);
/* Message of the most recent failure on this thread; empty string if none. */
const char* gtv_last_error(void);

/* ---- graphs ---------------------------------------------------------- */

/* Undirected weighted graph; orientation is normalized to tail < head.
 * weights must be positive, no self loops. */
gtv_status gtv_graph_create(uint64_t vertex_count, uint64_t edge_count,
                            const uint32_t* tails, const uint32_t* heads,
                            const double* weights, gtv_graph** out);
gtv_status gtv_graph_grid(uint64_t width, uint64_t height, double weight,
                          gtv_graph** out);
gtv_status gtv_graph_random(uint64_t vertex_count, uint64_t edge_count,
                            double weight_lo, double weight_hi, uint64_t seed,
                            gtv_graph** out);
/* DIMACS max-flow or plain edge-list file. When out_data is non-NULL it
 * receives a malloc-style buffer of vertex_count unary values; release it
 * with gtv_buffer_free. */
gtv_status gtv_graph_load(const char* path, gtv_graph** out_graph,
                          double** out_data);
void gtv_graph_free(gtv_graph* g);
uint64_t gtv_graph_vertex_count(const gtv_graph* g);
uint64_t gtv_graph_edge_count(const gtv_graph* g);
/* out has edge_count entries: (K u)_e = w_e (u_tail - u_head). */
gtv_status gtv_graph_apply_k(const gtv_graph* g, const double* u, double* out);
/* out has vertex_count entries. */
gtv_status gtv_graph_apply_k_transpose(const gtv_graph* g, const double* p,
                                       double* out);
void gtv_buffer_free(double* buffer);

/* ---- forest decompositions ------------------------------------------ */

/* Greedy peeling driven by the dual iterate p (NULL means p = 0, the
 * active-set-blind baseline). */
gtv_status gtv_partition_greedy(const gtv_graph* g, const double* p,
                                gtv_decomposition** out);
/* Row/column chains; requires a grid-generated graph with both dims >= 2. */
gtv_status gtv_partition_chains(const gtv_graph* g, gtv_decomposition** out);
uint64_t gtv_decomposition_forest_count(const gtv_decomposition* d);
/* out has edge_count entries; forest index per edge. */
gtv_status gtv_decomposition_forest_of_edge(const gtv_decomposition* d,
                                            const gtv_graph* g, uint32_t* out);
gtv_status gtv_decomposition_save(const gtv_decomposition* d, const char* path);
void gtv_decomposition_free(gtv_decomposition* d);

/* ---- solving --------------------------------------------------------- */

typedef struct gtv_solve_summary {
  uint64_t iterations;
  int converged;
  double final_gap;
  double primal_objective;
  double seconds;
} gtv_solve_summary;

/* Solves min_u 0.5||u-f||^2 + sum_e w_e |u_i - u_j| (fused Lasso on the
 * graph). options is a whitespace-separated key=value list understood by the
 * experiment layer, e.g. "algorithm=pg precond=inactively-nested n=1
 * tol=1e-10 max_iters=100000". u_out (vertex_count), p_out (edge_count),
 * summary and trace_csv_path may each be NULL. Returns
 * GTV_ERROR_NOT_CONVERGED when the tolerance was not reached. */
gtv_status gtv_solve_rof(const gtv_graph* g, const double* f,
                         const char* options, double* u_out, double* p_out,
                         gtv_solve_summary* summary,
                         const char* trace_csv_path);

/* ---- experiment driver ------------------------------------------------ */

/* Full preset/benchmark driver used by the CLI. subcommand is one of
 * run|partition|analyze|bench; config_path may be NULL; overrides are
 * key=value strings. Returns the process exit code semantics directly:
 * 0 ok, 1 tolerance not reached, 2 bad input. */
int gtv_experiment(const char* subcommand, const char* config_path,
                   const char* const* overrides, uint64_t override_count,
                   const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* GRAPHTV_H */
