#include "graphtv.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "graphtv/analysis.hpp"
#include "graphtv/experiments.hpp"
#include "graphtv/forest.hpp"
#include "graphtv/graph.hpp"
#include "graphtv/solvers.hpp"

using namespace graphtv;

struct gtv_graph {
  WeightedGraph g;
};

struct gtv_decomposition {
  ForestDecomposition d;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

gtv_status classify(const std::exception& e) {
  set_error(e.what());
  if (dynamic_cast<const std::invalid_argument*>(&e))
    return GTV_ERROR_INVALID_ARGUMENT;
  if (dynamic_cast<const std::ios_base::failure*>(&e)) return GTV_ERROR_IO;
  return GTV_ERROR_INTERNAL;
}

template <typename Fn>
gtv_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return classify(e);
  } catch (...) {
    set_error("unknown error");
    return GTV_ERROR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* gtv_status_name(gtv_status status) {
  switch (status) {
    case GTV_OK: return "ok";
    case GTV_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case GTV_ERROR_IO: return "io error";
    case GTV_ERROR_NOT_CONVERGED: return "not converged";
    case GTV_ERROR_GUARD_EXCEEDED: return "guard exceeded";
    case GTV_ERROR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* gtv_last_error(void) { return g_last_error.c_str(); }

gtv_status gtv_graph_create(uint64_t vertex_count, uint64_t edge_count,
                            const uint32_t* tails, const uint32_t* heads,
                            const double* weights, gtv_graph** out) {
  if (!out || (!tails && edge_count) || (!heads && edge_count) ||
      (!weights && edge_count)) {
    set_error("null pointer argument");
    return GTV_ERROR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&]() {
    std::vector<Edge> edges(edge_count);
    for (uint64_t e = 0; e < edge_count; ++e) edges[e] = {tails[e], heads[e]};
    std::vector<double> w(weights, weights + edge_count);
    *out = new gtv_graph{
        WeightedGraph(static_cast<std::size_t>(vertex_count), std::move(edges),
                      std::move(w))};
    return GTV_OK;
  });
}

gtv_status gtv_graph_grid(uint64_t width, uint64_t height, double weight,
                          gtv_graph** out) {
  if (!out) return GTV_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded([&]() {
    *out = new gtv_graph{generate_grid(static_cast<std::size_t>(width),
                                       static_cast<std::size_t>(height), weight)};
    return GTV_OK;
  });
}

gtv_status gtv_graph_random(uint64_t vertex_count, uint64_t edge_count,
                            double weight_lo, double weight_hi, uint64_t seed,
                            gtv_graph** out) {
  if (!out) return GTV_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded([&]() {
    *out = new gtv_graph{generate_random_graph(
        static_cast<std::size_t>(vertex_count),
        static_cast<std::size_t>(edge_count), weight_lo, weight_hi, seed)};
    return GTV_OK;
  });
}

gtv_status gtv_graph_load(const char* path, gtv_graph** out_graph,
                          double** out_data) {
  if (!path || !out_graph) return GTV_ERROR_INVALID_ARGUMENT;
  *out_graph = nullptr;
  if (out_data) *out_data = nullptr;
  return guarded([&]() {
    BenchmarkInstance inst = load_benchmark(path);
    if (out_data) {
      *out_data = static_cast<double*>(
          std::malloc(sizeof(double) * inst.data.size()));
      if (!*out_data) {
        set_error("out of memory");
        return GTV_ERROR_INTERNAL;
      }
      std::memcpy(*out_data, inst.data.data(),
                  sizeof(double) * inst.data.size());
    }
    *out_graph = new gtv_graph{std::move(inst.graph)};
    return GTV_OK;
  });
}

void gtv_graph_free(gtv_graph* g) { delete g; }

uint64_t gtv_graph_vertex_count(const gtv_graph* g) {
  return g ? g->g.vertex_count() : 0;
}

uint64_t gtv_graph_edge_count(const gtv_graph* g) {
  return g ? g->g.edge_count() : 0;
}

gtv_status gtv_graph_apply_k(const gtv_graph* g, const double* u, double* out) {
  if (!g || !u || !out) return GTV_ERROR_INVALID_ARGUMENT;
  return guarded([&]() {
    g->g.apply_k(std::span<const double>(u, g->g.vertex_count()),
                 std::span<double>(out, g->g.edge_count()));
    return GTV_OK;
  });
}

gtv_status gtv_graph_apply_k_transpose(const gtv_graph* g, const double* p,
                                       double* out) {
  if (!g || !p || !out) return GTV_ERROR_INVALID_ARGUMENT;
  return guarded([&]() {
    g->g.apply_k_transpose(std::span<const double>(p, g->g.edge_count()),
                           std::span<double>(out, g->g.vertex_count()));
    return GTV_OK;
  });
}

void gtv_buffer_free(double* buffer) { std::free(buffer); }

gtv_status gtv_partition_greedy(const gtv_graph* g, const double* p,
                                gtv_decomposition** out) {
  if (!g || !out) return GTV_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded([&]() {
    EdgeVector pv(g->g.edge_count(), 0.0);
    if (p) pv.assign(p, p + g->g.edge_count());
    *out = new gtv_decomposition{greedy_inactively_nested(g->g, pv)};
    return GTV_OK;
  });
}

gtv_status gtv_partition_chains(const gtv_graph* g, gtv_decomposition** out) {
  if (!g || !out) return GTV_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded([&]() {
    *out = new gtv_decomposition{grid_chain_decomposition(g->g)};
    return GTV_OK;
  });
}

uint64_t gtv_decomposition_forest_count(const gtv_decomposition* d) {
  return d ? d->d.forest_count() : 0;
}

gtv_status gtv_decomposition_forest_of_edge(const gtv_decomposition* d,
                                            const gtv_graph* g, uint32_t* out) {
  if (!d || !g || !out) return GTV_ERROR_INVALID_ARGUMENT;
  return guarded([&]() {
    auto map = d->d.forest_of_edge(g->g.edge_count());
    std::memcpy(out, map.data(), sizeof(uint32_t) * map.size());
    return GTV_OK;
  });
}

gtv_status gtv_decomposition_save(const gtv_decomposition* d, const char* path) {
  if (!d || !path) return GTV_ERROR_INVALID_ARGUMENT;
  return guarded([&]() {
    std::ofstream out(path);
    if (!out) {
      set_error(std::string("cannot write ") + path);
      return GTV_ERROR_IO;
    }
    write_decomposition(out, d->d);
    return GTV_OK;
  });
}

void gtv_decomposition_free(gtv_decomposition* d) { delete d; }

gtv_status gtv_solve_rof(const gtv_graph* g, const double* f,
                         const char* options, double* u_out, double* p_out,
                         gtv_solve_summary* summary,
                         const char* trace_csv_path) {
  if (!g || !f) return GTV_ERROR_INVALID_ARGUMENT;
  return guarded([&]() {
    ExperimentConfig cfg;
    if (options) {
      std::string opts(options);
      std::size_t pos = 0;
      while (pos < opts.size()) {
        const auto next = opts.find_first_of(" \t\n", pos);
        const std::string token =
            opts.substr(pos, next == std::string::npos ? next : next - pos);
        if (!token.empty()) cfg.apply_override(token);
        if (next == std::string::npos) break;
        pos = next + 1;
      }
    }
    SolveConfig sc;
    {
      // Reuse the experiment layer's key set.
      ExperimentConfig with_defaults = cfg;
      if (!with_defaults.has("algorithm")) with_defaults.set("algorithm", "pg");
      sc.algorithm = *algorithm_from_string(with_defaults.get("algorithm", "pg"));
      const auto strat =
          strategy_from_string(with_defaults.get("precond", "inactively-nested"));
      if (!strat) throw std::invalid_argument("unknown precond strategy");
      sc.strategy = *strat;
      sc.recondition_period = with_defaults.get_index("n", 1);
      sc.tolerance = with_defaults.get_num("tol", 1e-10);
      sc.max_iterations = with_defaults.get_index("max_iters", 100000);
      sc.active_eps = with_defaults.get_num("active_eps", 1e-7);
      sc.step_mode = with_defaults.get("step_mode", "safe") == "local-optimal"
                         ? StepMode::local_optimal
                         : StepMode::safe;
      if (with_defaults.has("dual_step"))
        sc.dual_step = with_defaults.get_num("dual_step", 0.0);
    }
    VertexVector fv(f, f + g->g.vertex_count());
    RofOracle oracle(fv);
    SolveResult res = solve(g->g, oracle, sc);
    if (u_out)
      std::memcpy(u_out, res.u.data(), sizeof(double) * res.u.size());
    if (p_out)
      std::memcpy(p_out, res.p.data(), sizeof(double) * res.p.size());
    if (summary) {
      summary->iterations = res.iterations;
      summary->converged = res.converged ? 1 : 0;
      summary->final_gap = res.final_gap;
      summary->primal_objective = res.trace.records.back().primal_obj;
      summary->seconds = res.trace.records.back().time_s;
    }
    if (trace_csv_path) {
      std::ofstream out(trace_csv_path);
      if (!out) {
        set_error(std::string("cannot write ") + trace_csv_path);
        return GTV_ERROR_IO;
      }
      res.trace.write_csv(out);
    }
    if (!res.converged) {
      set_error("tolerance not reached within max iterations");
      return GTV_ERROR_NOT_CONVERGED;
    }
    return GTV_OK;
  });
}

int gtv_experiment(const char* subcommand, const char* config_path,
                   const char* const* overrides, uint64_t override_count,
                   const char* out_dir) {
  if (!subcommand || !out_dir) {
    set_error("null subcommand or out_dir");
    return 2;
  }
  try {
    ExperimentConfig cfg;
    if (config_path) cfg = ExperimentConfig::from_file(config_path);
    for (uint64_t i = 0; i < override_count; ++i)
      cfg.apply_override(overrides[i]);
    return run_subcommand(subcommand, cfg, out_dir);
  } catch (const std::exception& e) {
    set_error(e.what());
    return 2;
  }
}

}  // extern "C"
