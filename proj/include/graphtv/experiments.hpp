#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphtv/graph.hpp"
#include "graphtv/solvers.hpp"
#include "graphtv/testkit.hpp"

namespace graphtv {

// Flat key=value configuration; file lines "key = value", '#' comments,
// command-line overrides win.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  static ExperimentConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  void apply_override(const std::string& key_eq_value);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  std::size_t get_index(const std::string& key, std::size_t fallback) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Exit codes shared with the CLI: 0 ok, 1 tolerance not reached, 2 bad input.
int cmd_run(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_partition(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_analyze(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_bench(const ExperimentConfig& cfg, const std::string& out_dir);

int run_subcommand(const std::string& name, const ExperimentConfig& cfg,
                   const std::string& out_dir);

// Regularization scale bisected until the reference solution's active
// fraction enters [lo, hi]; at most max_solves reference solves.
struct LambdaSearch {
  double lambda = 1.0;
  double achieved_fraction = 0.0;
  bool in_band = false;
};

LambdaSearch bisect_active_fraction(const WeightedGraph& g,
                                    const VertexVector& f, double lo, double hi,
                                    int max_solves = 30,
                                    double reference_tol = 1e-12);

}  // namespace graphtv
