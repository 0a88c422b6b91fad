#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "graphtv/forest.hpp"
#include "graphtv/graph.hpp"
#include "graphtv/precond.hpp"
#include "graphtv/problems.hpp"

namespace graphtv {

enum class Algorithm { pg, fista, pdhg };

enum class PrecondStrategy {
  identity,
  diagonal,
  nested_forest,       // peeling blind to the active set (p = 0)
  chains,              // grid row/column chains
  inactively_nested,   // greedy peeling from the current iterate
};

enum class StepMode { safe, local_optimal };

constexpr std::size_t kNoReconditioning = std::numeric_limits<std::size_t>::max();

struct SolveConfig {
  Algorithm algorithm = Algorithm::pg;
  PrecondStrategy strategy = PrecondStrategy::inactively_nested;
  std::size_t recondition_period = 1;  // n; kNoReconditioning = build once
  std::optional<double> dual_step;     // t
  std::optional<double> primal_step;   // s (PDHG)
  double pdhg_step_balance = 1.0;
  double tolerance = 1e-10;  // on gap / (1 + |primal objective|)
  std::optional<double> gap_stop_abs;  // additional absolute-gap stop
  std::size_t max_iterations = 100000;
  double active_eps = 1e-7;  // reporting only, never used for partitioning
  StepMode step_mode = StepMode::safe;
  DiagonalScaling diagonal_scaling = DiagonalScaling::row_sum_sq;
  bool record_iterates = false;
  bool compute_nesting = false;  // record L and lhat at reconditioning events
  // When set, the trace gap column is the optimality gap
  // primal - reference (used for data terms without a cheap dual value).
  std::optional<double> reference_objective;
  std::uint64_t seed = 0;
};

struct IterationRecord {
  std::size_t iter = 0;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;
  double active_frac = 0.0;
  bool recondition = false;
  std::size_t forest_count = 0;  // L of current decomposition (0: no forests)
  std::size_t lhat = 0;          // 0 when not computed
  double time_s = 0.0;
};

struct ConvergenceTrace {
  std::vector<IterationRecord> records;
  std::vector<EdgeVector> p_iterates;  // filled only when record_iterates
  void write_csv(std::ostream& out) const;
  // first record with gap <= tol, if any
  std::optional<std::size_t> iterations_to_gap(double tol) const;
};

struct SolveResult {
  VertexVector u;
  EdgeVector p;
  ConvergenceTrace trace;
  bool converged = false;
  std::size_t iterations = 0;
  double final_gap = 0.0;
  double dual_step_used = 0.0;
  double primal_step_used = 0.0;
  std::optional<ForestDecomposition> final_decomposition;
};

SolveResult solve(const WeightedGraph& g, const DataTermOracle& oracle,
                  const SolveConfig& cfg);

SolveResult solve_pg(const WeightedGraph& g, const DataTermOracle& oracle,
                     const SolveConfig& cfg);
SolveResult solve_fista(const WeightedGraph& g, const DataTermOracle& oracle,
                        const SolveConfig& cfg);
SolveResult solve_pdhg(const WeightedGraph& g, const DataTermOracle& oracle,
                       const SolveConfig& cfg);

std::string to_string(Algorithm a);
std::string to_string(PrecondStrategy s);
std::optional<Algorithm> algorithm_from_string(const std::string& s);
std::optional<PrecondStrategy> strategy_from_string(const std::string& s);

}  // namespace graphtv
