#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graphtv/graph.hpp"

namespace graphtv {

// Ordered partition of the edge set into forests E_1, ..., E_L.
struct ForestDecomposition {
  std::vector<std::vector<std::uint32_t>> forests;

  std::size_t forest_count() const { return forests.size(); }
  std::size_t total_edges() const;
  // forest index per edge; edges not covered map to UINT32_MAX
  std::vector<std::uint32_t> forest_of_edge(std::size_t edge_count) const;
};

// rho_e = 1 - |1 - |p_e||; equals 1 on active edges (|p| = 1), 0 at p = 0.
EdgeVector partition_weights(const EdgeVector& p);

// Kruskal minimum spanning forest over the given edge subset: maximal acyclic
// subset of minimum total rho. Ties broken by ascending edge index.
std::vector<std::uint32_t> minimum_spanning_forest(
    const WeightedGraph& g, std::span<const double> rho,
    std::span<const std::uint32_t> edge_subset);

// Greedy peeling: repeatedly extract a minimum spanning forest under
// rho = partition_weights(p) restricted to the remaining edges.
ForestDecomposition greedy_inactively_nested(const WeightedGraph& g,
                                             const EdgeVector& p);

// Active-set-blind baseline: peeling with p = 0.
ForestDecomposition fixed_nested_forest(const WeightedGraph& g);

// For grid graphs with both dimensions >= 2: E_1 = horizontal edges (row
// paths), E_2 = vertical edges (column paths).
ForestDecomposition grid_chain_decomposition(const WeightedGraph& g);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const ForestDecomposition& d, const WeightedGraph& g);

// Nesting diagnostics for the span chain S_1 = ... = S_lhat > S_{lhat+1} >= ...
// where S_l = span{incidence rows of inactive edges in E_l}. Dense rank
// computation; guarded to |V| <= 2000.
struct NestingProfile {
  std::size_t forest_count = 0;
  std::vector<std::size_t> span_dims;
  bool nested = false;
  std::optional<std::size_t> lhat;  // present iff nested
};

NestingProfile nesting_profile(const ForestDecomposition& d,
                               const WeightedGraph& g,
                               const std::vector<std::uint32_t>& inactive);

// Text form: line l lists the edge indices of E_l.
void write_decomposition(std::ostream& out, const ForestDecomposition& d);
ForestDecomposition read_decomposition(std::istream& in);

}  // namespace graphtv
