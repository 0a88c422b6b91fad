#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "graphtv/graph.hpp"

namespace graphtv {

// Derivative of a convex piecewise-quadratic value function: a nondecreasing
// piecewise-linear function stored as breakpoints plus per-interval affine
// pieces. A pending affine term (da*x + db) is kept lazily so unary updates
// are O(1).
class PwlMessage {
 public:
  PwlMessage() : slope_{0.0}, intercept_{0.0} {}

  double value(double x) const;
  void add_affine(double a, double b) {
    da_ += a;
    db_ += b;
  }
  bool is_zero_function() const {
    return bp_.empty() && slope_.size() == 1 && slope_[0] == 0.0 &&
           intercept_[0] == 0.0 && da_ == 0.0 && db_ == 0.0;
  }
  // *this += other
  void merge(PwlMessage&& other);
  // Clamp to [-w, +w]; requires every piece slope > 0 after the pending
  // affine. Returns the crossing points (lam_lo, lam_hi).
  std::pair<double, double> clip(double w);
  // x with value(x) = 0; requires every piece slope > 0.
  double solve_zero() const;
  std::size_t piece_count() const { return slope_.size(); }
  const std::vector<double>& breakpoints() const { return bp_; }

 private:
  std::vector<double> bp_;
  std::vector<double> slope_;      // bp_.size() + 1 entries
  std::vector<double> intercept_;  // bp_.size() + 1 entries
  double da_ = 0.0, db_ = 0.0;

  void flush();
};

// Rooted-tree view of one forest of a decomposition. Every graph vertex
// belongs to exactly one tree (isolated vertices are singleton trees).
// Immutable; solver passes are pure and per-tree independent.
class ForestStructure {
 public:
  ForestStructure(const WeightedGraph& g, std::span<const std::uint32_t> edges);

  static constexpr std::uint32_t npos = UINT32_MAX;

  const WeightedGraph& graph() const { return *graph_; }
  const std::vector<std::uint32_t>& edge_indices() const { return edges_; }
  std::size_t tree_count() const { return tree_sizes_.size(); }
  std::uint32_t tree_of_vertex(std::uint32_t v) const { return tree_of_vertex_[v]; }

  // v = argmin_u 0.5||u - f||^2 + sum_{e in forest} w_e |u_i - u_j|
  // Exact leaf-to-root message passing with root-to-leaf back-substitution.
  void tv_prox(std::span<const double> f, std::span<double> v) const;

  // Unique p on the forest edges with K_l^T p = v - f (leaf elimination),
  // clamped into [-1, 1] to absorb roundoff. Writes only forest-edge slots
  // of p. Throws if the residual exceeds 1e-6 (invalid v).
  void dual_from_primal(std::span<const double> f, std::span<const double> v,
                        std::span<double> p) const;

  // argmin_{||p||_inf <= 1} 0.5 || K_l^T p + f ||^2 via the TV-prox dual
  // pair: v = tv_prox(f), then K_l^T p = v - f. Writes only forest-edge
  // slots of p; v_scratch must have vertex_count entries.
  void box_qp(std::span<const double> f, std::span<double> p,
              std::span<double> v_scratch) const;

  // out = K_l^T (p restricted to the forest edges)
  void apply_k_transpose_forest(std::span<const double> p,
                                std::span<double> out) const;

  // Orthogonal projection onto ran(K_l^T): per-tree mean removal.
  void project_onto_row_span(std::span<const double> x,
                             std::span<double> out) const;

 private:
  const WeightedGraph* graph_;
  std::vector<std::uint32_t> edges_;
  std::vector<std::uint32_t> parent_edge_;    // per vertex; npos at roots
  std::vector<std::uint32_t> parent_vertex_;  // per vertex; npos at roots
  std::vector<std::uint32_t> order_;          // BFS order, roots first
  std::vector<std::uint32_t> tree_of_vertex_;
  std::vector<std::uint32_t> tree_sizes_;
};

}  // namespace graphtv
