#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "graphtv/forest.hpp"
#include "graphtv/graph.hpp"
#include "graphtv/tree_prox.hpp"

namespace graphtv {

enum class PrecondKind { identity, diagonal, block_forest };

enum class DiagonalScaling {
  row_sum_sq,   // diag(K K^T): entries 2 w_e^2
  row_abs_sum,  // sum_j |K_ej|: entries 2 w_e
};

// Metric T of the scaled dual prox. Immutable between reconditioning events;
// the scaled update is pure and may run per tree in parallel.
class Preconditioner {
 public:
  static Preconditioner identity(const WeightedGraph& g);
  static Preconditioner diagonal(const WeightedGraph& g, DiagonalScaling s);
  static Preconditioner block_forest(const WeightedGraph& g,
                                     ForestDecomposition d);

  PrecondKind kind() const { return kind_; }
  const WeightedGraph& graph() const { return *graph_; }
  const ForestDecomposition* decomposition() const {
    return kind_ == PrecondKind::block_forest ? &decomposition_ : nullptr;
  }
  std::size_t forest_count() const {
    return kind_ == PrecondKind::block_forest ? decomposition_.forest_count() : 0;
  }

  // p_next = argmin_p -<K ubar, p> + ind{||p||_inf <= 1} + (t/2)||p - p_k||_T^2.
  // Block-forest: per forest l, f_l = -(K_l^T p_k|_l + ubar / t), then the
  // exact box QP through the tree prox. Identity/diagonal: clipped gradient
  // step clip(p_k + T^{-1} K ubar / t).
  void scaled_dual_update(std::span<const double> p_k,
                          std::span<const double> ubar, double t,
                          std::span<double> p_next) const;

  // Explicit T (analysis support). Guarded to |E| <= 2000.
  Eigen::MatrixXd dense_t() const;

  // lambda_max(K^T T^{-1} K) via power iteration (rel. tol 1e-6), returned as
  // min(estimate * 1.01, analytic cap). Block-forest cap: forest count L.
  double operator_norm_sq() const;

  // Fixed eigenvalue bounds t_lo I <= T <= t_hi I from weights and tree sizes.
  std::pair<double, double> eigenvalue_bounds() const;

  // y = K^T T^{-1} K x (exposed for the power iteration and tests)
  void apply_normal_operator(std::span<const double> x,
                             std::span<double> y) const;

 private:
  Preconditioner() = default;
  PrecondKind kind_ = PrecondKind::identity;
  const WeightedGraph* graph_ = nullptr;
  std::vector<double> diag_;  // diagonal variant
  ForestDecomposition decomposition_;
  std::vector<ForestStructure> structures_;
};

}  // namespace graphtv
