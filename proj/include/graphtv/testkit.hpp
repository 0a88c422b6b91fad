#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "graphtv/graph.hpp"
#include "graphtv/problems.hpp"

namespace graphtv {

// Independent brute-force and high-precision references; built and trusted
// before the main solvers are.
struct ExactSolution {
  EdgeVector p;
  VertexVector u;
  std::vector<std::uint32_t> active;
  double kkt_residual = 0.0;
};

// Dense K for small graphs (|E| x |V|).
Eigen::MatrixXd dense_k(const WeightedGraph& g);

// argmin_{||p||_inf <= 1} 0.5 || K^T p + f ||^2 by enumeration over sign
// patterns p_e in {-1, free, +1}: per pattern, least squares in the free
// coordinates, candidates kept when free entries are interior and the bound
// multipliers have the correct signs; ties broken by lexicographic pattern
// order. Guarded to |E| <= 12. The returned u = f + K^T p is the exact
// minimizer of 0.5||u - f||^2 + ||K u||_1 (Fenchel pair).
ExactSolution exact_box_qp(const Eigen::MatrixXd& k_dense, const VertexVector& f);

// ROF reference through exact_box_qp: dual p* of 0.5||u - f||^2 + ||K u||_1
// and primal u* = f - K^T p*.
ExactSolution exact_rof_solution(const WeightedGraph& g, const VertexVector& f);

// High-precision reference for desk-scale instances: FISTA with the
// inactively nested metric at tol, cross-validated against an identity-metric
// run (agreement in u to 1e-6 required).
ExactSolution reference_solution(const WeightedGraph& g,
                                 const DataTermOracle& oracle,
                                 double tol = 1e-13,
                                 double active_eps = 1e-7);

struct FdReport {
  int trials = 0;
  double max_rel_error = 0.0;
  bool ok = true;
};

// Central-difference check of grad_gstar against eval_gstar.
FdReport fd_gradient_check(const DataTermOracle& oracle, int trials,
                           std::uint64_t seed, double h = 1e-6,
                           double rel_tol = 1e-5);

}  // namespace graphtv
