#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "graphtv/forest.hpp"
#include "graphtv/graph.hpp"
#include "graphtv/precond.hpp"
#include "graphtv/problems.hpp"

namespace graphtv {

struct ActiveSetReport {
  std::vector<std::uint32_t> active;    // |p_e| >= 1 - eps
  std::vector<std::uint32_t> inactive;  // complement
  std::vector<double> margin;           // 1 - |p_e| per edge
};

ActiveSetReport active_set(const EdgeVector& p, double eps);

// gap = [G(u) + ||K u||_1] + G*(-K^T p); nonnegative analytically; returned
// signed for diagnostics. Rejects infeasible p (||p||_inf > 1 + 1e-8).
double duality_gap(const WeightedGraph& g, const DataTermOracle& oracle,
                   const VertexVector& u, const EdgeVector& p);

// Finite condition number sigma_max / sigma_{min>0}; singular values below
// 1e-9 * sigma_max count as zero. Guarded to 2000 rows/cols.
double kappa(const Eigen::MatrixXd& m);

// Matrix-free estimate of kappa(K): power iteration for the largest
// eigenvalue of K^T K and shifted power iteration for the smallest nonzero,
// deflating the per-component constant kernel.
double estimate_kappa_k(const WeightedGraph& g, double rel_tol = 1e-8,
                        int max_iterations = 20000);

// Pi_I assembled two ways: directly from the dense metric (T^{-1/2} and the
// pseudoinverse of T^{-1/2} P_A), and as the sum over forests of orthogonal
// projections onto span{incidence rows of inactive edges in E_l}. The two
// must agree (Frobenius 1e-8) or the call throws.
struct ProjectorSpectrum {
  Eigen::MatrixXd pi;                       // direct assembly
  std::vector<Eigen::MatrixXd> per_forest;  // sum-route terms
  Eigen::VectorXd eigenvalues;              // of the direct assembly, ascending
  double lambda_max = 0.0;
  double lambda_min_pos = 0.0;  // 0 if Pi_I = 0
  double agreement_error = 0.0;
};

ProjectorSpectrum inactive_projector(const WeightedGraph& g,
                                     const ForestDecomposition& d,
                                     const std::vector<std::uint32_t>& inactive);

struct RateReport {
  double forest_count = 0.0;  // L
  double lhat = 0.0;
  double kappa_gstar = 1.0;
  double phi = 1.0;
  double contraction = 0.0;  // (phi - 1) / (phi + 1)
};

// phi = (L / lhat) * kappa(G*). Requires L >= lhat >= 1 and kappa >= 1.
RateReport local_rate(double forest_count, double lhat, double kappa_gstar);

// Iteration count after which ||p^k - p*|| <= eps is guaranteed:
// kbar + ceil(((phi+1)/2) * log(dist * sqrt(kappa_t) / eps)).
std::size_t iteration_bound(std::size_t kbar, double dist_at_kbar,
                            double kappa_t, double eps, double phi);

struct ContractionReport {
  int trials = 0;
  double max_ratio_excess = 0.0;  // max over steps of ratio/(bound) - 1
  bool all_within = true;
};

// Gradient descent on h(Ax + b) with h = 0.5 x^T H x synthesized per trial
// (spectrum spanning [l_h, L_h]); asserts the per-step contraction
// ||x^{k+1} - x*|| <= rate * ||x^k - x*|| under the step size
// 1/t = 2 / (L_h smax^2 + l_h smin>0^2), where rate = (phi-1)/(phi+1)
// and phi = kappa(A)^2 * (L_h / l_h).
ContractionReport verify_descent_contraction(const Eigen::MatrixXd& a, double l_h, double L_h,
                           int trials, std::uint64_t seed);

// (A1) at a solution pair: every edge with (K grad G*(-K^T p*))_e == 0 has
// |p*_e| < 1. Checked with numeric margins.
bool strict_complementarity(const WeightedGraph& g, const DataTermOracle& oracle,
                            const EdgeVector& p_star, double grad_tol = 1e-8,
                            double active_eps = 1e-7);

// Dense T^{-1/2} for a preconditioner (analysis support, guard |E| <= 2000).
Eigen::MatrixXd dense_t_inv_sqrt(const Preconditioner& pc);

// K^T T^{-1/2} Proj_{ker(P_A T^{-1/2})} T^{-1/2} K for an arbitrary metric;
// its nonzero spectrum drives the local rate and the locally optimal step.
Eigen::MatrixXd restricted_normal_matrix(const WeightedGraph& g,
                                         const Preconditioner& pc,
                                         const std::vector<std::uint32_t>& inactive);

}  // namespace graphtv
