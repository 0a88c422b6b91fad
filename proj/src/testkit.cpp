#include "graphtv/testkit.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "graphtv/analysis.hpp"
#include "graphtv/solvers.hpp"

namespace graphtv {

Eigen::MatrixXd dense_k(const WeightedGraph& g) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(g.edge_count(), g.vertex_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    k(e, g.edge(e).tail) = g.weight(e);
    k(e, g.edge(e).head) = -g.weight(e);
  }
  return k;
}

ExactSolution exact_box_qp(const Eigen::MatrixXd& k_raw,
                           const VertexVector& f) {
  const std::size_t ne = static_cast<std::size_t>(k_raw.rows());
  const std::size_t nv = static_cast<std::size_t>(k_raw.cols());
  if (f.size() != nv) throw std::invalid_argument("exact_box_qp: f dimension");
  if (ne > 12) throw std::invalid_argument("exact_box_qp: |E| > 12 guard");

  // The box is scale-free: solving with K/s and f/s leaves p unchanged and
  // keeps the KKT tolerances meaningful for extreme weight scales.
  const double scale = std::max(k_raw.cwiseAbs().maxCoeff(), 1e-300);
  const Eigen::MatrixXd k_dense = k_raw / scale;
  Eigen::VectorXd fv(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) fv(i) = f[i] / scale;
  std::size_t patterns = 1;
  for (std::size_t e = 0; e < ne; ++e) patterns *= 3;

  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_p;
  std::vector<int> best_pattern;
  std::vector<int> sign(ne);  // -1, 0 (free), +1
  Eigen::MatrixXd free_rows(ne, nv);
  Eigen::VectorXd rhs(nv), p(ne);

  for (std::size_t code = 0; code < patterns; ++code) {
    std::size_t c = code;
    for (std::size_t e = 0; e < ne; ++e) {
      // digit order (free, -1, +1): ties resolve to the fewest bound edges
      const int digit = static_cast<int>(c % 3);
      sign[e] = digit == 0 ? 0 : (digit == 1 ? -1 : 1);
      c /= 3;
    }
    // residual = K^T p + f; fixed entries contribute sign_e * K^T row e.
    rhs = fv;
    int nfree = 0;
    for (std::size_t e = 0; e < ne; ++e) {
      if (sign[e] == 0)
        free_rows.row(nfree++) = k_dense.row(e);
      else
        rhs += sign[e] * k_dense.row(e).transpose();
    }
    p.setZero();
    if (nfree > 0) {
      // min over q of || free_rows^T q + rhs ||
      Eigen::VectorXd q =
          free_rows.topRows(nfree).transpose().colPivHouseholderQr().solve(-rhs);
      int fi = 0;
      bool interior = true;
      for (std::size_t e = 0; e < ne && interior; ++e)
        if (sign[e] == 0) {
          p(e) = q(fi++);
          if (std::abs(p(e)) >= 1.0) interior = false;
        }
      if (!interior) continue;
    }
    for (std::size_t e = 0; e < ne; ++e)
      if (sign[e] != 0) p(e) = sign[e];

    Eigen::VectorXd residual = k_dense.transpose() * p + fv;
    Eigen::VectorXd grad = k_dense * residual;  // gradient in p
    const double tol = 1e-9 * (1.0 + residual.norm()) * (1.0 + k_dense.norm());
    bool kkt_ok = true;
    for (std::size_t e = 0; e < ne && kkt_ok; ++e) {
      if (sign[e] == 0) {
        if (std::abs(grad(e)) > 10.0 * tol) kkt_ok = false;
      } else if (sign[e] > 0) {
        if (grad(e) > tol) kkt_ok = false;
      } else {
        if (grad(e) < -tol) kkt_ok = false;
      }
    }
    if (!kkt_ok) continue;
    const double obj = 0.5 * residual.squaredNorm();
    if (obj < best_obj - 1e-15) {
      best_obj = obj;
      best_p = p;
      best_pattern.assign(sign.begin(), sign.end());
    }
  }
  if (best_p.size() == 0)
    throw std::runtime_error("exact_box_qp: no KKT candidate survived");

  ExactSolution sol;
  sol.p.assign(best_p.data(), best_p.data() + ne);
  Eigen::VectorXd u = scale * (fv + k_dense.transpose() * best_p);
  sol.u.assign(u.data(), u.data() + nv);
  for (std::size_t e = 0; e < ne; ++e)
    if (best_pattern[e] != 0) sol.active.push_back(static_cast<std::uint32_t>(e));
  Eigen::VectorXd grad = k_dense * (k_dense.transpose() * best_p + fv);
  double res = 0.0;
  for (std::size_t e = 0; e < ne; ++e)
    if (best_pattern[e] == 0) res = std::max(res, std::abs(grad(e)));
  sol.kkt_residual = res;
  return sol;
}

ExactSolution exact_rof_solution(const WeightedGraph& g, const VertexVector& f) {
  VertexVector neg_f(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) neg_f[i] = -f[i];
  ExactSolution sol = exact_box_qp(dense_k(g), neg_f);
  // u for the ROF primal: u = f - K^T p = -(tv-prox primal of -f)
  for (double& v : sol.u) v = -v;
  return sol;
}

ExactSolution reference_solution(const WeightedGraph& g,
                                 const DataTermOracle& oracle, double tol,
                                 double active_eps) {
  SolveConfig cfg;
  cfg.algorithm = Algorithm::fista;
  cfg.strategy = PrecondStrategy::inactively_nested;
  cfg.recondition_period = 1;
  cfg.tolerance = tol;
  cfg.max_iterations = 200000;
  SolveResult primary = solve(g, oracle, cfg);

  SolveConfig idcfg = cfg;
  idcfg.strategy = PrecondStrategy::identity;
  idcfg.tolerance = std::max(tol, 1e-13);
  SolveResult check = solve(g, oracle, idcfg);

  double du = 0.0;
  for (std::size_t i = 0; i < primary.u.size(); ++i)
    du = std::max(du, std::abs(primary.u[i] - check.u[i]));
  if (du > 1e-6)
    throw std::runtime_error(
        "reference_solution: cross-validation disagreement " +
        std::to_string(du));

  ExactSolution sol;
  sol.p = primary.p;
  sol.u = primary.u;
  sol.active = active_set(primary.p, active_eps).active;
  sol.kkt_residual = std::abs(primary.final_gap);
  return sol;
}

FdReport fd_gradient_check(const DataTermOracle& oracle, int trials,
                           std::uint64_t seed, double h, double rel_tol) {
  FdReport rep;
  rep.trials = trials;
  if (!oracle.has_grad_gstar())
    throw std::logic_error("fd_gradient_check: oracle lacks grad_gstar");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  const std::size_t n = oracle.dimension();
  std::vector<double> w(n), grad(n), wp(n), wm(n);
  for (int t = 0; t < trials; ++t) {
    for (auto& x : w) x = dist(rng);
    oracle.grad_gstar(w, grad);
    double scale = 1.0;
    for (double x : grad) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < n; ++i) {
      wp = w;
      wm = w;
      wp[i] += h;
      wm[i] -= h;
      const double fd = (oracle.eval_gstar(wp) - oracle.eval_gstar(wm)) / (2 * h);
      rep.max_rel_error =
          std::max(rep.max_rel_error, std::abs(fd - grad[i]) / scale);
    }
  }
  rep.ok = rep.max_rel_error <= rel_tol;
  return rep;
}

}  // namespace graphtv
