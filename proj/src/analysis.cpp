#include "graphtv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace graphtv {

namespace {
constexpr double kSvTol = 1e-9;
}

ActiveSetReport active_set(const EdgeVector& p, double eps) {
  ActiveSetReport r;
  r.margin.resize(p.size());
  for (std::size_t e = 0; e < p.size(); ++e) {
    if (std::abs(p[e]) > 1.0 + 1e-8)
      throw std::invalid_argument("active_set: infeasible dual vector");
    r.margin[e] = 1.0 - std::abs(p[e]);
    if (std::abs(p[e]) >= 1.0 - eps)
      r.active.push_back(static_cast<std::uint32_t>(e));
    else
      r.inactive.push_back(static_cast<std::uint32_t>(e));
  }
  return r;
}

double duality_gap(const WeightedGraph& g, const DataTermOracle& oracle,
                   const VertexVector& u, const EdgeVector& p) {
  if (u.size() != g.vertex_count() || p.size() != g.edge_count())
    throw std::invalid_argument("duality_gap: dimension mismatch");
  for (double v : p)
    if (std::abs(v) > 1.0 + 1e-8)
      throw std::invalid_argument("duality_gap: infeasible dual vector");
  const double primal = oracle.eval_g(u) + g.total_variation(u);
  VertexVector w = g.apply_k_transpose(p);
  for (double& x : w) x = -x;
  return primal + oracle.eval_gstar(w);
}

double kappa(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument("kappa: empty matrix");
  if (m.rows() > 2000 || m.cols() > 2000)
    throw std::invalid_argument("kappa: dense guard exceeded");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0)
    throw std::invalid_argument("kappa: zero matrix");
  double smin = s(0);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > kSvTol * s(0)) smin = s(i);
  return s(0) / smin;
}

double estimate_kappa_k(const WeightedGraph& g, double rel_tol,
                        int max_iterations) {
  const std::size_t nv = g.vertex_count();
  // component labels for kernel deflation (constants per component)
  std::vector<std::uint32_t> comp(nv, UINT32_MAX);
  std::vector<std::vector<std::uint32_t>> adj(nv);
  for (const auto& e : g.edges()) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  std::uint32_t ncomp = 0;
  for (std::uint32_t r = 0; r < nv; ++r) {
    if (comp[r] != UINT32_MAX) continue;
    std::vector<std::uint32_t> stack{r};
    comp[r] = ncomp;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto w : adj[v])
        if (comp[w] == UINT32_MAX) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }
  std::vector<std::size_t> comp_size(ncomp, 0);
  for (auto c : comp) ++comp_size[c];
  auto deflate = [&](std::vector<double>& x) {
    std::vector<double> mean(ncomp, 0.0);
    for (std::size_t i = 0; i < nv; ++i) mean[comp[i]] += x[i];
    for (std::uint32_t c = 0; c < ncomp; ++c) mean[c] /= comp_size[c];
    for (std::size_t i = 0; i < nv; ++i) x[i] -= mean[comp[i]];
  };
  std::vector<double> x(nv), y(nv), ke(g.edge_count());
  auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
    g.apply_k(in, ke);
    g.apply_k_transpose(ke, out);
  };
  auto power = [&](auto&& op) {
    for (std::size_t i = 0; i < nv; ++i) x[i] = std::sin(double(i) + 0.7);
    deflate(x);
    double lambda = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
      op(x, y);
      deflate(y);
      double n2 = 0.0;
      for (double v : y) n2 += v * v;
      const double norm = std::sqrt(n2);
      if (norm == 0.0) return 0.0;
      const double prev = lambda;
      lambda = norm;
      for (std::size_t i = 0; i < nv; ++i) x[i] = y[i] / norm;
      if (it > 3 && std::abs(lambda - prev) <= rel_tol * lambda) break;
    }
    return lambda;
  };
  const double lmax = power(apply);
  if (lmax <= 0.0) throw std::invalid_argument("estimate_kappa_k: K is zero");
  // smallest nonzero eigenvalue of K^T K via the shifted operator
  const double shift = lmax * 1.0001;
  const double top = power([&](const std::vector<double>& in,
                               std::vector<double>& out) {
    apply(in, out);
    for (std::size_t i = 0; i < nv; ++i) out[i] = shift * in[i] - out[i];
  });
  const double lmin = shift - top;
  if (lmin <= 0.0) throw std::runtime_error("estimate_kappa_k: estimate collapsed");
  return std::sqrt(lmax / lmin);
}

Eigen::MatrixXd dense_t_inv_sqrt(const Preconditioner& pc) {
  const Eigen::MatrixXd t = pc.dense_t();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::runtime_error("metric is not positive definite");
  return es.operatorInverseSqrt();
}

Eigen::MatrixXd restricted_normal_matrix(
    const WeightedGraph& g, const Preconditioner& pc,
    const std::vector<std::uint32_t>& inactive) {
  if (g.vertex_count() > 2000 || g.edge_count() > 2000)
    throw std::invalid_argument("restricted_normal_matrix: dense guard exceeded");
  const std::size_t ne = g.edge_count();
  const std::size_t nv = g.vertex_count();
  std::vector<char> is_inactive(ne, 0);
  for (auto e : inactive) is_inactive.at(e) = 1;

  Eigen::MatrixXd kd = Eigen::MatrixXd::Zero(ne, nv);
  for (std::size_t e = 0; e < ne; ++e) {
    kd(e, g.edge(e).tail) = g.weight(e);
    kd(e, g.edge(e).head) = -g.weight(e);
  }
  const Eigen::MatrixXd tis = dense_t_inv_sqrt(pc);
  Eigen::MatrixXd pa = Eigen::MatrixXd::Zero(ne, ne);
  for (std::size_t e = 0; e < ne; ++e)
    if (!is_inactive[e]) pa(e, e) = 1.0;
  const Eigen::MatrixXd m = tis * pa;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  Eigen::VectorXd inv_sv = sv;
  const double cutoff = sv.size() > 0 ? kSvTol * sv.maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    inv_sv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
  const Eigen::MatrixXd m_pinv =
      svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  const Eigen::MatrixXd proj_u = Eigen::MatrixXd::Identity(ne, ne) - m * m_pinv;
  return kd.transpose() * tis * proj_u * tis * kd;
}

ProjectorSpectrum inactive_projector(const WeightedGraph& g,
                                     const ForestDecomposition& d,
                                     const std::vector<std::uint32_t>& inactive) {
  if (g.vertex_count() > 2000 || g.edge_count() > 2000)
    throw std::invalid_argument("inactive_projector: dense guard exceeded");
  const std::size_t ne = g.edge_count();
  const std::size_t nv = g.vertex_count();

  std::vector<char> is_inactive(ne, 0);
  for (auto e : inactive) is_inactive.at(e) = 1;

  const Preconditioner pc = Preconditioner::block_forest(g, d);

  ProjectorSpectrum out;
  out.pi = restricted_normal_matrix(g, pc, inactive);

  // Sum route: orthogonal projectors onto span{grad rows of inactive edges}.
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(nv, nv);
  for (const auto& forest : d.forests) {
    std::vector<std::uint32_t> sel;
    for (auto e : forest)
      if (is_inactive[e]) sel.push_back(e);
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(sel.size(), nv);
    for (std::size_t i = 0; i < sel.size(); ++i) {
      rows(i, g.edge(sel[i]).tail) = 1.0;
      rows(i, g.edge(sel[i]).head) = -1.0;
    }
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(nv, nv);
    if (sel.size() > 0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> rsvd(rows.transpose(),
                                             Eigen::ComputeThinU);
      const auto& rs = rsvd.singularValues();
      const double rcut = rs.size() > 0 ? kSvTol * rs.maxCoeff() : 0.0;
      Eigen::Index rank = 0;
      for (Eigen::Index i = 0; i < rs.size(); ++i)
        if (rs(i) > rcut) ++rank;
      const Eigen::MatrixXd basis = rsvd.matrixU().leftCols(rank);
      proj = basis * basis.transpose();
    }
    out.per_forest.push_back(std::move(proj));
    sum += out.per_forest.back();
  }
  out.agreement_error = (out.pi - sum).norm();
  if (out.agreement_error > 1e-8)
    throw std::runtime_error("inactive_projector: direct and sum assemblies disagree (" +
                             std::to_string(out.agreement_error) + ")");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.pi);
  out.eigenvalues = es.eigenvalues();
  out.lambda_max = out.eigenvalues.size() ? out.eigenvalues.maxCoeff() : 0.0;
  out.lambda_min_pos = 0.0;
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i)
    if (out.eigenvalues(i) > 1e-8 * std::max(out.lambda_max, 1.0)) {
      out.lambda_min_pos = out.eigenvalues(i);
      break;
    }
  return out;
}

RateReport local_rate(double forest_count, double lhat, double kappa_gstar) {
  if (!(forest_count >= lhat) || !(lhat >= 1.0) || !(kappa_gstar >= 1.0))
    throw std::invalid_argument("local_rate: need L >= lhat >= 1, kappa >= 1");
  RateReport r;
  r.forest_count = forest_count;
  r.lhat = lhat;
  r.kappa_gstar = kappa_gstar;
  r.phi = (forest_count / lhat) * kappa_gstar;
  r.contraction = (r.phi - 1.0) / (r.phi + 1.0);
  return r;
}

std::size_t iteration_bound(std::size_t kbar, double dist_at_kbar,
                            double kappa_t, double eps, double phi) {
  if (!(dist_at_kbar > 0.0) || !(kappa_t > 0.0) || !(eps > 0.0) || !(phi >= 1.0))
    throw std::invalid_argument("iteration_bound: inputs must be positive");
  const double arg = dist_at_kbar * std::sqrt(kappa_t) / eps;
  if (arg <= 1.0) return kbar;
  return kbar +
         static_cast<std::size_t>(std::ceil(0.5 * (phi + 1.0) * std::log(arg)));
}

ContractionReport verify_descent_contraction(const Eigen::MatrixXd& a, double l_h, double L_h,
                           int trials, std::uint64_t seed) {
  if (!(L_h >= l_h) || !(l_h > 0.0))
    throw std::invalid_argument("verify_descent_contraction: need L_h >= l_h > 0");
  ContractionReport rep;
  rep.trials = trials;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> randn(0.0, 1.0);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0)
    throw std::invalid_argument("verify_descent_contraction: zero matrix");
  double smax = sv(0), smin = sv(0);
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kSvTol * sv(0)) smin = sv(i);
  const double phi = (smax * smax) / (smin * smin) * (L_h / l_h);
  const double rate = (phi - 1.0) / (phi + 1.0);
  const double t = 0.5 * (L_h * smax * smax + l_h * smin * smin);

  const Eigen::Index m = a.rows(), n = a.cols();
  for (int trial = 0; trial < trials; ++trial) {
    // H with spectrum spanning [l_h, L_h] exactly.
    Eigen::MatrixXd z(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) z(i, j) = randn(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd eig(m);
    for (Eigen::Index i = 0; i < m; ++i)
      eig(i) = l_h + (L_h - l_h) * std::uniform_real_distribution<double>(0, 1)(rng);
    if (m >= 1) eig(0) = l_h;
    if (m >= 2) eig(m - 1) = L_h;
    const Eigen::MatrixXd h = q * eig.asDiagonal() * q.transpose();

    Eigen::VectorXd b(m), x0(n);
    for (Eigen::Index i = 0; i < m; ++i) b(i) = randn(rng);
    for (Eigen::Index i = 0; i < n; ++i) x0(i) = randn(rng);

    // Limit of gradient descent from x0: kernel component frozen.
    const Eigen::MatrixXd big_b = a.transpose() * h * a;
    const Eigen::VectorXd c = -a.transpose() * h * b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(big_b);
    Eigen::VectorXd ev = es.eigenvalues();
    const double ecut = ev.size() ? 1e-12 * std::max(ev.maxCoeff(), 1.0) : 0.0;
    Eigen::VectorXd inv_ev = ev;
    Eigen::VectorXd ker_mask = ev;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      inv_ev(i) = ev(i) > ecut ? 1.0 / ev(i) : 0.0;
      ker_mask(i) = ev(i) > ecut ? 0.0 : 1.0;
    }
    const Eigen::MatrixXd vb = es.eigenvectors();
    const Eigen::VectorXd x_star =
        vb * (ker_mask.asDiagonal() * (vb.transpose() * x0)) +
        vb * (inv_ev.asDiagonal() * (vb.transpose() * c));

    Eigen::VectorXd x = x0;
    const double scale0 = (x0 - x_star).norm() + 1.0;
    for (int k = 0; k < 60; ++k) {
      const double dist = (x - x_star).norm();
      if (dist < 1e-12 * scale0) break;
      const Eigen::VectorXd grad = a.transpose() * h * (a * x + b);
      const Eigen::VectorXd x_next = x - grad / t;
      const double dist_next = (x_next - x_star).norm();
      const double bound = rate * dist * (1.0 + 1e-10) + 1e-14 * scale0;
      if (dist_next > bound) {
        rep.all_within = false;
        rep.max_ratio_excess =
            std::max(rep.max_ratio_excess, dist_next / std::max(bound, 1e-300) - 1.0);
      }
      x = x_next;
    }
  }
  return rep;
}

bool strict_complementarity(const WeightedGraph& g, const DataTermOracle& oracle,
                            const EdgeVector& p_star, double grad_tol,
                            double active_eps) {
  VertexVector w = g.apply_k_transpose(p_star);
  for (double& x : w) x = -x;
  VertexVector u(g.vertex_count());
  oracle.grad_gstar(w, u);
  EdgeVector ku = g.apply_k(u);
  double scale = 1.0;
  for (double x : ku) scale = std::max(scale, std::abs(x));
  for (std::size_t e = 0; e < ku.size(); ++e) {
    const bool grad_zero = std::abs(ku[e]) <= grad_tol * scale;
    const bool at_bound = std::abs(p_star[e]) >= 1.0 - active_eps;
    if (grad_zero && at_bound) return false;
  }
  return true;
}

}  // namespace graphtv
