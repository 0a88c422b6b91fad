#include "graphtv/precond.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace graphtv {

Preconditioner Preconditioner::identity(const WeightedGraph& g) {
  Preconditioner p;
  p.kind_ = PrecondKind::identity;
  p.graph_ = &g;
  return p;
}

Preconditioner Preconditioner::diagonal(const WeightedGraph& g,
                                        DiagonalScaling s) {
  Preconditioner p;
  p.kind_ = PrecondKind::diagonal;
  p.graph_ = &g;
  p.diag_.resize(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const double w = g.weight(e);
    p.diag_[e] = (s == DiagonalScaling::row_sum_sq) ? 2.0 * w * w : 2.0 * w;
  }
  return p;
}

Preconditioner Preconditioner::block_forest(const WeightedGraph& g,
                                            ForestDecomposition d) {
  auto report = validate(d, g);
  if (!report.ok())
    throw std::invalid_argument("block_forest: invalid decomposition: " +
                                report.violations.front());
  Preconditioner p;
  p.kind_ = PrecondKind::block_forest;
  p.graph_ = &g;
  p.decomposition_ = std::move(d);
  p.structures_.reserve(p.decomposition_.forest_count());
  for (const auto& forest : p.decomposition_.forests)
    p.structures_.emplace_back(g, forest);
  return p;
}

void Preconditioner::scaled_dual_update(std::span<const double> p_k,
                                        std::span<const double> ubar, double t,
                                        std::span<double> p_next) const {
  const std::size_t ne = graph_->edge_count();
  const std::size_t nv = graph_->vertex_count();
  if (p_k.size() != ne || p_next.size() != ne || ubar.size() != nv)
    throw std::invalid_argument("scaled_dual_update: dimension mismatch");
  if (!(t > 0.0)) throw std::invalid_argument("scaled_dual_update: step t <= 0");
  for (double x : ubar)
    if (!std::isfinite(x))
      throw std::invalid_argument("scaled_dual_update: non-finite ubar");

  if (kind_ == PrecondKind::block_forest) {
    std::vector<double> f_l(nv), v_scratch(nv);
    for (const auto& fs : structures_) {
      fs.apply_k_transpose_forest(p_k, f_l);
      for (std::size_t i = 0; i < nv; ++i) f_l[i] = -(f_l[i] + ubar[i] / t);
      fs.box_qp(f_l, p_next, v_scratch);
    }
    return;
  }

  std::vector<double> ku(ne);
  graph_->apply_k(ubar, ku);
  for (std::size_t e = 0; e < ne; ++e) {
    const double step = (kind_ == PrecondKind::identity)
                            ? ku[e] / t
                            : ku[e] / (t * diag_[e]);
    p_next[e] = std::clamp(p_k[e] + step, -1.0, 1.0);
  }
}

Eigen::MatrixXd Preconditioner::dense_t() const {
  const std::size_t ne = graph_->edge_count();
  if (ne > 2000) throw std::invalid_argument("dense_t: guard exceeded");
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(ne, ne);
  switch (kind_) {
    case PrecondKind::identity:
      t.setIdentity();
      break;
    case PrecondKind::diagonal:
      for (std::size_t e = 0; e < ne; ++e) t(e, e) = diag_[e];
      break;
    case PrecondKind::block_forest:
      for (const auto& forest : decomposition_.forests) {
        for (auto e : forest) {
          const Edge& ee = graph_->edge(e);
          for (auto g : forest) {
            const Edge& eg = graph_->edge(g);
            double inner = 0.0;
            if (e == g) {
              inner = 2.0;
            } else {
              if (ee.tail == eg.tail) inner += 1.0;
              if (ee.head == eg.head) inner += 1.0;
              if (ee.tail == eg.head) inner -= 1.0;
              if (ee.head == eg.tail) inner -= 1.0;
            }
            if (inner != 0.0)
              t(e, g) = graph_->weight(e) * graph_->weight(g) * inner;
          }
        }
      }
      break;
  }
  return t;
}

void Preconditioner::apply_normal_operator(std::span<const double> x,
                                           std::span<double> y) const {
  const std::size_t nv = graph_->vertex_count();
  if (x.size() != nv || y.size() != nv)
    throw std::invalid_argument("apply_normal_operator: dimension mismatch");
  if (kind_ == PrecondKind::block_forest) {
    std::fill(y.begin(), y.end(), 0.0);
    std::vector<double> q(nv);
    for (const auto& fs : structures_) {
      fs.project_onto_row_span(x, q);
      for (std::size_t i = 0; i < nv; ++i) y[i] += q[i];
    }
    return;
  }
  std::vector<double> p(graph_->edge_count());
  graph_->apply_k(x, p);
  if (kind_ == PrecondKind::diagonal)
    for (std::size_t e = 0; e < p.size(); ++e) p[e] /= diag_[e];
  graph_->apply_k_transpose(p, y);
}

double Preconditioner::operator_norm_sq() const {
  const std::size_t nv = graph_->vertex_count();
  std::vector<double> x(nv), y(nv);
  for (std::size_t i = 0; i < nv; ++i)
    x[i] = std::sin(static_cast<double>(i) + 1.0);
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : x) v /= norm;
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    apply_normal_operator(x, y);
    double ynorm = 0.0;
    for (double v : y) ynorm += v * v;
    ynorm = std::sqrt(ynorm);
    if (ynorm == 0.0) {
      lambda = 0.0;
      break;
    }
    const double prev = lambda;
    lambda = ynorm;  // Rayleigh quotient of normalized x: ||Mx|| >= x^T M x
    for (std::size_t i = 0; i < nv; ++i) x[i] = y[i] / ynorm;
    if (it > 3 && std::abs(lambda - prev) <= 1e-6 * lambda) break;
  }
  double est = lambda * 1.01;
  if (kind_ == PrecondKind::block_forest)
    est = std::min(est, static_cast<double>(decomposition_.forest_count()));
  if (kind_ == PrecondKind::identity && lambda == 0.0) est = 0.0;
  return est;
}

std::pair<double, double> Preconditioner::eigenvalue_bounds() const {
  const std::size_t ne = graph_->edge_count();
  switch (kind_) {
    case PrecondKind::identity:
      return {1.0, 1.0};
    case PrecondKind::diagonal: {
      double lo = diag_[0], hi = diag_[0];
      for (double d : diag_) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      return {lo, hi};
    }
    case PrecondKind::block_forest: {
      // Gershgorin upper bound per forest; lower bound from the path-graph
      // Fiedler value 4 sin^2(pi / (2 n)) scaled by the smallest weight^2.
      double hi = 0.0, lo = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < decomposition_.forest_count(); ++l) {
        const auto& forest = decomposition_.forests[l];
        std::vector<double> row_sum(ne, 0.0);
        std::vector<std::vector<std::uint32_t>> at_vertex(graph_->vertex_count());
        double wmin2 = std::numeric_limits<double>::infinity();
        for (auto e : forest) {
          at_vertex[graph_->edge(e).tail].push_back(e);
          at_vertex[graph_->edge(e).head].push_back(e);
          const double w = graph_->weight(e);
          wmin2 = std::min(wmin2, w * w);
          row_sum[e] += 2.0 * w * w;
        }
        for (const auto& incident : at_vertex)
          for (auto e : incident)
            for (auto g : incident)
              if (e != g) row_sum[e] += graph_->weight(e) * graph_->weight(g);
        for (auto e : forest) hi = std::max(hi, row_sum[e]);
        const auto& fs = structures_[l];
        std::size_t nmax = 1;
        std::vector<std::size_t> sizes(fs.tree_count(), 0);
        for (std::uint32_t v = 0; v < graph_->vertex_count(); ++v)
          ++sizes[fs.tree_of_vertex(v)];
        for (auto s : sizes) nmax = std::max(nmax, s);
        const double sn = std::sin(std::numbers::pi / (2.0 * static_cast<double>(nmax)));
        lo = std::min(lo, wmin2 * 4.0 * sn * sn);
      }
      return {lo, hi};
    }
  }
  return {1.0, 1.0};
}

}  // namespace graphtv
