#include "graphtv/tree_prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graphtv {

double PwlMessage::value(double x) const {
  std::size_t i =
      std::upper_bound(bp_.begin(), bp_.end(), x) - bp_.begin();
  return (slope_[i] + da_) * x + (intercept_[i] + db_);
}

void PwlMessage::flush() {
  if (da_ == 0.0 && db_ == 0.0) return;
  for (std::size_t i = 0; i < slope_.size(); ++i) {
    slope_[i] += da_;
    intercept_[i] += db_;
  }
  da_ = db_ = 0.0;
}

void PwlMessage::merge(PwlMessage&& other) {
  if (other.is_zero_function()) return;
  if (is_zero_function()) {
    *this = std::move(other);
    return;
  }
  flush();
  other.flush();
  std::vector<double> bp;
  std::vector<double> slope, intercept;
  bp.reserve(bp_.size() + other.bp_.size());
  slope.reserve(bp_.size() + other.bp_.size() + 1);
  intercept.reserve(bp_.size() + other.bp_.size() + 1);
  std::size_t i = 0, j = 0;
  slope.push_back(slope_[0] + other.slope_[0]);
  intercept.push_back(intercept_[0] + other.intercept_[0]);
  while (i < bp_.size() || j < other.bp_.size()) {
    double x;
    if (j >= other.bp_.size() || (i < bp_.size() && bp_[i] < other.bp_[j])) {
      x = bp_[i++];
    } else if (i >= bp_.size() || other.bp_[j] < bp_[i]) {
      x = other.bp_[j++];
    } else {
      x = bp_[i];
      ++i;
      ++j;
    }
    bp.push_back(x);
    slope.push_back(slope_[i] + other.slope_[j]);
    intercept.push_back(intercept_[i] + other.intercept_[j]);
  }
  bp_ = std::move(bp);
  slope_ = std::move(slope);
  intercept_ = std::move(intercept);
}

std::pair<double, double> PwlMessage::clip(double w) {
  flush();
  const std::size_t n = slope_.size();
  // First piece whose right-end value reaches -w.
  std::size_t lo = 0;
  while (lo + 1 < n && slope_[lo] * bp_[lo] + intercept_[lo] < -w) ++lo;
  const double lam_lo = (-w - intercept_[lo]) / slope_[lo];
  // Last piece whose left-end value is still below +w.
  std::size_t hi = n - 1;
  while (hi > 0 && slope_[hi] * bp_[hi - 1] + intercept_[hi] > w) --hi;
  const double lam_hi = (w - intercept_[hi]) / slope_[hi];

  std::vector<double> bp, slope, intercept;
  bp.reserve(hi - lo + 2);
  slope.reserve(hi - lo + 3);
  intercept.reserve(hi - lo + 3);
  slope.push_back(0.0);
  intercept.push_back(-w);
  bp.push_back(lam_lo);
  if (lam_hi > lam_lo) {
    slope.push_back(slope_[lo]);
    intercept.push_back(intercept_[lo]);
    for (std::size_t k = lo; k < hi; ++k) {
      if (bp_[k] <= lam_lo) {  // tie at the window's left end
        slope.back() = slope_[k + 1];
        intercept.back() = intercept_[k + 1];
      } else if (bp_[k] < lam_hi) {
        bp.push_back(bp_[k]);
        slope.push_back(slope_[k + 1]);
        intercept.push_back(intercept_[k + 1]);
      } else {
        break;
      }
    }
    bp.push_back(lam_hi);
  }
  slope.push_back(0.0);
  intercept.push_back(w);
  bp_ = std::move(bp);
  slope_ = std::move(slope);
  intercept_ = std::move(intercept);
  return {lam_lo, lam_hi};
}

double PwlMessage::solve_zero() const {
  const std::size_t n = slope_.size();
  std::size_t i = 0;
  while (i + 1 < n &&
         (slope_[i] + da_) * bp_[i] + (intercept_[i] + db_) < 0.0)
    ++i;
  const double a = slope_[i] + da_;
  if (!(a > 0.0)) throw std::logic_error("message has a flat crossing piece");
  return -(intercept_[i] + db_) / a;
}

ForestStructure::ForestStructure(const WeightedGraph& g,
                                 std::span<const std::uint32_t> edges)
    : graph_(&g), edges_(edges.begin(), edges.end()) {
  const std::size_t nv = g.vertex_count();
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj(nv);
  for (auto e : edges_) {
    if (e >= g.edge_count())
      throw std::invalid_argument("forest edge index out of range");
    const Edge& ed = g.edge(e);
    adj[ed.tail].push_back({ed.head, e});
    adj[ed.head].push_back({ed.tail, e});
  }
  parent_edge_.assign(nv, npos);
  parent_vertex_.assign(nv, npos);
  tree_of_vertex_.assign(nv, npos);
  order_.reserve(nv);
  std::size_t edges_seen = 0;
  for (std::uint32_t r = 0; r < nv; ++r) {
    if (tree_of_vertex_[r] != npos) continue;
    const auto tree = static_cast<std::uint32_t>(tree_sizes_.size());
    tree_sizes_.push_back(0);
    std::size_t qhead = order_.size();
    order_.push_back(r);
    tree_of_vertex_[r] = tree;
    while (qhead < order_.size()) {
      const std::uint32_t v = order_[qhead++];
      ++tree_sizes_[tree];
      for (auto [w, e] : adj[v]) {
        if (e == parent_edge_[v]) continue;
        if (tree_of_vertex_[w] != npos)
          throw std::invalid_argument("edge subset contains a cycle");
        tree_of_vertex_[w] = tree;
        parent_vertex_[w] = v;
        parent_edge_[w] = e;
        order_.push_back(w);
      }
    }
  }
  edges_seen = 0;
  for (auto s : tree_sizes_) edges_seen += s - 1;
  if (edges_seen != edges_.size())
    throw std::invalid_argument("edge subset contains a duplicate edge");
}

void ForestStructure::tv_prox(std::span<const double> f,
                              std::span<double> v) const {
  const std::size_t nv = graph_->vertex_count();
  if (f.size() != nv || v.size() != nv)
    throw std::invalid_argument("tv_prox: dimension mismatch");
  std::vector<PwlMessage> acc(nv);
  std::vector<double> lam_lo(nv), lam_hi(nv);
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    const std::uint32_t x = *it;
    PwlMessage h = std::move(acc[x]);
    h.add_affine(1.0, -f[x]);
    if (parent_vertex_[x] == npos) {
      v[x] = h.solve_zero();
    } else {
      const double w = graph_->weight(parent_edge_[x]);
      auto [lo, hi] = h.clip(w);
      lam_lo[x] = lo;
      lam_hi[x] = hi;
      acc[parent_vertex_[x]].merge(std::move(h));
    }
  }
  for (auto x : order_) {
    if (parent_vertex_[x] == npos) continue;
    v[x] = std::clamp(v[parent_vertex_[x]], lam_lo[x], lam_hi[x]);
  }
}

void ForestStructure::dual_from_primal(std::span<const double> f,
                                       std::span<const double> v,
                                       std::span<double> p) const {
  const std::size_t nv = graph_->vertex_count();
  if (f.size() != nv || v.size() != nv || p.size() != graph_->edge_count())
    throw std::invalid_argument("dual_from_primal: dimension mismatch");
  // acc[x] collects the signed contributions of already-eliminated edges to
  // vertex x's equation (K_l^T p)_x = (v - f)_x.
  std::vector<double> acc(nv, 0.0);
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    const std::uint32_t x = *it;
    const double rhs = v[x] - f[x] - acc[x];
    if (parent_vertex_[x] == npos) {
      if (std::abs(rhs) > 1e-6)
        throw std::runtime_error("dual_from_primal: inconsistent primal input");
      continue;
    }
    const std::uint32_t e = parent_edge_[x];
    const double w = graph_->weight(e);
    const double sign = (graph_->edge(e).tail == x) ? 1.0 : -1.0;
    double pe = rhs / (sign * w);
    acc[parent_vertex_[x]] += -sign * w * pe;
    p[e] = std::clamp(pe, -1.0, 1.0);
  }
}

void ForestStructure::box_qp(std::span<const double> f, std::span<double> p,
                             std::span<double> v_scratch) const {
  tv_prox(f, v_scratch);
  dual_from_primal(f, v_scratch, p);
}

void ForestStructure::apply_k_transpose_forest(std::span<const double> p,
                                               std::span<double> out) const {
  if (p.size() != graph_->edge_count() || out.size() != graph_->vertex_count())
    throw std::invalid_argument("apply_k_transpose_forest: dimension mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (auto e : edges_) {
    const double wp = graph_->weight(e) * p[e];
    out[graph_->edge(e).tail] += wp;
    out[graph_->edge(e).head] -= wp;
  }
}

void ForestStructure::project_onto_row_span(std::span<const double> x,
                                            std::span<double> out) const {
  const std::size_t nv = graph_->vertex_count();
  if (x.size() != nv || out.size() != nv)
    throw std::invalid_argument("project_onto_row_span: dimension mismatch");
  std::vector<double> mean(tree_sizes_.size(), 0.0);
  for (std::size_t v = 0; v < nv; ++v) mean[tree_of_vertex_[v]] += x[v];
  for (std::size_t t = 0; t < mean.size(); ++t) mean[t] /= tree_sizes_[t];
  for (std::size_t v = 0; v < nv; ++v) out[v] = x[v] - mean[tree_of_vertex_[v]];
}

}  // namespace graphtv
