#include "graphtv/forest.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace graphtv {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace

std::size_t ForestDecomposition::total_edges() const {
  std::size_t n = 0;
  for (const auto& f : forests) n += f.size();
  return n;
}

std::vector<std::uint32_t> ForestDecomposition::forest_of_edge(
    std::size_t edge_count) const {
  std::vector<std::uint32_t> map(edge_count, UINT32_MAX);
  for (std::size_t l = 0; l < forests.size(); ++l)
    for (auto e : forests[l]) {
      if (e >= edge_count) throw std::out_of_range("edge index in decomposition");
      map[e] = static_cast<std::uint32_t>(l);
    }
  return map;
}

EdgeVector partition_weights(const EdgeVector& p) {
  EdgeVector rho(p.size());
  for (std::size_t e = 0; e < p.size(); ++e)
    rho[e] = 1.0 - std::abs(1.0 - std::abs(p[e]));
  return rho;
}

std::vector<std::uint32_t> minimum_spanning_forest(
    const WeightedGraph& g, std::span<const double> rho,
    std::span<const std::uint32_t> edge_subset) {
  if (rho.size() != edge_subset.size())
    throw std::invalid_argument("minimum_spanning_forest: rho size mismatch");
  std::vector<std::uint32_t> order(edge_subset.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (rho[a] != rho[b]) return rho[a] < rho[b];
    return edge_subset[a] < edge_subset[b];
  });
  UnionFind uf(g.vertex_count());
  std::vector<std::uint32_t> picked;
  picked.reserve(edge_subset.size());
  for (auto i : order) {
    const Edge& ed = g.edge(edge_subset[i]);
    if (uf.unite(ed.tail, ed.head)) picked.push_back(edge_subset[i]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

ForestDecomposition greedy_inactively_nested(const WeightedGraph& g,
                                             const EdgeVector& p) {
  if (p.size() != g.edge_count())
    throw std::invalid_argument("greedy_inactively_nested: p size mismatch");
  const EdgeVector rho_all = partition_weights(p);
  std::vector<std::uint32_t> remaining(g.edge_count());
  std::iota(remaining.begin(), remaining.end(), 0u);
  ForestDecomposition d;
  while (!remaining.empty()) {
    std::vector<double> rho(remaining.size());
    for (std::size_t i = 0; i < remaining.size(); ++i)
      rho[i] = rho_all[remaining[i]];
    auto forest = minimum_spanning_forest(g, rho, remaining);
    std::vector<std::uint32_t> next;
    next.reserve(remaining.size() - forest.size());
    std::set_difference(remaining.begin(), remaining.end(), forest.begin(),
                        forest.end(), std::back_inserter(next));
    d.forests.push_back(std::move(forest));
    remaining = std::move(next);
  }
  return d;
}

ForestDecomposition fixed_nested_forest(const WeightedGraph& g) {
  return greedy_inactively_nested(g, EdgeVector(g.edge_count(), 0.0));
}

ForestDecomposition grid_chain_decomposition(const WeightedGraph& g) {
  const auto shape = g.grid();
  if (!shape) throw std::invalid_argument("chain decomposition needs a grid graph");
  if (shape->width < 2 || shape->height < 2)
    throw std::invalid_argument("chain decomposition needs both dims >= 2");
  const std::size_t nh = shape->height * (shape->width - 1);
  ForestDecomposition d;
  d.forests.resize(2);
  for (std::uint32_t e = 0; e < nh; ++e) d.forests[0].push_back(e);
  for (std::uint32_t e = static_cast<std::uint32_t>(nh); e < g.edge_count(); ++e)
    d.forests[1].push_back(e);
  return d;
}

ValidationReport validate(const ForestDecomposition& d, const WeightedGraph& g) {
  ValidationReport r;
  if (d.forests.empty()) {
    r.violations.push_back("decomposition has no forests");
    return r;
  }
  std::vector<std::uint32_t> seen(g.edge_count(), UINT32_MAX);
  for (std::size_t l = 0; l < d.forests.size(); ++l) {
    if (d.forests[l].empty())
      r.violations.push_back("forest " + std::to_string(l) + " is empty");
    UnionFind uf(g.vertex_count());
    for (auto e : d.forests[l]) {
      if (e >= g.edge_count()) {
        r.violations.push_back("edge index out of range in forest " +
                               std::to_string(l));
        continue;
      }
      if (seen[e] != UINT32_MAX)
        r.violations.push_back("edge " + std::to_string(e) +
                               " appears in forests " + std::to_string(seen[e]) +
                               " and " + std::to_string(l));
      seen[e] = static_cast<std::uint32_t>(l);
      if (!uf.unite(g.edge(e).tail, g.edge(e).head))
        r.violations.push_back("cycle through edge " + std::to_string(e) +
                               " in forest " + std::to_string(l));
    }
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    if (seen[e] == UINT32_MAX)
      r.violations.push_back("edge " + std::to_string(e) + " not covered");
  return r;
}

namespace {

constexpr double kRankTol = 1e-9;

Eigen::MatrixXd incidence_rows(const WeightedGraph& g,
                               const std::vector<std::uint32_t>& edges) {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(edges.size(), g.vertex_count());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    rows(i, g.edge(edges[i]).tail) = 1.0;
    rows(i, g.edge(edges[i]).head) = -1.0;
  }
  return rows;
}

std::size_t rank_of(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > kRankTol * s(0)) ++r;
  return r;
}

// span(rows of b) subseteq span(rows of a)?
bool span_contains(const Eigen::MatrixXd& a, std::size_t rank_a,
                   const Eigen::MatrixXd& b) {
  if (b.rows() == 0) return true;
  Eigen::MatrixXd stacked(a.rows() + b.rows(), a.cols());
  stacked << a, b;
  return rank_of(stacked) == rank_a;
}

}  // namespace

NestingProfile nesting_profile(const ForestDecomposition& d,
                               const WeightedGraph& g,
                               const std::vector<std::uint32_t>& inactive) {
  if (g.vertex_count() > 2000)
    throw std::invalid_argument("nesting_profile: dense guard exceeded");
  NestingProfile prof;
  prof.forest_count = d.forest_count();
  const std::size_t L = d.forest_count();
  if (L == 0) return prof;

  std::vector<char> is_inactive(g.edge_count(), 0);
  for (auto e : inactive) is_inactive.at(e) = 1;

  std::vector<Eigen::MatrixXd> rows(L);
  std::vector<std::size_t> dims(L);
  for (std::size_t l = 0; l < L; ++l) {
    std::vector<std::uint32_t> sel;
    for (auto e : d.forests[l])
      if (is_inactive[e]) sel.push_back(e);
    rows[l] = incidence_rows(g, sel);
    dims[l] = rank_of(rows[l]);
  }
  prof.span_dims = dims;

  // Leading plateau of spans equal to S_1.
  std::size_t lhat = 1;
  while (lhat < L && dims[lhat] == dims[0] &&
         span_contains(rows[0], dims[0], rows[lhat]))
    ++lhat;

  bool nested = dims[L - 1] > 0;
  if (lhat < L) {
    // Strict drop at the end of the plateau.
    nested = nested && dims[lhat] < dims[0] &&
             span_contains(rows[lhat - 1], dims[lhat - 1], rows[lhat]);
    // Weak chain afterwards.
    for (std::size_t l = lhat; l + 1 < L && nested; ++l)
      nested = span_contains(rows[l], dims[l], rows[l + 1]);
  }
  prof.nested = nested;
  if (nested) prof.lhat = lhat;
  return prof;
}

void write_decomposition(std::ostream& out, const ForestDecomposition& d) {
  for (const auto& forest : d.forests) {
    for (std::size_t i = 0; i < forest.size(); ++i)
      out << (i ? " " : "") << forest[i];
    out << "\n";
  }
}

ForestDecomposition read_decomposition(std::istream& in) {
  ForestDecomposition d;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::uint32_t> forest;
    std::uint32_t e = 0;
    while (ls >> e) forest.push_back(e);
    if (!forest.empty()) d.forests.push_back(std::move(forest));
  }
  return d;
}

}  // namespace graphtv
