#include "graphtv/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace graphtv {

WeightedGraph::WeightedGraph(std::size_t vertex_count, std::vector<Edge> edges,
                             std::vector<double> weights)
    : vertex_count_(vertex_count),
      edges_(std::move(edges)),
      weights_(std::move(weights)) {
  if (vertex_count_ < 1) throw std::invalid_argument("graph needs >= 1 vertex");
  if (edges_.size() != weights_.size())
    throw std::invalid_argument("edge/weight count mismatch");
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto& ed = edges_[e];
    if (ed.tail == ed.head)
      throw std::invalid_argument("self-loop at edge " + std::to_string(e));
    if (ed.tail >= vertex_count_ || ed.head >= vertex_count_)
      throw std::invalid_argument("vertex index out of range at edge " +
                                  std::to_string(e));
    if (ed.tail > ed.head) std::swap(ed.tail, ed.head);
    if (!(weights_[e] > 0.0) || !std::isfinite(weights_[e]))
      throw std::invalid_argument("non-positive weight at edge " +
                                  std::to_string(e));
  }
}

void WeightedGraph::apply_k(std::span<const double> u,
                            std::span<double> out) const {
  if (u.size() != vertex_count_ || out.size() != edges_.size())
    throw std::invalid_argument("apply_k: dimension mismatch");
  for (std::size_t e = 0; e < edges_.size(); ++e)
    out[e] = weights_[e] * (u[edges_[e].tail] - u[edges_[e].head]);
}

EdgeVector WeightedGraph::apply_k(std::span<const double> u) const {
  EdgeVector out(edges_.size());
  apply_k(u, out);
  return out;
}

void WeightedGraph::apply_k_transpose(std::span<const double> p,
                                      std::span<double> out) const {
  if (p.size() != edges_.size() || out.size() != vertex_count_)
    throw std::invalid_argument("apply_k_transpose: dimension mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const double wp = weights_[e] * p[e];
    out[edges_[e].tail] += wp;
    out[edges_[e].head] -= wp;
  }
}

VertexVector WeightedGraph::apply_k_transpose(std::span<const double> p) const {
  VertexVector out(vertex_count_);
  apply_k_transpose(p, out);
  return out;
}

double WeightedGraph::total_variation(std::span<const double> u) const {
  if (u.size() != vertex_count_)
    throw std::invalid_argument("total_variation: dimension mismatch");
  double tv = 0.0;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    tv += weights_[e] * std::abs(u[edges_[e].tail] - u[edges_[e].head]);
  return tv;
}

WeightedGraph WeightedGraph::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("scale must be positive");
  std::vector<double> w = weights_;
  for (double& x : w) x *= lambda;
  WeightedGraph g(vertex_count_, edges_, std::move(w));
  g.grid_ = grid_;
  return g;
}

bool WeightedGraph::is_connected() const {
  std::vector<std::vector<std::uint32_t>> adj(vertex_count_);
  for (const auto& e : edges_) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  std::vector<char> seen(vertex_count_, 0);
  std::vector<std::uint32_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == vertex_count_;
}

WeightedGraph generate_grid(std::size_t width, std::size_t height,
                            double weight) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("grid dimensions must be >= 1");
  std::vector<Edge> edges;
  edges.reserve(height * (width - 1) + width * (height - 1));
  auto id = [width](std::size_t x, std::size_t y) {
    return static_cast<std::uint32_t>(y * width + x);
  };
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x + 1 < width; ++x)
      edges.push_back({id(x, y), id(x + 1, y)});
  for (std::size_t x = 0; x < width; ++x)
    for (std::size_t y = 0; y + 1 < height; ++y)
      edges.push_back({id(x, y), id(x, y + 1)});
  std::vector<double> w(edges.size(), weight);
  WeightedGraph g(width * height, std::move(edges), std::move(w));
  g.grid_ = GridShape{width, height};
  return g;
}

WeightedGraph generate_random_graph(std::size_t nv, std::size_t ne,
                                    double weight_lo, double weight_hi,
                                    std::uint64_t seed) {
  if (nv < 1) throw std::invalid_argument("need >= 1 vertex");
  const std::size_t cap = nv * (nv - 1) / 2;
  if (ne > cap)
    throw std::invalid_argument("requested more edges than a simple graph holds");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0,
                                                    static_cast<std::uint32_t>(nv - 1));
  std::uniform_real_distribution<double> wdist(weight_lo, weight_hi);
  std::unordered_map<std::uint64_t, bool> used;
  used.reserve(ne * 2);
  std::vector<Edge> edges;
  edges.reserve(ne);
  while (edges.size() < ne) {
    std::uint32_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    if (used.emplace(key, true).second) edges.push_back({a, b});
  }
  std::vector<double> w(ne);
  for (auto& x : w) {
    x = wdist(rng);
    if (!(x > 0.0)) x = 0.5 * (weight_lo + weight_hi);  // degenerate range guard
  }
  return WeightedGraph(nv, std::move(edges), std::move(w));
}

WeightedGraph generate_random_connected_graph(std::size_t nv, std::size_t ne,
                                              double weight_lo, double weight_hi,
                                              std::uint64_t seed) {
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    WeightedGraph g =
        generate_random_graph(nv, ne, weight_lo, weight_hi, seed + attempt * 0x9e3779b9ULL);
    if (g.is_connected()) return g;
  }
  throw std::runtime_error("could not sample a connected graph");
}

namespace {

BenchmarkInstance load_edge_list(std::istream& in) {
  std::size_t nv = 0, ne = 0;
  if (!(in >> nv >> ne)) throw std::runtime_error("edge list: malformed header");
  std::vector<Edge> edges;
  std::vector<double> weights;
  edges.reserve(ne);
  weights.reserve(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    std::size_t a = 0, b = 0;
    double w = 0;
    if (!(in >> a >> b >> w))
      throw std::runtime_error("edge list: truncated edge section");
    if (a < 1 || b < 1 || a > nv || b > nv)
      throw std::runtime_error("edge list: vertex index out of range");
    edges.push_back({static_cast<std::uint32_t>(a - 1),
                     static_cast<std::uint32_t>(b - 1)});
    weights.push_back(w);
  }
  VertexVector f(nv, 0.0);
  double v = 0;
  std::size_t got = 0;
  while (got < nv && (in >> v)) f[got++] = v;
  if (got != 0 && got != nv)
    throw std::runtime_error("edge list: partial data vector");
  return {WeightedGraph(nv, std::move(edges), std::move(weights)), std::move(f)};
}

BenchmarkInstance load_dimacs(std::istream& in) {
  std::string line;
  std::size_t n = 0, m = 0;
  long source = -1, sink = -1;
  bool have_problem = false;
  struct Arc {
    std::size_t u, v;
    double cap;
  };
  std::vector<Arc> arcs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    char tag = 0;
    ls >> tag;
    switch (tag) {
      case 'c':
        break;
      case 'p': {
        std::string kind;
        if (!(ls >> kind >> n >> m) || kind != "max")
          throw std::runtime_error("dimacs: malformed problem line");
        have_problem = true;
        break;
      }
      case 'n': {
        std::size_t id = 0;
        char which = 0;
        if (!(ls >> id >> which) || id < 1 || id > n)
          throw std::runtime_error("dimacs: malformed node descriptor");
        if (which == 's')
          source = static_cast<long>(id);
        else if (which == 't')
          sink = static_cast<long>(id);
        else
          throw std::runtime_error("dimacs: unknown terminal kind");
        break;
      }
      case 'a': {
        std::size_t u = 0, v = 0;
        double cap = 0;
        if (!(ls >> u >> v >> cap))
          throw std::runtime_error("dimacs: malformed arc");
        if (u < 1 || v < 1 || u > n || v > n)
          throw std::runtime_error("dimacs: arc endpoint out of range");
        arcs.push_back({u, v, cap});
        break;
      }
      default:
        throw std::runtime_error("dimacs: unknown line tag");
    }
  }
  if (!have_problem) throw std::runtime_error("dimacs: missing problem line");
  if (arcs.empty()) throw std::runtime_error("dimacs: instance has no arcs");
  if (source < 0 || sink < 0)
    throw std::runtime_error("dimacs: missing source or sink");

  // Reindex non-terminal vertices 0..nv-1 preserving order.
  std::vector<long> remap(n + 1, -1);
  std::size_t nv = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (static_cast<long>(i) != source && static_cast<long>(i) != sink)
      remap[i] = static_cast<long>(nv++);
  if (nv == 0) throw std::runtime_error("dimacs: no non-terminal vertices");

  VertexVector f(nv, 0.0);
  std::unordered_map<std::uint64_t, double> merged;
  for (const auto& a : arcs) {
    const bool u_src = static_cast<long>(a.u) == source;
    const bool u_snk = static_cast<long>(a.u) == sink;
    const bool v_src = static_cast<long>(a.v) == source;
    const bool v_snk = static_cast<long>(a.v) == sink;
    if ((u_src || u_snk) && (v_src || v_snk)) continue;  // s-t arc: constant
    if (u_src) {
      f[remap[a.v]] += a.cap;
    } else if (v_src) {
      f[remap[a.u]] += a.cap;
    } else if (v_snk) {
      f[remap[a.u]] -= a.cap;
    } else if (u_snk) {
      f[remap[a.v]] -= a.cap;
    } else {
      if (a.u == a.v) throw std::runtime_error("dimacs: self-loop arc");
      std::uint32_t x = static_cast<std::uint32_t>(remap[a.u]);
      std::uint32_t y = static_cast<std::uint32_t>(remap[a.v]);
      if (x > y) std::swap(x, y);
      merged[(static_cast<std::uint64_t>(x) << 32) | y] += a.cap;
    }
  }
  std::vector<std::uint64_t> keys;
  keys.reserve(merged.size());
  for (const auto& [k, _] : merged) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  std::vector<Edge> edges;
  std::vector<double> weights;
  edges.reserve(keys.size());
  for (auto k : keys) {
    const double w = merged[k];
    if (!(w > 0.0))
      throw std::runtime_error("dimacs: merged edge weight is not positive");
    edges.push_back({static_cast<std::uint32_t>(k >> 32),
                     static_cast<std::uint32_t>(k & 0xffffffffu)});
    weights.push_back(w);
  }
  return {WeightedGraph(nv, std::move(edges), std::move(weights)), std::move(f)};
}

}  // namespace

BenchmarkInstance load_benchmark(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  // Peek the first non-blank character: DIMACS starts with a tag letter.
  char c = 0;
  std::istream::pos_type start = in.tellg();
  while (in.get(c) && (c == ' ' || c == '\n' || c == '\t' || c == '\r')) {
  }
  in.seekg(start);
  if (c == 'c' || c == 'p' || c == 'n' || c == 'a') return load_dimacs(in);
  return load_edge_list(in);
}

void save_edge_list(const std::string& path, const WeightedGraph& g,
                    const VertexVector* f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << g.vertex_count() << " " << g.edge_count() << "\n";
  out.precision(17);
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    out << g.edge(e).tail + 1 << " " << g.edge(e).head + 1 << " " << g.weight(e)
        << "\n";
  if (f) {
    if (f->size() != g.vertex_count())
      throw std::invalid_argument("save_edge_list: data vector length");
    for (double v : *f) out << v << "\n";
  }
}

}  // namespace graphtv
