#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace graphtv {

using VertexVector = std::vector<double>;
using EdgeVector = std::vector<double>;

// Edge orientation is fixed at construction: tail < head.
struct Edge {
  std::uint32_t tail;
  std::uint32_t head;
};

struct GridShape {
  std::size_t width;
  std::size_t height;
};

// Undirected weighted graph with a fixed edge order and orientation.
// Realizes the weighted incidence operator K = diag(w) * grad, where
// (grad u)_e = u_tail - u_head. Immutable after construction.
class WeightedGraph {
 public:
  WeightedGraph(std::size_t vertex_count, std::vector<Edge> edges,
                std::vector<double> weights);

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  double weight(std::size_t e) const { return weights_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& weights() const { return weights_; }

  // (K u)_e = w_e * (u_tail - u_head)
  void apply_k(std::span<const double> u, std::span<double> out) const;
  EdgeVector apply_k(std::span<const double> u) const;

  // (K^T p)_i = sum_{tail(e)=i} w_e p_e - sum_{head(e)=i} w_e p_e
  void apply_k_transpose(std::span<const double> p, std::span<double> out) const;
  VertexVector apply_k_transpose(std::span<const double> p) const;

  // sum_e w_e |u_tail - u_head|
  double total_variation(std::span<const double> u) const;

  // Copy with all edge weights multiplied by lambda > 0.
  WeightedGraph scaled(double lambda) const;

  bool is_connected() const;

  // Set by generate_grid; empty for all other constructions.
  std::optional<GridShape> grid() const { return grid_; }

 private:
  std::size_t vertex_count_;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  std::optional<GridShape> grid_;

  friend WeightedGraph generate_grid(std::size_t, std::size_t, double);
};

// 4-neighborhood grid; horizontal edges row-major first, then vertical
// edges column-major. Vertex (x, y) has index y * width + x.
WeightedGraph generate_grid(std::size_t width, std::size_t height,
                            double weight);

// Uniformly sampled simple graph with ne distinct edges; weights uniform
// in [weight_lo, weight_hi]. Deterministic for a fixed seed.
WeightedGraph generate_random_graph(std::size_t nv, std::size_t ne,
                                    double weight_lo, double weight_hi,
                                    std::uint64_t seed);

// Random simple graph, resampled (deterministically) until connected.
WeightedGraph generate_random_connected_graph(std::size_t nv, std::size_t ne,
                                              double weight_lo,
                                              double weight_hi,
                                              std::uint64_t seed);

struct BenchmarkInstance {
  WeightedGraph graph;
  VertexVector data;  // unary term f
};

// Reads either DIMACS max-flow ("p max n m", "a u v cap", "n i s|t") or the
// plain edge-list format ("V E" header, "tail head weight" lines, optional
// trailing f values). Terminal arcs of a max-flow instance become unary data
// f_i = cap(source->i) - cap(i->sink); parallel pairwise arcs are merged by
// summing capacities.
BenchmarkInstance load_benchmark(const std::string& path);

// Plain edge-list writer (the inverse of the edge-list reader).
void save_edge_list(const std::string& path, const WeightedGraph& g,
                    const VertexVector* f = nullptr);

}  // namespace graphtv
