#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "graphtv/forest.hpp"
#include "graphtv/graph.hpp"
#include "graphtv/testkit.hpp"
#include "graphtv/tree_prox.hpp"

using namespace graphtv;

namespace {

std::vector<std::uint32_t> all_edges(const WeightedGraph& g) {
  std::vector<std::uint32_t> v(g.edge_count());
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

// random tree on n vertices: vertex i attaches to a random earlier vertex
WeightedGraph random_tree(std::size_t n, std::uint64_t seed, double wlo,
                          double whi) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  std::uniform_real_distribution<double> wdist(wlo, whi);
  std::vector<double> w;
  for (std::uint32_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::uint32_t> pick(0, i - 1);
    edges.push_back({pick(rng), i});
    w.push_back(wdist(rng));
  }
  return WeightedGraph(n, std::move(edges), std::move(w));
}

}  // namespace

TEST_CASE("single edge closed form") {
  WeightedGraph g(2, {{0, 1}}, {0.5});
  ForestStructure fs(g, all_edges(g));
  std::vector<double> f{3.0, 1.0}, v(2);
  fs.tv_prox(f, v);
  // v = f -/+ s with s = clamp((f1-f2)/2, +-w)
  CHECK(v[0] == doctest::Approx(2.5));
  CHECK(v[1] == doctest::Approx(1.5));

  std::vector<double> p(1, 0.0);
  fs.dual_from_primal(f, v, p);
  CHECK(p[0] == doctest::Approx(-1.0));

  WeightedGraph g2(2, {{0, 1}}, {2.0});
  ForestStructure fs2(g2, all_edges(g2));
  fs2.tv_prox(f, v);
  CHECK(v[0] == doctest::Approx(2.0));
  CHECK(v[1] == doctest::Approx(2.0));
}

TEST_CASE("constant signal is a fixed point") {
  auto g = random_tree(12, 3, 0.2, 1.5);
  ForestStructure fs(g, all_edges(g));
  std::vector<double> f(12, 0.7), v(12);
  fs.tv_prox(f, v);
  for (double x : v) CHECK(x == doctest::Approx(0.7));

  std::vector<double> p(g.edge_count(), 99.0);
  fs.dual_from_primal(f, v, p);
  for (double x : p) CHECK(x == doctest::Approx(0.0));
}

TEST_CASE("tree prox matches the enumeration oracle") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> fdist(-2.0, 2.0);
  std::uniform_int_distribution<std::size_t> ndist(2, 10);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = ndist(rng);
    auto g = random_tree(n, 1000 + trial, 0.1, 2.0);
    ForestStructure fs(g, all_edges(g));
    std::vector<double> f(n), v(n);
    for (auto& x : f) x = fdist(rng);
    fs.tv_prox(f, v);

    auto oracle = exact_box_qp(dense_k(g), f);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(v[i] - oracle.u[i]) <= 1e-8);

    std::vector<double> p(g.edge_count(), 0.0);
    fs.dual_from_primal(f, v, p);
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      CHECK(std::abs(p[e] - oracle.p[e]) <= 1e-7);
  }
}

TEST_CASE("dual retrieval: complementarity and feasibility") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> fdist(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = random_tree(15, 500 + trial, 0.05, 0.8);
    ForestStructure fs(g, all_edges(g));
    std::vector<double> f(15), v(15), p(g.edge_count(), 0.0);
    for (auto& x : f) x = fdist(rng);
    fs.tv_prox(f, v);
    fs.dual_from_primal(f, v, p);
    auto kv = g.apply_k(v);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      CHECK(std::abs(p[e]) <= 1.0);
      if (std::abs(kv[e]) > 1e-9) {
        CHECK(p[e] == doctest::Approx(-(kv[e] > 0 ? 1.0 : -1.0)).epsilon(1e-7));
      }
    }
    // K^T p = v - f residual
    auto ktp = g.apply_k_transpose(p);
    for (std::size_t i = 0; i < v.size(); ++i)
      CHECK(std::abs(ktp[i] - (v[i] - f[i])) <= 1e-8);
  }
}

TEST_CASE("dual retrieval rejects inconsistent primal") {
  WeightedGraph g(3, {{0, 1}, {1, 2}}, {1.0, 1.0});
  ForestStructure fs(g, all_edges(g));
  std::vector<double> f{1.0, 2.0, 3.0}, v{5.0, -5.0, 7.0}, p(2);
  CHECK_THROWS(fs.dual_from_primal(f, v, p));
}

TEST_CASE("box qp basics") {
  auto g = random_tree(8, 21, 0.3, 1.0);
  ForestStructure fs(g, all_edges(g));
  std::vector<double> f(8, 0.0), p(g.edge_count(), 5.0), scratch(8);
  fs.box_qp(f, p, scratch);
  for (double x : p) CHECK(x == doctest::Approx(0.0));

  // huge f saturates the box
  std::vector<double> fh(8);
  for (std::size_t i = 0; i < 8; ++i) fh[i] = (i % 2) ? 1e4 : -1e4;
  fs.box_qp(fh, p, scratch);
  double pmax = 0.0;
  for (double x : p) pmax = std::max(pmax, std::abs(x));
  CHECK(pmax == doctest::Approx(1.0));
}

TEST_CASE("box qp against the enumeration oracle on forests") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> fdist(-3.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    // forest: two disjoint trees
    auto t1 = random_tree(5, 300 + trial, 0.2, 1.5);
    std::vector<Edge> edges = t1.edges();
    std::vector<double> w = t1.weights();
    auto t2 = random_tree(4, 600 + trial, 0.2, 1.5);
    for (std::size_t e = 0; e < t2.edge_count(); ++e) {
      edges.push_back({t2.edge(e).tail + 5, t2.edge(e).head + 5});
      w.push_back(t2.weight(e));
    }
    WeightedGraph g(9, edges, w);
    ForestStructure fs(g, all_edges(g));
    std::vector<double> f(9), p(g.edge_count(), 0.0), scratch(9);
    for (auto& x : f) x = fdist(rng);
    fs.box_qp(f, p, scratch);
    auto oracle = exact_box_qp(dense_k(g), f);
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      CHECK(std::abs(p[e] - oracle.p[e]) <= 1e-8);
  }
}

TEST_CASE("prox is 1-Lipschitz in the signal") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> dist;
  auto g = random_tree(20, 44, 0.2, 2.0);
  ForestStructure fs(g, all_edges(g));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> f1(20), f2(20), v1(20), v2(20);
    for (std::size_t i = 0; i < 20; ++i) {
      f1[i] = dist(rng);
      f2[i] = f1[i] + 0.3 * dist(rng);
    }
    fs.tv_prox(f1, v1);
    fs.tv_prox(f2, v2);
    double dv = 0, df = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      dv += (v1[i] - v2[i]) * (v1[i] - v2[i]);
      df += (f1[i] - f2[i]) * (f1[i] - f2[i]);
    }
    CHECK(dv <= df * (1.0 + 1e-12));
  }
}

TEST_CASE("forest structure rejects cycles and duplicates") {
  WeightedGraph tri(3, {{0, 1}, {1, 2}, {0, 2}}, {1, 1, 1});
  CHECK_THROWS(ForestStructure(tri, all_edges(tri)));
  std::vector<std::uint32_t> dup{0, 0};
  CHECK_THROWS(ForestStructure(tri, dup));
}

TEST_CASE("tree order does not change results bitwise") {
  // two disjoint trees presented in either order
  std::vector<Edge> t1{{0, 1}, {1, 2}, {1, 3}};
  std::vector<Edge> t2{{4, 5}, {5, 6}};
  std::vector<Edge> edges = t1;
  edges.insert(edges.end(), t2.begin(), t2.end());
  WeightedGraph g(7, edges, {0.4, 0.9, 0.3, 1.1, 0.6});
  std::vector<std::uint32_t> order_a{0, 1, 2, 3, 4};
  std::vector<std::uint32_t> order_b{3, 4, 0, 1, 2};
  ForestStructure fa(g, order_a), fb(g, order_b);
  std::vector<double> f{0.3, -1.2, 0.8, 0.1, 2.0, -0.5, 0.9};
  std::vector<double> va(7), vb(7), pa(5, 0.0), pb(5, 0.0);
  fa.tv_prox(f, va);
  fb.tv_prox(f, vb);
  for (std::size_t i = 0; i < 7; ++i) CHECK(va[i] == vb[i]);  // bitwise
  fa.dual_from_primal(f, va, pa);
  fb.dual_from_primal(f, vb, pb);
  for (std::size_t e = 0; e < 5; ++e) CHECK(pa[e] == pb[e]);
}

TEST_CASE("subgradient optimality of the tv prox") {
  // v - f + K^T q = 0 with q in [-1,1], q = sign(K v) where K v != 0;
  // q is exactly the negated retrieved dual.
  auto g = random_tree(10, 77, 0.1, 1.0);
  ForestStructure fs(g, all_edges(g));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> dist;
  std::vector<double> f(10), v(10), p(g.edge_count());
  for (auto& x : f) x = dist(rng);
  fs.tv_prox(f, v);
  fs.dual_from_primal(f, v, p);
  std::vector<double> q(g.edge_count());
  for (std::size_t e = 0; e < q.size(); ++e) q[e] = -p[e];
  auto ktq = g.apply_k_transpose(q);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(std::abs(v[i] - f[i] + ktq[i]) <= 1e-8);
}
