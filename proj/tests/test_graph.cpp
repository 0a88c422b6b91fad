#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "graphtv/graph.hpp"

using namespace graphtv;

namespace {

WeightedGraph chain3(std::vector<double> w) {
  return WeightedGraph(3, {{0, 1}, {1, 2}}, std::move(w));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("apply_k on a 3-chain") {
  auto g = chain3({1.0, 1.0});
  auto ku = g.apply_k(std::vector<double>{3.0, 1.0, 2.0});
  CHECK(ku[0] == doctest::Approx(2.0));
  CHECK(ku[1] == doctest::Approx(-1.0));

  auto g2 = chain3({2.0, 1.0});
  auto ku2 = g2.apply_k(std::vector<double>{3.0, 1.0, 2.0});
  CHECK(ku2[0] == doctest::Approx(4.0));
  CHECK(ku2[1] == doctest::Approx(-1.0));
}

TEST_CASE("constants lie in the kernel") {
  auto g = generate_random_graph(20, 40, 0.5, 2.0, 7);
  std::vector<double> ones(20, 3.14);
  for (double v : g.apply_k(ones)) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("apply_k_transpose basics") {
  WeightedGraph single(2, {{0, 1}}, {1.0});
  auto out = single.apply_k_transpose(std::vector<double>{1.0});
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(-1.0));

  auto g = chain3({1.0, 1.0});
  auto kt = g.apply_k_transpose(std::vector<double>{1.0, 1.0});
  CHECK(kt[0] == doctest::Approx(1.0));
  CHECK(kt[1] == doctest::Approx(0.0));
  CHECK(kt[2] == doctest::Approx(-1.0));
}

TEST_CASE("adjoint identity on random graphs") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    auto g = generate_random_graph(15, 30, 0.1, 2.0, 100 + trial);
    std::vector<double> u(g.vertex_count()), p(g.edge_count());
    for (auto& x : u) x = dist(rng);
    for (auto& x : p) x = dist(rng);
    const double lhs = dot(g.apply_k(u), p);
    const double rhs = dot(u, g.apply_k_transpose(p));
    const double scale = std::abs(lhs) + std::abs(rhs) + 1.0;
    CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
  }
}

TEST_CASE("grid generator shapes and counts") {
  auto g22 = generate_grid(2, 2, 1.0);
  CHECK(g22.vertex_count() == 4);
  CHECK(g22.edge_count() == 4);

  auto g43 = generate_grid(4, 3, 1.0);
  CHECK(g43.vertex_count() == 12);
  CHECK(g43.edge_count() == 17);

  auto big = generate_grid(100, 100, 1.0);
  CHECK(big.edge_count() == 19800);

  CHECK(g43.grid().has_value());
  CHECK(g43.grid()->width == 4);
  CHECK_THROWS(generate_grid(0, 3, 1.0));
}

TEST_CASE("grid edge order: horizontal row-major then vertical column-major") {
  auto g = generate_grid(3, 2, 1.0);
  // horizontal: (0,1),(1,2),(3,4),(4,5); vertical: (0,3),(1,4),(2,5)
  CHECK(g.edge(0).tail == 0);
  CHECK(g.edge(0).head == 1);
  CHECK(g.edge(2).tail == 3);
  CHECK(g.edge(2).head == 4);
  CHECK(g.edge(4).tail == 0);
  CHECK(g.edge(4).head == 3);
  CHECK(g.edge(6).tail == 2);
  CHECK(g.edge(6).head == 5);
}

TEST_CASE("random graph generator") {
  auto g = generate_random_graph(512, 2560, 0.0, 1.0, 42);
  CHECK(g.vertex_count() == 512);
  CHECK(g.edge_count() == 2560);
  CHECK(static_cast<double>(g.edge_count()) / g.vertex_count() ==
        doctest::Approx(5.0));

  auto tri = generate_random_graph(3, 3, 0.5, 1.5, 9);
  CHECK(tri.edge_count() == 3);  // the triangle is the only simple choice

  auto a = generate_random_graph(30, 60, 0.1, 1.0, 123);
  auto b = generate_random_graph(30, 60, 0.1, 1.0, 123);
  for (std::size_t e = 0; e < a.edge_count(); ++e) {
    CHECK(a.edge(e).tail == b.edge(e).tail);
    CHECK(a.edge(e).head == b.edge(e).head);
    CHECK(a.weight(e) == b.weight(e));
  }
  CHECK_THROWS(generate_random_graph(3, 4, 0.0, 1.0, 1));
}

TEST_CASE("graph constructor validation") {
  CHECK_THROWS(WeightedGraph(3, {{0, 0}}, {1.0}));           // self loop
  CHECK_THROWS(WeightedGraph(3, {{0, 5}}, {1.0}));           // range
  CHECK_THROWS(WeightedGraph(3, {{0, 1}}, {0.0}));           // weight
  CHECK_THROWS(WeightedGraph(3, {{0, 1}}, {1.0, 2.0}));      // count mismatch
  WeightedGraph g(3, {{2, 0}}, {1.0});                       // reorients
  CHECK(g.edge(0).tail == 0);
  CHECK(g.edge(0).head == 2);
}

TEST_CASE("dimacs loading with terminal mapping") {
  const char* path = "test_dimacs_toy.max";
  {
    std::ofstream f(path);
    f << "c toy instance\n"
         "p max 4 3\n"
         "n 3 s\n"
         "n 4 t\n"
         "a 3 1 3\n"
         "a 1 4 1\n"
         "a 1 2 2\n";
  }
  auto inst = load_benchmark(path);
  CHECK(inst.graph.vertex_count() == 2);
  CHECK(inst.graph.edge_count() == 1);
  CHECK(inst.graph.weight(0) == doctest::Approx(2.0));
  CHECK(inst.data[0] == doctest::Approx(2.0));  // 3 - 1
  CHECK(inst.data[1] == doctest::Approx(0.0));
  std::remove(path);
}

TEST_CASE("dimacs parallel arcs merge and errors") {
  const char* path = "test_dimacs_merge.max";
  {
    std::ofstream f(path);
    f << "p max 4 4\n"
         "n 1 s\nn 2 t\n"
         "a 3 4 1.5\n"
         "a 4 3 0.5\n"
         "a 1 3 1\n"
         "a 4 2 2\n";
  }
  auto inst = load_benchmark(path);
  CHECK(inst.graph.edge_count() == 1);
  CHECK(inst.graph.weight(0) == doctest::Approx(2.0));
  CHECK(inst.data[0] == doctest::Approx(1.0));
  CHECK(inst.data[1] == doctest::Approx(-2.0));
  std::remove(path);

  const char* empty = "test_dimacs_empty.max";
  {
    std::ofstream f(empty);
    f << "p max 4 0\nn 1 s\nn 2 t\n";
  }
  CHECK_THROWS(load_benchmark(empty));
  std::remove(empty);
}

TEST_CASE("edge list round trip") {
  auto g = generate_random_graph(10, 20, 0.5, 1.5, 3);
  std::vector<double> f(10);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(double(i));
  const char* path = "test_edge_list.txt";
  save_edge_list(path, g, &f);
  auto inst = load_benchmark(path);
  CHECK(inst.graph.vertex_count() == g.vertex_count());
  CHECK(inst.graph.edge_count() == g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    CHECK(inst.graph.edge(e).tail == g.edge(e).tail);
    CHECK(inst.graph.weight(e) == doctest::Approx(g.weight(e)).epsilon(1e-15));
  }
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(inst.data[i] == doctest::Approx(f[i]).epsilon(1e-15));
  std::remove(path);
}
