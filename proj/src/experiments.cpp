#include "graphtv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "graphtv/analysis.hpp"
#include "graphtv/forest.hpp"
#include "graphtv/precond.hpp"

namespace graphtv {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line without '=': " + line);
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

void ExperimentConfig::apply_override(const std::string& kvs) {
  const auto eq = kvs.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error("override without '=': " + kvs);
  set(trim(kvs.substr(0, eq)), trim(kvs.substr(eq + 1)));
}

bool ExperimentConfig::has(const std::string& key) const {
  return kv_.count(key) > 0;
}

std::string ExperimentConfig::get(const std::string& key,
                                  const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double ExperimentConfig::get_num(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  return std::stod(it->second);
}

std::size_t ExperimentConfig::get_index(const std::string& key,
                                        std::size_t fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  if (it->second == "inf" || it->second == "infinity") return kNoReconditioning;
  return static_cast<std::size_t>(std::stoull(it->second));
}

std::vector<double> ExperimentConfig::get_list(
    const std::string& key, const std::vector<double>& fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  std::string item;
  std::stringstream ss(it->second);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

LambdaSearch bisect_active_fraction(const WeightedGraph& g,
                                    const VertexVector& f, double lo, double hi,
                                    int max_solves, double reference_tol) {
  auto fraction_at = [&](double lambda) {
    SolveConfig cfg;
    cfg.algorithm = Algorithm::fista;
    cfg.strategy = PrecondStrategy::inactively_nested;
    cfg.recondition_period = 1;
    cfg.tolerance = reference_tol;
    cfg.max_iterations = 100000;
    RofOracle oracle(f);
    SolveResult res = solve(g.scaled(lambda), oracle, cfg);
    const auto as = active_set(res.p, 1e-7);
    return static_cast<double>(as.active.size()) /
           static_cast<double>(g.edge_count());
  };
  // Active fraction decreases with lambda: bracket then bisect in log space.
  double l_lo = 1e-6, l_hi = 1e6;
  LambdaSearch out;
  int solves = 0;
  double mid = 1.0, frac = 0.0;
  while (solves < max_solves) {
    mid = std::sqrt(l_lo * l_hi);
    frac = fraction_at(mid);
    ++solves;
    if (frac >= lo && frac <= hi) {
      out.lambda = mid;
      out.achieved_fraction = frac;
      out.in_band = true;
      return out;
    }
    if (frac > hi)
      l_lo = mid;  // too many active edges: strengthen regularization
    else
      l_hi = mid;
  }
  out.lambda = mid;
  out.achieved_fraction = frac;
  out.in_band = false;
  return out;
}

namespace {

VertexVector uniform_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  VertexVector f(n);
  for (auto& x : f) x = u01(rng);
  return f;
}

struct GraphSource {
  WeightedGraph graph;
  VertexVector data;
};

GraphSource resolve_graph(const ExperimentConfig& cfg) {
  const std::string spec = cfg.get("graph", "");
  if (spec.empty()) throw std::runtime_error("missing graph=");
  if (spec.rfind("grid:", 0) == 0) {
    std::size_t w = 0, h = 0;
    double weight = cfg.get_num("weight", 1.0);
    if (std::sscanf(spec.c_str(), "grid:%zu:%zu", &w, &h) != 2)
      throw std::runtime_error("bad grid spec: " + spec);
    auto g = generate_grid(w, h, weight);
    return {std::move(g), VertexVector(w * h, 0.0)};
  }
  if (spec.rfind("random:", 0) == 0) {
    std::size_t nv = 0, ne = 0;
    if (std::sscanf(spec.c_str(), "random:%zu:%zu", &nv, &ne) != 2)
      throw std::runtime_error("bad random spec: " + spec);
    auto g = generate_random_graph(
        nv, ne, cfg.get_num("weight_lo", 0.5), cfg.get_num("weight_hi", 1.5),
        static_cast<std::uint64_t>(cfg.get_num("seed", 0)));
    return {std::move(g), VertexVector(nv, 0.0)};
  }
  auto inst = load_benchmark(spec);
  return {std::move(inst.graph), std::move(inst.data)};
}

VertexVector resolve_signal(const ExperimentConfig& cfg, const GraphSource& src) {
  const std::string fspec = cfg.get("f", "embedded");
  const std::size_t n = src.graph.vertex_count();
  if (fspec == "uniform")
    return uniform_signal(n, static_cast<std::uint64_t>(cfg.get_num("seed", 0)));
  if (fspec == "zero") return VertexVector(n, 0.0);
  if (fspec == "embedded") return src.data;
  std::ifstream in(fspec);
  if (!in) throw std::runtime_error("cannot open f file " + fspec);
  VertexVector f;
  double v;
  while (in >> v) f.push_back(v);
  if (f.size() != n) throw std::runtime_error("f file length mismatch");
  return f;
}

SolveConfig solver_config_from(const ExperimentConfig& cfg) {
  SolveConfig sc;
  const auto alg = algorithm_from_string(cfg.get("algorithm", "pg"));
  if (!alg) throw std::runtime_error("unknown algorithm");
  sc.algorithm = *alg;
  const auto strat = strategy_from_string(cfg.get("precond", "inactively-nested"));
  if (!strat) throw std::runtime_error("unknown precond strategy");
  sc.strategy = *strat;
  sc.recondition_period = cfg.get_index("n", 1);
  sc.tolerance = cfg.get_num("tol", 1e-10);
  sc.max_iterations = cfg.get_index("max_iters", 100000);
  sc.active_eps = cfg.get_num("active_eps", 1e-7);
  sc.step_mode = cfg.get("step_mode", "safe") == "local-optimal"
                     ? StepMode::local_optimal
                     : StepMode::safe;
  if (cfg.has("dual_step")) sc.dual_step = cfg.get_num("dual_step", 0.0);
  if (cfg.has("primal_step")) sc.primal_step = cfg.get_num("primal_step", 0.0);
  sc.pdhg_step_balance = cfg.get_num("pdhg_balance", 1.0);
  sc.diagonal_scaling = cfg.get("diagonal_scaling", "row_sum_sq") == "row_abs_sum"
                            ? DiagonalScaling::row_abs_sum
                            : DiagonalScaling::row_sum_sq;
  sc.compute_nesting = cfg.get("compute_nesting", "0") == "1";
  sc.seed = static_cast<std::uint64_t>(cfg.get_num("seed", 0));
  return sc;
}

void write_trace(const fs::path& path, const ConvergenceTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  trace.write_csv(out);
}

void write_summary_line(std::ostream& out, const std::string& key,
                        const std::string& value) {
  out << key << "=" << value << "\n";
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

std::optional<double> time_to_gap(const ConvergenceTrace& t, double tol) {
  for (const auto& r : t.records)
    if (r.gap <= tol) return r.time_s;
  return std::nullopt;
}

int run_custom(const ExperimentConfig& cfg, const fs::path& out) {
  GraphSource src = resolve_graph(cfg);
  VertexVector f = resolve_signal(cfg, src);
  const double lambda = cfg.get_num("lambda", 1.0);
  WeightedGraph g = src.graph.scaled(lambda);
  SolveConfig sc = solver_config_from(cfg);

  std::unique_ptr<DataTermOracle> oracle;
  const std::string problem = cfg.get("problem", "rof");
  if (problem == "rof") {
    oracle = std::make_unique<RofOracle>(f);
  } else {
    throw std::runtime_error("custom preset supports problem=rof");
  }
  SolveResult res = solve(g, *oracle, sc);
  write_trace(out / "trace.csv", res.trace);
  std::ofstream summary(out / "summary.txt");
  write_summary_line(summary, "algorithm", to_string(sc.algorithm));
  write_summary_line(summary, "precond", to_string(sc.strategy));
  write_summary_line(summary, "dual_step", fmt(res.dual_step_used));
  write_summary_line(summary, "iterations", std::to_string(res.iterations));
  write_summary_line(summary, "converged", res.converged ? "1" : "0");
  write_summary_line(summary, "final_gap", fmt(res.final_gap));
  const auto it10 = res.trace.iterations_to_gap(cfg.get_num("gap_abs", 1e-10));
  write_summary_line(summary, "iterations_to_gap",
                     it10 ? std::to_string(*it10) : "--");
  return res.converged ? 0 : 1;
}

int run_fig1(const ExperimentConfig& cfg, const fs::path& out) {
  const std::size_t width = cfg.get_index("width", 4);
  const std::size_t height = cfg.get_index("height", 3);
  const auto seed = static_cast<std::uint64_t>(cfg.get_num("seed", 1));
  auto base = generate_grid(width, height, 1.0);
  auto f = uniform_signal(base.vertex_count(), seed);
  auto search = bisect_active_fraction(base, f, cfg.get_num("frac_lo", 0.2),
                                       cfg.get_num("frac_hi", 0.3));
  WeightedGraph g = base.scaled(search.lambda);
  RofOracle oracle(f);

  SolveConfig sc;
  sc.algorithm = Algorithm::pg;
  sc.tolerance = -1.0;  // run the full horizon
  sc.max_iterations = cfg.get_index("max_iters", 100);
  sc.record_iterates = true;

  sc.strategy = PrecondStrategy::inactively_nested;
  sc.recondition_period = 1;
  sc.step_mode = StepMode::local_optimal;
  SolveResult precond = solve(g, oracle, sc);

  sc.strategy = PrecondStrategy::identity;
  sc.step_mode = StepMode::safe;
  SolveResult ident = solve(g, oracle, sc);

  write_trace(out / "fig1_precond.csv", precond.trace);
  write_trace(out / "fig1_identity.csv", ident.trace);

  // Rate report at the reference active set with the final frozen metric.
  auto ref = reference_solution(g, oracle);
  const auto as = active_set(ref.p, 1e-7);
  double phi = 0.0;
  if (precond.final_decomposition) {
    Preconditioner pc = Preconditioner::block_forest(g, *precond.final_decomposition);
    Eigen::MatrixXd pi = restricted_normal_matrix(g, pc, as.inactive);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pi);
    const auto& ev = es.eigenvalues();
    double lmax = ev.maxCoeff(), lminpos = lmax;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (ev(i) > 1e-8 * lmax) {
        lminpos = ev(i);
        break;
      }
    phi = lmax / lminpos;  // kappa(G*) = 1 for the fused Lasso
  }
  std::ofstream summary(out / "summary.txt");
  write_summary_line(summary, "lambda", fmt(search.lambda));
  write_summary_line(summary, "active_fraction", fmt(search.achieved_fraction));
  write_summary_line(summary, "phi", fmt(phi));
  write_summary_line(summary, "contraction", fmt((phi - 1.0) / (phi + 1.0)));
  const auto itp = precond.trace.iterations_to_gap(1e-10);
  const auto iti = ident.trace.iterations_to_gap(1e-10);
  write_summary_line(summary, "precond_iterations_to_1e-10",
                     itp ? std::to_string(*itp) : "--");
  write_summary_line(summary, "identity_iterations_to_1e-10",
                     iti ? std::to_string(*iti) : "--");
  write_summary_line(summary, "identity_gap_at_horizon",
                     fmt(ident.trace.records.back().gap));
  return itp ? 0 : 1;
}

int run_fig2(const ExperimentConfig& cfg, const fs::path& out) {
  const std::size_t nv = cfg.get_index("nv", 512);
  const double ratio = cfg.get_num("ratio", 5.0);
  const std::size_t ne = static_cast<std::size_t>(ratio * nv);
  const auto fractions = cfg.get_list("fractions", {0.3, 0.5, 0.8});
  const std::size_t seeds = cfg.get_index("seeds", 5);
  const double gap_abs = cfg.get_num("gap_abs", 1e-10);
  const std::size_t max_iters = cfg.get_index("max_iters", 500000);

  std::ofstream rows(out / "fig2_results.csv");
  rows << "fraction_target,seed,achieved_fraction,method,iterations\n";
  std::ofstream medians(out / "fig2_medians.csv");
  medians << "fraction_target,identity,nested_forest,inactively_nested\n";

  const std::vector<std::pair<std::string, PrecondStrategy>> methods = {
      {"identity", PrecondStrategy::identity},
      {"nested_forest", PrecondStrategy::nested_forest},
      {"inactively_nested", PrecondStrategy::inactively_nested}};

  int fail = 0;
  for (double target : fractions) {
    std::map<std::string, std::vector<double>> iters_by_method;
    for (std::size_t s = 0; s < seeds; ++s) {
      const auto seed = static_cast<std::uint64_t>(cfg.get_num("seed", 1)) + s;
      auto base = generate_random_connected_graph(nv, ne, 0.5, 1.5, seed);
      auto f = uniform_signal(nv, seed * 31 + 7);
      auto search =
          bisect_active_fraction(base, f, target - 0.05, target + 0.05);
      WeightedGraph g = base.scaled(search.lambda);
      RofOracle oracle(f);
      for (const auto& [name, strat] : methods) {
        SolveConfig sc;
        sc.algorithm = Algorithm::pg;
        sc.strategy = strat;
        sc.recondition_period = 1;
        sc.tolerance = 1e-14;
        sc.max_iterations = max_iters;
        SolveResult res = solve(g, oracle, sc);
        const auto it = res.trace.iterations_to_gap(gap_abs);
        const double v = it ? static_cast<double>(*it)
                            : static_cast<double>(max_iters) * 2.0;
        if (!it) ++fail;
        iters_by_method[name].push_back(v);
        rows << target << ',' << seed << ',' << search.achieved_fraction << ','
             << name << ',' << (it ? std::to_string(*it) : "--") << "\n";
      }
    }
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return v[v.size() / 2];
    };
    medians << target << ',' << median(iters_by_method["identity"]) << ','
            << median(iters_by_method["nested_forest"]) << ','
            << median(iters_by_method["inactively_nested"]) << "\n";
  }
  return fail == 0 ? 0 : 1;
}

int run_fig3(const ExperimentConfig& cfg, const fs::path& out) {
  const std::size_t size = cfg.get_index("size", 50);
  const auto seed = static_cast<std::uint64_t>(cfg.get_num("seed", 1));
  const double gap_abs = cfg.get_num("gap_abs", 1e-10);
  auto base = generate_grid(size, size, 1.0);
  auto f = uniform_signal(base.vertex_count(), seed);
  auto search = bisect_active_fraction(base, f, cfg.get_num("frac_lo", 0.25),
                                       cfg.get_num("frac_hi", 0.35));
  WeightedGraph g = base.scaled(search.lambda);
  RofOracle oracle(f);

  struct Arm {
    std::string name;
    PrecondStrategy strategy;
    std::size_t n;
  };
  std::vector<Arm> arms = {{"identity", PrecondStrategy::identity, 1},
                           {"nested_forest", PrecondStrategy::nested_forest, 1},
                           {"chains", PrecondStrategy::chains, 1},
                           {"inact_n20", PrecondStrategy::inactively_nested, 20},
                           {"inact_n10", PrecondStrategy::inactively_nested, 10},
                           {"inact_n5", PrecondStrategy::inactively_nested, 5},
                           {"inact_n1", PrecondStrategy::inactively_nested, 1}};
  std::ofstream summary(out / "summary.txt");
  write_summary_line(summary, "lambda", fmt(search.lambda));
  write_summary_line(summary, "active_fraction", fmt(search.achieved_fraction));
  int rc = 0;
  for (const auto& arm : arms) {
    SolveConfig sc;
    sc.algorithm = Algorithm::pg;
    sc.strategy = arm.strategy;
    sc.recondition_period = arm.n;
    sc.tolerance = 1e-14;
    sc.max_iterations = cfg.get_index("max_iters", 400000);
    SolveResult res = solve(g, oracle, sc);
    write_trace(out / ("fig3_" + arm.name + ".csv"), res.trace);
    const auto it = res.trace.iterations_to_gap(gap_abs);
    write_summary_line(summary, arm.name + "_iterations",
                       it ? std::to_string(*it) : "--");
    if (!it) rc = 1;
  }
  return rc;
}

int run_fig4(const ExperimentConfig& cfg, const fs::path& out) {
  const std::size_t width = cfg.get_index("width", 32);
  const std::size_t height = cfg.get_index("height", 32);
  const int radius = static_cast<int>(cfg.get_num("radius", 3));
  const double sigma = cfg.get_num("sigma", 0.05);
  const double lambda = cfg.get_num("lambda", 0.02);
  const auto seed = static_cast<std::uint64_t>(cfg.get_num("seed", 1));
  const std::size_t n = cfg.get_index("n", 5);
  const double rel_tol = cfg.get_num("tol", 1e-8);

  const std::string shape = cfg.get("kernel", "motion");
  if (shape != "motion" && shape != "identity")
    throw std::runtime_error("kernel shape must be motion or identity");
  auto kernel = shape == "identity" ? BlurKernel::identity_tap()
                                    : BlurKernel::motion(radius);
  auto inst = synth_deconv_instance(width, height, seed, sigma, kernel);
  WeightedGraph g = generate_grid(width, height, 1.0).scaled(lambda);
  if (cfg.get("save_images", "0") == "1") {
    write_pgm((out / "phantom.pgm").string(), inst.ground_truth, width, height);
    write_pgm((out / "observed.pgm").string(), inst.observed, width, height);
  }

  CgOptions ref_cg{1e-13, 150};
  // Reference objective: two long runs under structurally different metrics.
  auto long_run = [&](PrecondStrategy strat) {
    DeconvOracle oracle(width, height, kernel, inst.observed, ref_cg);
    SolveConfig sc;
    sc.algorithm = Algorithm::pdhg;
    sc.strategy = strat;
    sc.recondition_period = n;
    sc.tolerance = -1.0;
    sc.max_iterations = cfg.get_index("ref_iters", 1200);
    return solve(g, oracle, sc);
  };
  SolveResult ra = long_run(PrecondStrategy::inactively_nested);
  SolveResult rb = long_run(width >= 2 && height >= 2
                                ? PrecondStrategy::chains
                                : PrecondStrategy::nested_forest);
  const double obj_a = ra.trace.records.back().primal_obj;
  const double obj_b = rb.trace.records.back().primal_obj;
  if (std::abs(obj_a - obj_b) > 1e-7 * (1.0 + std::abs(obj_a)))
    throw std::runtime_error("fig4: reference cross-validation disagreement");
  const double reference = std::min(obj_a, obj_b);

  struct Arm {
    std::string name;
    PrecondStrategy strategy;
  };
  std::vector<Arm> arms = {{"identity", PrecondStrategy::identity},
                           {"diagonal", PrecondStrategy::diagonal},
                           {"nested_forest", PrecondStrategy::nested_forest},
                           {"chains", PrecondStrategy::chains},
                           {"inact_nf", PrecondStrategy::inactively_nested}};
  std::ofstream summary(out / "summary.txt");
  write_summary_line(summary, "reference_objective", fmt(reference));
  int rc = 0;
  for (const auto& arm : arms) {
    DeconvOracle oracle(width, height, kernel, inst.observed,
                        CgOptions{cfg.get_num("cg_tol", 1e-12),
                                  static_cast<int>(cfg.get_num("cg_max_iter", 10))});
    SolveConfig sc;
    sc.algorithm = Algorithm::pdhg;
    sc.strategy = arm.strategy;
    sc.recondition_period = n;
    sc.diagonal_scaling = DiagonalScaling::row_abs_sum;
    sc.tolerance = rel_tol;
    sc.max_iterations = cfg.get_index("max_iters", 40000);
    sc.reference_objective = reference;
    SolveResult res = solve(g, oracle, sc);
    write_trace(out / ("fig4_" + arm.name + ".csv"), res.trace);
    write_summary_line(summary, arm.name + "_iterations",
                       res.converged ? std::to_string(res.iterations) : "--");
    write_summary_line(summary, arm.name + "_time_s",
                       fmt(res.trace.records.back().time_s));
    if (!res.converged) rc = 1;
  }
  return rc;
}

int run_bench(const ExperimentConfig& cfg, const fs::path& out) {
  const std::string dir = cfg.get("dir", "");
  if (dir.empty()) throw std::runtime_error("bench needs dir=");
  const double tol = cfg.get_num("tol", 1e-10);
  const std::size_t n = cfg.get_index("n", 30);
  const std::size_t max_iters = cfg.get_index("max_iters", 500000);
  const double lambda = cfg.get_num("lambda", 1.0);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("bench: no instances in " + dir);

  const std::vector<std::pair<std::string, PrecondStrategy>> methods = {
      {"none", PrecondStrategy::identity},
      {"diagonal", PrecondStrategy::diagonal},
      {"nested_forest", PrecondStrategy::nested_forest},
      {"inact_nf", PrecondStrategy::inactively_nested}};

  std::ofstream table(out / "bench.csv");
  table << "name,active_fraction";
  for (const auto& [name, _] : methods) table << ',' << name << "_iters,"
                                              << name << "_time_s";
  table << "\n";
  std::ofstream pretty(out / "bench.txt");
  int rc = 0;
  for (const auto& file : files) {
    auto inst = load_benchmark(file.string());
    WeightedGraph g = inst.graph.scaled(lambda);
    RofOracle oracle(inst.data);
    table << file.filename().string();
    pretty << file.filename().string() << ":";
    double active_frac = -1.0;
    std::string row;
    for (const auto& [name, strat] : methods) {
      SolveConfig sc;
      sc.algorithm = Algorithm::fista;
      sc.strategy = strat;
      sc.recondition_period = n;
      sc.tolerance = tol;
      sc.max_iterations = max_iters;
      SolveResult res = solve(g, oracle, sc);
      if (res.converged && strat == PrecondStrategy::inactively_nested) {
        const auto as = active_set(res.p, 1e-7);
        active_frac = static_cast<double>(as.active.size()) /
                      static_cast<double>(g.edge_count());
      }
      std::ostringstream cell;
      if (res.converged)
        cell << ',' << res.iterations << ','
             << fmt(res.trace.records.back().time_s);
      else
        cell << ",--,--";
      row += cell.str();
      pretty << "  " << name << "="
             << (res.converged ? std::to_string(res.iterations) : "--");
      if (!res.converged && strat == PrecondStrategy::inactively_nested) rc = 1;
    }
    table << ',' << (active_frac >= 0 ? fmt(active_frac) : "--") << row << "\n";
    pretty << "\n";
  }
  return rc;
}

EdgeVector read_dual_file(const std::string& spec, std::size_t ne) {
  if (spec == "zero" || spec.empty()) return EdgeVector(ne, 0.0);
  std::ifstream in(spec);
  if (!in) throw std::runtime_error("cannot open p file " + spec);
  EdgeVector p;
  double v;
  while (in >> v) p.push_back(v);
  if (p.size() != ne) throw std::runtime_error("p file length mismatch");
  return p;
}

}  // namespace

int cmd_run(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::path out(out_dir);
  fs::create_directories(out);
  const std::string preset = cfg.get("preset", "custom");
  if (preset == "custom") return run_custom(cfg, out);
  if (preset == "fig1-grid") return run_fig1(cfg, out);
  if (preset == "fig2-random") return run_fig2(cfg, out);
  if (preset == "fig3-grid") return run_fig3(cfg, out);
  if (preset == "fig4-deconv") return run_fig4(cfg, out);
  if (preset == "table1-benchmark") return run_bench(cfg, out);
  throw std::runtime_error("unknown preset " + preset);
}

int cmd_partition(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::path out(out_dir);
  fs::create_directories(out);
  GraphSource src = resolve_graph(cfg);
  EdgeVector p = read_dual_file(cfg.get("p", "zero"), src.graph.edge_count());
  const std::string method = cfg.get("method", "greedy");
  ForestDecomposition d;
  if (method == "chains")
    d = grid_chain_decomposition(src.graph);
  else if (method == "greedy")
    d = greedy_inactively_nested(src.graph, p);
  else
    throw std::runtime_error("partition method must be greedy or chains");
  {
    std::ofstream df(out / "decomposition.txt");
    write_decomposition(df, d);
  }
  std::ofstream rep(out / "nesting_report.txt");
  write_summary_line(rep, "forests", std::to_string(d.forest_count()));
  if (src.graph.vertex_count() <= 2000) {
    const auto as = active_set(p, cfg.get_num("active_eps", 1e-7));
    auto prof = nesting_profile(d, src.graph, as.inactive);
    write_summary_line(rep, "nested", prof.nested ? "1" : "0");
    write_summary_line(rep, "lhat",
                       prof.lhat ? std::to_string(*prof.lhat) : "--");
    std::string dims;
    for (std::size_t i = 0; i < prof.span_dims.size(); ++i)
      dims += (i ? "," : "") + std::to_string(prof.span_dims[i]);
    write_summary_line(rep, "span_dims", dims);
  }
  return 0;
}

int cmd_analyze(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::path out(out_dir);
  fs::create_directories(out);
  GraphSource src = resolve_graph(cfg);
  const WeightedGraph& g = src.graph;
  EdgeVector p = read_dual_file(cfg.get("p", "zero"), g.edge_count());

  ForestDecomposition d;
  const std::string dspec = cfg.get("decomposition", "");
  if (dspec.empty()) {
    d = greedy_inactively_nested(g, p);
  } else {
    std::ifstream in(dspec);
    if (!in) throw std::runtime_error("cannot open decomposition " + dspec);
    d = read_decomposition(in);
  }
  const auto as = active_set(p, cfg.get_num("active_eps", 1e-7));
  auto prof = nesting_profile(d, g, as.inactive);
  auto spec = inactive_projector(g, d, as.inactive);

  std::ofstream rep(out / "rate_report.txt");
  write_summary_line(rep, "forests", std::to_string(d.forest_count()));
  write_summary_line(rep, "active_count", std::to_string(as.active.size()));
  write_summary_line(rep, "nested", prof.nested ? "1" : "0");
  write_summary_line(rep, "lhat", prof.lhat ? std::to_string(*prof.lhat) : "--");
  write_summary_line(rep, "lambda_max", fmt(spec.lambda_max));
  write_summary_line(rep, "lambda_min_pos", fmt(spec.lambda_min_pos));
  const double kappa_gstar = cfg.get_num("kappa_gstar", 1.0);
  double phi;
  if (prof.nested) {
    auto rate = local_rate(static_cast<double>(d.forest_count()),
                           static_cast<double>(*prof.lhat), kappa_gstar);
    phi = rate.phi;
  } else {
    phi = spec.lambda_max / spec.lambda_min_pos * kappa_gstar;
  }
  write_summary_line(rep, "phi", fmt(phi));
  write_summary_line(rep, "contraction", fmt((phi - 1.0) / (phi + 1.0)));

  {
    std::ofstream sp(out / "spectrum.csv");
    sp << "eigenvalue\n";
    sp.precision(12);
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
      sp << spec.eigenvalues(i) << "\n";
  }

  // Optional comparison against a recorded trace: log10-gap tail slope vs
  // the predicted contraction (gap contracts at rate^2 per iteration).
  const std::string trace_path = cfg.get("trace", "");
  if (!trace_path.empty()) {
    std::ifstream tr(trace_path);
    if (!tr) throw std::runtime_error("cannot open trace " + trace_path);
    std::string line;
    std::getline(tr, line);  // header
    std::vector<double> gaps;
    while (std::getline(tr, line)) {
      std::stringstream ls(line);
      std::string cell;
      int col = 0;
      double gap = 0;
      while (std::getline(ls, cell, ',')) {
        if (col == 3) gap = std::stod(cell);
        ++col;
      }
      gaps.push_back(gap);
    }
    const std::size_t m = gaps.size();
    const std::size_t start = m - std::min(m, std::max<std::size_t>(m / 3, 2));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t i = start; i < m; ++i) {
      if (!(gaps[i] > 0)) continue;
      const double x = static_cast<double>(i), y = std::log10(gaps[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
    if (cnt >= 2) {
      const double denom = cnt * sxx - sx * sx;
      const double slope = (cnt * sxy - sx * sy) / denom;
      write_summary_line(rep, "trace_tail_log10_slope", fmt(slope));
      const double rate = (phi - 1.0) / (phi + 1.0);
      write_summary_line(rep, "envelope_log10_slope",
                         fmt(2.0 * std::log10(std::max(rate, 1e-300))));
    }
  }
  return 0;
}

int cmd_bench(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::path out(out_dir);
  fs::create_directories(out);
  return run_bench(cfg, out);
}

int run_subcommand(const std::string& name, const ExperimentConfig& cfg,
                   const std::string& out_dir) {
  if (name == "run") return cmd_run(cfg, out_dir);
  if (name == "partition") return cmd_partition(cfg, out_dir);
  if (name == "analyze") return cmd_analyze(cfg, out_dir);
  if (name == "bench") return cmd_bench(cfg, out_dir);
  throw std::runtime_error("unknown subcommand " + name);
}

}  // namespace graphtv
