#include "graphtv/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "graphtv/analysis.hpp"

namespace graphtv {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::pg: return "pg";
    case Algorithm::fista: return "fista";
    case Algorithm::pdhg: return "pdhg";
  }
  return "?";
}

std::string to_string(PrecondStrategy s) {
  switch (s) {
    case PrecondStrategy::identity: return "identity";
    case PrecondStrategy::diagonal: return "diagonal";
    case PrecondStrategy::nested_forest: return "nested-forest";
    case PrecondStrategy::chains: return "chains";
    case PrecondStrategy::inactively_nested: return "inactively-nested";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_string(const std::string& s) {
  if (s == "pg") return Algorithm::pg;
  if (s == "fista") return Algorithm::fista;
  if (s == "pdhg") return Algorithm::pdhg;
  return std::nullopt;
}

std::optional<PrecondStrategy> strategy_from_string(const std::string& s) {
  if (s == "identity") return PrecondStrategy::identity;
  if (s == "diagonal") return PrecondStrategy::diagonal;
  if (s == "nested-forest") return PrecondStrategy::nested_forest;
  if (s == "chains") return PrecondStrategy::chains;
  if (s == "inactively-nested") return PrecondStrategy::inactively_nested;
  return std::nullopt;
}

void ConvergenceTrace::write_csv(std::ostream& out) const {
  out << "iter,primal_obj,dual_obj,gap,active_frac,recond,L,lhat,time_s\n";
  out.precision(12);
  for (const auto& r : records) {
    out << r.iter << ',' << r.primal_obj << ',' << r.dual_obj << ',' << r.gap
        << ',' << r.active_frac << ',' << (r.recondition ? 1 : 0) << ','
        << r.forest_count << ',' << r.lhat << ',' << r.time_s << '\n';
  }
}

std::optional<std::size_t> ConvergenceTrace::iterations_to_gap(double tol) const {
  for (const auto& r : records)
    if (r.gap <= tol) return r.iter;
  return std::nullopt;
}

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

Preconditioner build_precond(const WeightedGraph& g, const SolveConfig& cfg,
                             const EdgeVector& p) {
  switch (cfg.strategy) {
    case PrecondStrategy::identity:
      return Preconditioner::identity(g);
    case PrecondStrategy::diagonal:
      return Preconditioner::diagonal(g, cfg.diagonal_scaling);
    case PrecondStrategy::nested_forest:
      return Preconditioner::block_forest(g, fixed_nested_forest(g));
    case PrecondStrategy::chains:
      return Preconditioner::block_forest(g, grid_chain_decomposition(g));
    case PrecondStrategy::inactively_nested:
      return Preconditioner::block_forest(g, greedy_inactively_nested(g, p));
  }
  throw std::logic_error("unknown strategy");
}

// Locally optimal dual step from the spectrum of the restricted normal
// matrix at the current active set; falls back to the safe step when the
// inactive part is trivial or the dense guard is exceeded.
double select_dual_step(const WeightedGraph& g, const DataTermOracle& oracle,
                        const Preconditioner& pc, const SolveConfig& cfg,
                        const EdgeVector& p) {
  if (cfg.dual_step) {
    if (!(*cfg.dual_step > 0.0))
      throw std::invalid_argument("dual step must be positive");
    return *cfg.dual_step;
  }
  const double opnorm = pc.operator_norm_sq();
  const double safe = oracle.big_l_gstar() * std::max(opnorm, 1e-12);
  if (cfg.step_mode == StepMode::safe) return safe;
  if (g.edge_count() > 2000 || g.vertex_count() > 2000) return safe;
  try {
    const auto as = active_set(p, cfg.active_eps);
    const Eigen::MatrixXd pi = restricted_normal_matrix(g, pc, as.inactive);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pi);
    const auto& ev = es.eigenvalues();
    const double lmax = ev.size() ? ev.maxCoeff() : 0.0;
    if (lmax <= 1e-12) return safe;
    double lminpos = lmax;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (ev(i) > 1e-8 * lmax) {
        lminpos = ev(i);
        break;
      }
    return 0.5 * (oracle.big_l_gstar() * lmax + oracle.l_gstar() * lminpos);
  } catch (const std::exception&) {
    return safe;
  }
}

struct LoopState {
  std::optional<Preconditioner> pc;
  double t = 0.0;
  double s = 0.0;  // pdhg only
  std::size_t forest_count = 0;
  std::size_t lhat = 0;
};

void select_pdhg_steps(const SolveConfig& cfg, const Preconditioner& pc,
                       LoopState& st) {
  const double opnorm = std::max(pc.operator_norm_sq(), 1e-12);
  if (cfg.primal_step && cfg.dual_step) {
    st.s = *cfg.primal_step;
    st.t = *cfg.dual_step;
    if (st.s * st.t < opnorm)
      throw std::invalid_argument("pdhg steps violate s*t >= |K|^2 in the metric");
    return;
  }
  st.s = cfg.primal_step.value_or(std::sqrt(opnorm) * cfg.pdhg_step_balance);
  st.t = cfg.dual_step.value_or(opnorm * (1.0 + 1e-3) / st.s);
}

void recondition(const WeightedGraph& g, const DataTermOracle& oracle,
                 const SolveConfig& cfg, const EdgeVector& p, LoopState& st) {
  st.pc = build_precond(g, cfg, p);
  st.forest_count = st.pc->forest_count();
  st.lhat = 0;
  if (cfg.compute_nesting && st.pc->decomposition() &&
      g.vertex_count() <= 2000) {
    const auto as = active_set(p, cfg.active_eps);
    const auto prof = nesting_profile(*st.pc->decomposition(), g, as.inactive);
    if (prof.lhat) st.lhat = *prof.lhat;
  }
  if (cfg.algorithm == Algorithm::pdhg) {
    select_pdhg_steps(cfg, *st.pc, st);
  } else {
    st.t = select_dual_step(g, oracle, *st.pc, cfg, p);
  }
}

double relative_gap(double gap, double primal) {
  return gap / (1.0 + std::abs(primal));
}

bool stop_reached(const SolveConfig& cfg, double gap, double primal) {
  if (relative_gap(gap, primal) <= cfg.tolerance) return true;
  return cfg.gap_stop_abs && gap <= *cfg.gap_stop_abs;
}

}  // namespace

SolveResult solve(const WeightedGraph& g, const DataTermOracle& oracle,
                  const SolveConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::pg: return solve_pg(g, oracle, cfg);
    case Algorithm::fista: return solve_fista(g, oracle, cfg);
    case Algorithm::pdhg: return solve_pdhg(g, oracle, cfg);
  }
  throw std::logic_error("unknown algorithm");
}

// PG and FISTA share the dual outer loop; beta_k = (k-1)/(k+2) engages only
// for FISTA and is discarded for one iteration after each reconditioning.
static SolveResult dual_gradient_loop(const WeightedGraph& g,
                                      const DataTermOracle& oracle,
                                      const SolveConfig& cfg, bool momentum) {
  if (!oracle.has_grad_gstar())
    throw std::invalid_argument("solver requires grad_gstar");
  if (oracle.dimension() != g.vertex_count())
    throw std::invalid_argument("oracle/graph dimension mismatch");
  Stopwatch clock;
  const std::size_t ne = g.edge_count();
  const std::size_t nv = g.vertex_count();

  SolveResult res;
  EdgeVector p(ne, 0.0), p_prev(ne, 0.0), y(ne, 0.0), p_next(ne, 0.0);
  VertexVector w(nv), u(nv);

  LoopState st;
  recondition(g, oracle, cfg, p, st);
  bool drop_momentum = true;  // first extrapolation has beta = 0 anyway

  auto eval_point = [&](const EdgeVector& pt, VertexVector& out_u) {
    g.apply_k_transpose(pt, w);
    for (double& x : w) x = -x;
    oracle.grad_gstar(w, out_u);
  };

  auto record = [&](std::size_t iter, bool recond_flag) {
    IterationRecord r;
    r.iter = iter;
    r.primal_obj = oracle.eval_g(u) + g.total_variation(u);
    if (cfg.reference_objective) {
      r.dual_obj = *cfg.reference_objective;
      r.gap = r.primal_obj - *cfg.reference_objective;
    } else {
      g.apply_k_transpose(p, w);
      for (double& x : w) x = -x;
      r.dual_obj = -oracle.eval_gstar(w);
      r.gap = r.primal_obj - r.dual_obj;
    }
    r.active_frac = ne == 0 ? 0.0
                            : static_cast<double>(
                                  active_set(p, cfg.active_eps).active.size()) /
                                  static_cast<double>(ne);
    r.recondition = recond_flag;
    r.forest_count = st.forest_count;
    r.lhat = st.lhat;
    r.time_s = clock.seconds();
    res.trace.records.push_back(r);
    if (cfg.record_iterates) res.trace.p_iterates.push_back(p);
    return r;
  };

  eval_point(p, u);
  record(0, true);
  bool converged = stop_reached(cfg, res.trace.records.back().gap,
                                res.trace.records.back().primal_obj);

  std::size_t k = 0;
  while (!converged && k < cfg.max_iterations) {
    ++k;
    bool recond_flag = false;
    if (cfg.strategy == PrecondStrategy::inactively_nested &&
        cfg.recondition_period != kNoReconditioning && k > 1 &&
        (k - 1) % cfg.recondition_period == 0) {
      recondition(g, oracle, cfg, p, st);
      recond_flag = true;
      drop_momentum = true;
    }
    double beta = 0.0;
    if (momentum && !drop_momentum)
      beta = (static_cast<double>(k) - 1.0) / (static_cast<double>(k) + 2.0);
    drop_momentum = false;
    for (std::size_t e = 0; e < ne; ++e)
      y[e] = p[e] + beta * (p[e] - p_prev[e]);
    eval_point(y, u);
    st.pc->scaled_dual_update(y, u, st.t, p_next);
    p_prev = p;
    p = p_next;
    eval_point(p, u);
    const auto r = record(k, recond_flag);
    converged = stop_reached(cfg, r.gap, r.primal_obj);
  }

  res.u = u;
  res.p = p;
  res.converged = converged;
  res.iterations = k;
  res.final_gap = res.trace.records.back().gap;
  res.dual_step_used = st.t;
  if (st.pc->decomposition())
    res.final_decomposition = *st.pc->decomposition();
  return res;
}

SolveResult solve_pg(const WeightedGraph& g, const DataTermOracle& oracle,
                     const SolveConfig& cfg) {
  return dual_gradient_loop(g, oracle, cfg, /*momentum=*/false);
}

SolveResult solve_fista(const WeightedGraph& g, const DataTermOracle& oracle,
                        const SolveConfig& cfg) {
  return dual_gradient_loop(g, oracle, cfg, /*momentum=*/true);
}

SolveResult solve_pdhg(const WeightedGraph& g, const DataTermOracle& oracle,
                       const SolveConfig& cfg) {
  if (!oracle.has_prox())
    throw std::invalid_argument("pdhg requires prox_g");
  if (oracle.dimension() != g.vertex_count())
    throw std::invalid_argument("oracle/graph dimension mismatch");
  Stopwatch clock;
  const std::size_t ne = g.edge_count();
  const std::size_t nv = g.vertex_count();

  SolveResult res;
  EdgeVector p(ne, 0.0), p_next(ne, 0.0);
  VertexVector u(nv, 0.0), u_next(nv), ubar(nv), z(nv), ktp(nv);

  LoopState st;
  recondition(g, oracle, cfg, p, st);

  auto record = [&](std::size_t iter, bool recond_flag) {
    IterationRecord r;
    r.iter = iter;
    r.primal_obj = oracle.eval_g(u) + g.total_variation(u);
    if (cfg.reference_objective) {
      r.dual_obj = *cfg.reference_objective;
      r.gap = r.primal_obj - *cfg.reference_objective;
    } else {
      g.apply_k_transpose(p, ktp);
      for (double& x : ktp) x = -x;
      r.dual_obj = -oracle.eval_gstar(ktp);
      r.gap = r.primal_obj - r.dual_obj;
    }
    r.active_frac = ne == 0 ? 0.0
                            : static_cast<double>(
                                  active_set(p, cfg.active_eps).active.size()) /
                                  static_cast<double>(ne);
    r.recondition = recond_flag;
    r.forest_count = st.forest_count;
    r.lhat = st.lhat;
    r.time_s = clock.seconds();
    res.trace.records.push_back(r);
    if (cfg.record_iterates) res.trace.p_iterates.push_back(p);
    return r;
  };

  record(0, true);
  bool converged = stop_reached(cfg, res.trace.records.back().gap,
                                res.trace.records.back().primal_obj);

  std::size_t k = 0;
  while (!converged && k < cfg.max_iterations) {
    ++k;
    bool recond_flag = false;
    if (cfg.strategy == PrecondStrategy::inactively_nested &&
        cfg.recondition_period != kNoReconditioning && k > 1 &&
        (k - 1) % cfg.recondition_period == 0) {
      recondition(g, oracle, cfg, p, st);
      recond_flag = true;
    }
    g.apply_k_transpose(p, ktp);
    for (std::size_t i = 0; i < nv; ++i) z[i] = u[i] - ktp[i] / st.s;
    oracle.prox_g(z, st.s, u_next);
    for (std::size_t i = 0; i < nv; ++i) ubar[i] = 2.0 * u_next[i] - u[i];
    st.pc->scaled_dual_update(p, ubar, st.t, p_next);
    u = u_next;
    p = p_next;
    const auto r = record(k, recond_flag);
    converged = stop_reached(cfg, r.gap, r.primal_obj);
  }

  res.u = u;
  res.p = p;
  res.converged = converged;
  res.iterations = k;
  res.final_gap = res.trace.records.back().gap;
  res.dual_step_used = st.t;
  res.primal_step_used = st.s;
  if (st.pc->decomposition())
    res.final_decomposition = *st.pc->decomposition();
  return res;
}

}  // namespace graphtv
