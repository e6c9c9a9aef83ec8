#pragma once

// KL-ambiguity over the scenario weights of each (month, year) group.
//
//   max_{Q : KL(Q||P) <= delta} sum_d Q_d c_d
//     = min_{alpha, beta >= 0} alpha + delta beta + sum_d P_d beta exp((c_d - alpha)/beta - 1)
//
// The right side is written with epigraph rows alpha - zeta_d >= c_d(x) and (-beta, zeta_d, gamma_d) in K*_exp.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "helios/core/error.hpp"
#include "helios/model/model_instance.hpp"
#include "helios/solver/solve.hpp"

namespace helios::dro {

struct AmbiguitySpec {
  double delta = 0.0;
  // Reference weights per cost block, in model.cost_blocks order; empty: use the block probabilities.
  std::vector<double> weights;
};

struct WorstCase {
  double value = 0.0;
  std::vector<double> q;
  double kl = 0.0;
};

inline double kl_divergence(const std::vector<double>& q, const std::vector<double>& p) {
  double s = 0.0;
  for (size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0) s += q[i] * std::log(q[i] / p[i]);
  return std::max(0.0, s);
}

inline void check_simplex(const std::vector<double>& p, const char* what) {
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::validation, std::string(what) + ": weights must be >= 0");
    s += v;
  }
  if (p.empty() || std::abs(s - 1.0) > 1e-9) fail(ErrorCode::validation, std::string(what) + ": weights must sum to 1");
}

// Exponential tilting Q ∝ P e^{t c}, with t = 1/theta found by bisection on KL(Q_t||P) = delta.
inline WorstCase worst_case_expectation(const std::vector<double>& c, const std::vector<double>& p, double delta) {
  if (c.size() != p.size()) fail(ErrorCode::dimension_mismatch, "costs and weights differ in length");
  check_simplex(p, "reference distribution");
  if (!(delta >= 0.0) || !std::isfinite(delta)) fail(ErrorCode::validation, "KL radius must be finite and >= 0");
  for (double v : c)
    if (!std::isfinite(v)) fail(ErrorCode::validation, "scenario costs must be finite");
  const size_t n = c.size();
  WorstCase w;
  double cmax = -std::numeric_limits<double>::infinity(), cmin = -cmax;
  for (size_t i = 0; i < n; ++i)
    if (p[i] > 0.0) {
      cmax = std::max(cmax, c[i]);
      cmin = std::min(cmin, c[i]);
    }
  auto finish = [&](std::vector<double> q) {
    double s = 0.0;
    for (double v : q) s += v;
    for (double& v : q) v /= s;
    w.value = 0.0;
    for (size_t i = 0; i < n; ++i) w.value += q[i] * c[i];
    w.kl = kl_divergence(q, p);
    w.q = std::move(q);
    return w;
  };
  if (delta == 0.0 || cmax == cmin) return finish(p);

  double ptop = 0.0;
  for (size_t i = 0; i < n; ++i)
    if (p[i] > 0.0 && c[i] == cmax) ptop += p[i];
  if (delta >= -std::log(ptop)) {
    std::vector<double> q(n, 0.0);
    for (size_t i = 0; i < n; ++i)
      if (p[i] > 0.0 && c[i] == cmax) q[i] = p[i];
    return finish(q);
  }
  // scaled costs in [-1, 0]
  const double span = cmax - cmin;
  auto tilt = [&](double t) {
    std::vector<double> q(n, 0.0);
    double s = 0.0;
    for (size_t i = 0; i < n; ++i)
      if (p[i] > 0.0) s += q[i] = p[i] * std::exp(t * (c[i] - cmax) / span);
    for (double& v : q) v /= s;
    return q;
  };
  double lo = 0.0, hi = 1.0;
  while (kl_divergence(tilt(hi), p) < delta && hi < 1e300) hi *= 2.0;
  // bisection on t; theta = span / t resolved to 1e-10 relative
  for (int it = 0; it < 2000 && hi - lo > 1e-10 * lo; ++it) {
    double mid = 0.5 * (lo + hi);
    if (kl_divergence(tilt(mid), p) <= delta)
      lo = mid;
    else
      hi = mid;
  }
  return finish(tilt(lo));
}

// Groups of cost blocks sharing one ambiguity set.
struct CostGroups {
  std::vector<std::vector<int>> blocks;  // group -> indices into model.cost_blocks
  std::vector<std::vector<double>> p;    // group -> reference weights
};

inline CostGroups cost_groups(const ModelInstance& model, const AmbiguitySpec& spec) {
  if (model.cost_blocks.empty() || !model.cost_blocks_weighted)
    fail(ErrorCode::objective_not_separable, model.name + ": objective has no tagged per-scenario operational cost");
  if (!spec.weights.empty() && spec.weights.size() != model.cost_blocks.size())
    fail(ErrorCode::dimension_mismatch, "reference weights do not match the cost blocks");
  if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta))
    fail(ErrorCode::validation, "KL radius must be finite and >= 0");
  CostGroups g;
  g.blocks.resize(model.cost_groups);
  g.p.resize(model.cost_groups);
  for (size_t k = 0; k < model.cost_blocks.size(); ++k) {
    const auto& b = model.cost_blocks[k];
    if (b.group < 0 || b.group >= model.cost_groups)
      fail(ErrorCode::objective_not_separable, "cost block outside the declared groups");
    g.blocks[b.group].push_back(static_cast<int>(k));
    g.p[b.group].push_back(spec.weights.empty() ? b.probability : spec.weights[k]);
  }
  for (int j = 0; j < model.cost_groups; ++j) {
    if (g.blocks[j].empty()) fail(ErrorCode::objective_not_separable, "empty ambiguity group");
    check_simplex(g.p[j], "reference weights");
  }
  return g;
}

inline double block_cost(const CostBlock& b, const std::vector<double>& x) {
  double s = 0.0;
  for (size_t k = 0; k < b.vars.size(); ++k) s += b.coefs[k] * x[b.vars[k]];
  return s;
}

// Objective with the probability-weighted operational terms removed.
inline std::vector<double> strategic_objective(const ModelInstance& model) {
  std::vector<double> obj = model.obj;
  for (const auto& b : model.cost_blocks)
    for (size_t k = 0; k < b.vars.size(); ++k) obj[b.vars[k]] -= b.probability * b.coefs[k];
  return obj;
}

struct DroLayout {
  int groups = 0;
  int alpha = 0, beta = 0;  // (group)
  int zeta = 0, gamma = 0;  // (cost block)
  int first_var = 0, num_vars = 0;
  int epigraph_row = 0;
};

struct DroModel {
  ModelInstance model;
  DroLayout layout;
};

// Per group: alpha + delta beta + sum_d P_d gamma_d. Discounting and day counts stay inside c_d.
// delta = 0 keeps the nominal weighted objective: the dual infimum is then approached only as beta -> inf.
inline DroModel build_dro(const ModelInstance& model, const AmbiguitySpec& spec) {
  auto groups = cost_groups(model, spec);
  DroModel out;
  out.model = model;
  out.model.name = model.name + "/dro";
  auto& m = out.model;
  auto& L = out.layout;
  L.groups = model.cost_groups;
  L.first_var = m.num_vars();
  L.epigraph_row = m.num_rows();
  if (spec.delta == 0.0) {
    if (!spec.weights.empty()) {
      m.obj = strategic_objective(model);
      for (size_t k = 0; k < m.cost_blocks.size(); ++k) {
        auto& b = m.cost_blocks[k];
        b.probability = spec.weights[k];
        for (size_t i = 0; i < b.vars.size(); ++i) m.obj[b.vars[i]] += b.probability * b.coefs[i];
      }
    }
    return out;
  }
  m.obj = strategic_objective(model);
  m.cost_blocks_weighted = false;
  const int G = L.groups, B = static_cast<int>(model.cost_blocks.size());
  L.alpha = m.add_block("dro_alpha", {G}, -kInf, kInf, 1.0);
  L.beta = m.add_block("dro_beta", {G}, 0.0, kInf, spec.delta);
  L.zeta = m.add_block("dro_zeta", {B}, -kInf, kInf);
  L.gamma = m.add_block("dro_gamma", {B}, -kInf, kInf);
  L.num_vars = m.num_vars() - L.first_var;
  m.begin_rows("dro_epigraph", "alpha - zeta >= scenario operational cost");
  for (int j = 0; j < G; ++j)
    for (size_t i = 0; i < groups.blocks[j].size(); ++i) {
      int k = groups.blocks[j][i];
      const auto& b = model.cost_blocks[k];
      m.obj[L.gamma + k] = groups.p[j][i];
      LinExpr e;
      e.add(L.alpha + j, 1.0);
      e.add(L.zeta + k, -1.0);
      for (size_t t = 0; t < b.vars.size(); ++t) e.add(b.vars[t], -b.coefs[t]);
      m.add_row(e, Sense::ge, 0.0);
      m.add_cone(ConeKind::dual_exponential, {L.beta + j, L.zeta + k, L.gamma + k}, {-1.0, 1.0, 1.0});
    }
  return out;
}

// Strategic cost plus the exact worst-case expectation of every group at x.
inline double evaluate_worst_case(const ModelInstance& model, const AmbiguitySpec& spec, const std::vector<double>& x,
                                  std::vector<WorstCase>* per_group = nullptr) {
  auto groups = cost_groups(model, spec);
  auto obj = strategic_objective(model);
  double v = model.obj_offset;
  for (size_t j = 0; j < obj.size(); ++j) v += obj[j] * x[j];
  if (per_group) per_group->clear();
  for (size_t g = 0; g < groups.blocks.size(); ++g) {
    std::vector<double> c;
    for (int k : groups.blocks[g]) c.push_back(block_cost(model.cost_blocks[k], x));
    auto wc = worst_case_expectation(c, groups.p[g], spec.delta);
    v += wc.value;
    if (per_group) per_group->push_back(std::move(wc));
  }
  return v;
}

struct CuttingPlaneResult {
  SolveOutcome outcome;  // x over the original model's variables; objective = worst-case value
  int iterations = 0;
  std::vector<double> lower_bounds, upper_bounds;
};

// Kelley cuts: eta_g >= sum_d Q_d c_d(x) for each pessimized Q seen so far, starting from Q = P.
inline CuttingPlaneResult solve_dro_cutting_plane(const ModelInstance& model, const AmbiguitySpec& spec,
                                                  const SolveOptions& opt = {}, int max_iterations = 200,
                                                  double gap_tol = 1e-6) {
  auto groups = cost_groups(model, spec);
  const int G = model.cost_groups, n = model.num_vars();
  ModelInstance master = model;
  master.name = model.name + "/dro-master";
  master.obj = strategic_objective(model);
  master.cost_blocks_weighted = false;
  const int eta = master.add_block("dro_eta", {G}, -kInf, kInf, 1.0);
  master.begin_rows("dro_cuts", "eta >= E_Q cost");
  auto add_cut = [&](int g, const std::vector<double>& q) {
    LinExpr e;
    e.add(eta + g, 1.0);
    for (size_t i = 0; i < groups.blocks[g].size(); ++i) {
      const auto& b = model.cost_blocks[groups.blocks[g][i]];
      for (size_t t = 0; t < b.vars.size(); ++t) e.add(b.vars[t], -q[i] * b.coefs[t]);
    }
    master.add_row(e, Sense::ge, 0.0);
  };
  for (int g = 0; g < G; ++g) add_cut(g, groups.p[g]);

  CuttingPlaneResult res;
  double best = kInf;
  for (int it = 1; it <= max_iterations; ++it) {
    auto out = solve_optimal(master, opt);
    res.iterations = it;
    res.lower_bounds.push_back(std::max(out.objective, res.lower_bounds.empty() ? -kInf : res.lower_bounds.back()));
    std::vector<double> x(out.x.begin(), out.x.begin() + n);
    std::vector<WorstCase> wc;
    double ub = evaluate_worst_case(model, spec, x, &wc);
    res.upper_bounds.push_back(ub);
    if (ub < best) {
      best = ub;
      res.outcome = out;
      res.outcome.x = x;
      res.outcome.objective = ub;
    }
    res.outcome.iterations = it;
    if (best - res.lower_bounds.back() <= gap_tol * std::max(1.0, std::abs(best))) return res;
    for (int g = 0; g < G; ++g) {
      double cut = 0.0;
      for (size_t i = 0; i < groups.blocks[g].size(); ++i)
        cut += wc[g].q[i] * block_cost(model.cost_blocks[groups.blocks[g][i]], x);
      if (cut > out.x[eta + g] + 1e-12 * std::max(1.0, std::abs(cut))) add_cut(g, wc[g].q);
    }
  }
  fail(ErrorCode::iteration_limit, "cutting-plane DRO did not close the gap within " + std::to_string(max_iterations) +
                                        " iterations");
}

}  // namespace helios::dro
