#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "helios/core/parallel.hpp"
#include "helios/evaluation/metrics.hpp"
#include "helios/plan/pipeline.hpp"

namespace helios::eval {

struct SweepPoint {
  double budget = 0.0;
  bool ok = false;
  std::string error;
  double objective = 0.0;
  double operational = 0.0;     // expected discounted rent + energy
  double investment = 0.0;      // discounted, no salvage
  double emissions = 0.0;       // tonnes over the horizon
  double reduction = 0.0;       // vs the zero-investment baseline
  double npv = 0.0;
  double battery_kwh = 0.0, solar_kw = 0.0;
  std::vector<double> battery_by_year, solar_by_year;  // summed over sites
};

struct SweepShape {
  bool operational_nonincreasing = true;
  bool objective_nonincreasing = true;
  bool diminishing_reduction = true;  // marginal reduction per MAD falls from the first to the last step
  bool interior_npv_max = true;
  int npv_argmax = -1;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  double baseline_operational = 0.0, baseline_emissions = 0.0;
  SweepShape shape;
  std::vector<std::string> warnings;
};

struct SweepOptions {
  PlanOptions plan;
  int threads = 1;
  double tolerance = 1e-7;  // relative slack on monotonicity checks
  std::function<void(int done, int total)> progress;  // called from worker threads
};

inline SweepPoint sweep_point(const PlanningInstance& inst, const PlanSolution& sol, const PlanSolution& base,
                              double base_emissions) {
  SweepPoint p;
  p.budget = inst.costs.budget;
  p.ok = true;
  p.objective = sol.objective;
  p.operational = sol.breakdown.rent + sol.breakdown.energy;
  auto npv = compute_npv(inst, sol, base);
  p.npv = npv.npv;
  p.investment = npv.investment;
  for (double v : annual_emissions(inst, sol.dispatch)) p.emissions += v;
  p.reduction = emissions_reduction(p.emissions, base_emissions);
  p.battery_by_year.assign(sol.plan.years, 0.0);
  p.solar_by_year.assign(sol.plan.years, 0.0);
  for (int n = 0; n < sol.plan.sites; ++n)
    for (int y = 0; y < sol.plan.years; ++y) {
      p.battery_by_year[y] += sol.plan.b(n, y);
      p.solar_by_year[y] += sol.plan.z(n, y);
    }
  for (int y = 0; y < sol.plan.years; ++y) {
    p.battery_kwh += p.battery_by_year[y];
    p.solar_kw += p.solar_by_year[y];
  }
  return p;
}

inline SweepShape sweep_shape(const std::vector<SweepPoint>& pts, double tol) {
  SweepShape s;
  std::vector<const SweepPoint*> ok;
  for (const auto& p : pts)
    if (p.ok) ok.push_back(&p);
  for (size_t i = 1; i < ok.size(); ++i) {
    if (ok[i]->operational > ok[i - 1]->operational + tol * std::abs(ok[i - 1]->operational))
      s.operational_nonincreasing = false;
    if (ok[i]->objective > ok[i - 1]->objective + tol * std::abs(ok[i - 1]->objective)) s.objective_nonincreasing = false;
  }
  if (ok.size() >= 3) {
    auto slope = [&](size_t i) { return (ok[i + 1]->reduction - ok[i]->reduction) / (ok[i + 1]->budget - ok[i]->budget); };
    s.diminishing_reduction = slope(ok.size() - 2) < slope(0);
    size_t arg = 0;
    for (size_t i = 1; i < ok.size(); ++i)
      if (ok[i]->npv > ok[arg]->npv) arg = i;
    s.npv_argmax = static_cast<int>(arg);
    s.interior_npv_max = arg > 0 && arg + 1 < ok.size();
  } else {
    s.diminishing_reduction = s.interior_npv_max = false;
  }
  return s;
}

// Budgets ascending. Failed points are kept with ok = false and the sweep continues.
inline SweepReport budget_sweep(const PlanningInstance& inst, const std::vector<double>& budgets,
                                const SweepOptions& opt = {}) {
  if (budgets.empty()) fail(ErrorCode::validation, "budget list is empty");
  for (size_t i = 0; i < budgets.size(); ++i) {
    if (!(budgets[i] >= 0.0) || !std::isfinite(budgets[i])) fail(ErrorCode::validation, "budgets must be finite and >= 0");
    if (i > 0 && budgets[i] < budgets[i - 1]) fail(ErrorCode::validation, "budgets must be sorted ascending");
  }
  PlanningInstance b0 = inst;
  b0.costs.budget = 0.0;
  const PlanSolution base = solve_plan(b0, opt.plan);
  SweepReport rep;
  rep.baseline_operational = base.breakdown.rent + base.breakdown.energy;
  for (double v : annual_emissions(b0, base.dispatch)) rep.baseline_emissions += v;
  rep.points.resize(budgets.size());
  std::atomic<int> done{0};
  parallel_for(static_cast<int>(budgets.size()), opt.threads, [&](int i) {
    PlanningInstance pi = inst;
    pi.costs.budget = budgets[i];
    try {
      rep.points[i] = budgets[i] == 0.0 ? sweep_point(pi, base, base, rep.baseline_emissions)
                                        : sweep_point(pi, solve_plan(pi, opt.plan), base, rep.baseline_emissions);
    } catch (const std::exception& e) {
      rep.points[i].budget = budgets[i];
      rep.points[i].error = e.what();
    }
    if (opt.progress) opt.progress(++done, static_cast<int>(budgets.size()));
  });
  for (const auto& p : rep.points)
    if (!p.ok) rep.warnings.push_back("budget " + std::to_string(p.budget) + " failed: " + p.error);
  rep.shape = sweep_shape(rep.points, opt.tolerance);
  if (!rep.shape.operational_nonincreasing) rep.warnings.push_back("operational cost increases with the budget");
  if (!rep.shape.objective_nonincreasing) rep.warnings.push_back("objective increases with the budget");
  if (!rep.shape.diminishing_reduction) rep.warnings.push_back("emissions reduction shows no diminishing returns");
  if (!rep.shape.interior_npv_max) rep.warnings.push_back("NPV maximum lies at an end of the budget grid");
  return rep;
}

inline void write_sweep_csv(std::ostream& os, const SweepReport& rep) {
  os << "budget,status,objective,operational_cost,investment_cost,npv,emissions_t,emissions_reduction,battery_kwh,solar_kw\n";
  os.precision(12);
  for (const auto& p : rep.points) {
    os << p.budget << ',' << (p.ok ? "ok" : "failed") << ',';
    if (p.ok)
      os << p.objective << ',' << p.operational << ',' << p.investment << ',' << p.npv << ',' << p.emissions << ','
         << p.reduction << ',' << p.battery_kwh << ',' << p.solar_kw << '\n';
    else
      os << ",,,,,,,\n";
  }
}

struct ScenarioCount {
  int k = 5;
  int length = 1;  // 2 or 3: chained multi-day scenarios
};

struct SensitivityRow {
  ScenarioCount count;
  int scenarios = 0;
  double objective = 0.0, investment = 0.0, operational = 0.0, emissions = 0.0;
  double battery_kwh = 0.0, solar_kw = 0.0;
};

struct SensitivityReport {
  std::vector<SensitivityRow> rows;
  // (max - min) / mean over the rows
  double objective_spread = 0.0, investment_spread = 0.0, operational_spread = 0.0, emissions_spread = 0.0;
  double solar_spread = 0.0, battery_spread = 0.0;
};

inline double relative_spread(const std::vector<double>& v) {
  double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
  double m = mean(v);
  return m == 0.0 ? (hi == lo ? 0.0 : kInf) : (hi - lo) / std::abs(m);
}

// Re-reduces the dataset for each count and solves the same planning problem.
inline SensitivityReport sensitivity_scenarios(const PlanningInstance& inst, const CapacityFactorDataset& data,
                                               const std::vector<ScenarioCount>& counts, uint64_t seed,
                                               const SweepOptions& opt = {}) {
  if (counts.size() < 2) fail(ErrorCode::validation, "sensitivity needs at least two scenario counts");
  SensitivityReport rep;
  rep.rows.resize(counts.size());
  parallel_for(static_cast<int>(counts.size()), opt.threads, [&](int i) {
    PlanningInstance pi = inst;
    attach_scenarios(pi, data, counts[i].k, seed, counts[i].length);
    auto sol = solve_plan(pi, opt.plan);
    auto& r = rep.rows[i];
    r.count = counts[i];
    r.scenarios = pi.scenarios->scenarios;
    r.objective = sol.objective;
    r.investment = sol.breakdown.battery + sol.breakdown.solar;
    r.operational = sol.breakdown.rent + sol.breakdown.energy;
    for (double v : annual_emissions(pi, sol.dispatch)) r.emissions += v;
    for (double v : sol.plan.battery) r.battery_kwh += v;
    for (double v : sol.plan.solar) r.solar_kw += v;
  });
  std::vector<double> obj, inv, op, em, pv, bat;
  for (const auto& r : rep.rows) {
    obj.push_back(r.objective);
    pv.push_back(r.solar_kw);
    bat.push_back(r.battery_kwh);
    inv.push_back(r.investment);
    op.push_back(r.operational);
    em.push_back(r.emissions);
  }
  rep.objective_spread = relative_spread(obj);
  rep.investment_spread = relative_spread(inv);
  rep.solar_spread = relative_spread(pv);
  rep.battery_spread = relative_spread(bat);
  rep.operational_spread = relative_spread(op);
  rep.emissions_spread = relative_spread(em);
  return rep;
}

}  // namespace helios::eval
