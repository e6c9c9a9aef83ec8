#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "helios/core/error.hpp"
#include "helios/saa/solution.hpp"

namespace helios::eval {

// v~ = v (1 + N(mu, (mu/10)^2)) entrywise, mu ~ U[-0.25, 0.25] drawn once unless given.
inline CapacityFactorDataset perturb_dataset(const CapacityFactorDataset& data, uint64_t seed,
                                             std::optional<double> mu = std::nullopt, double* mu_used = nullptr) {
  std::mt19937_64 rng(seed);
  const double m = mu ? *mu : std::uniform_real_distribution<double>(-0.25, 0.25)(rng);
  if (mu_used) *mu_used = m;
  std::normal_distribution<double> Z(0.0, 1.0);
  const double sd = std::abs(m) / 10.0;
  CapacityFactorDataset out = data;
  if (m == 0.0) return out;
  for (auto& day : out.days)
    for (double& v : day.values) v = std::clamp(v * (1.0 + m + sd * Z(rng)), 0.0, 1.0);
  return out;
}

struct NpvBreakdown {
  double npv = 0.0;
  double baseline_operational = 0.0;  // sum rho^t cost_x(baseline)
  double plan_operational = 0.0;      // sum rho^t cost_x(plan)
  double investment = 0.0;            // sum rho^t cost_z(plan), no salvage
};

// NPV = sum_t rho^t (baseline_t - plan_t - invest_t), t = 1..|Y|.
inline NpvBreakdown compute_npv(const std::vector<double>& baseline_op, const std::vector<double>& plan_op,
                                const std::vector<double>& investment, double rho) {
  if (baseline_op.size() != plan_op.size() || plan_op.size() != investment.size())
    fail(ErrorCode::horizon_mismatch, "baseline, plan and investment streams differ in length");
  NpvBreakdown r;
  double f = 1.0;
  for (size_t t = 0; t < plan_op.size(); ++t) {
    f *= rho;
    r.baseline_operational += f * baseline_op[t];
    r.plan_operational += f * plan_op[t];
    r.investment += f * investment[t];
  }
  r.npv = r.baseline_operational - r.plan_operational - r.investment;
  return r;
}

inline NpvBreakdown compute_npv(const PlanningInstance& inst, const PlanSolution& plan, const PlanSolution& baseline) {
  if (plan.dispatch.years != baseline.dispatch.years || plan.plan.years != baseline.plan.years)
    fail(ErrorCode::horizon_mismatch, "plan and baseline cover different horizons");
  return compute_npv(annual_operational_cost(inst, baseline.dispatch), annual_operational_cost(inst, plan.dispatch),
                     annual_investment_cost(inst, plan.plan), inst.costs.discount);
}

// Expected grid-purchase emissions per year, tonnes CO2.
inline std::vector<double> annual_emissions(const PlanningInstance& inst, const DispatchSchedule& ds) {
  const auto& sc = *inst.scenarios;
  const auto& E = inst.emissions;
  std::vector<double> v(ds.years, 0.0);
  for (int y = 0; y < ds.years; ++y)
    for (int m = 0; m < ds.months; ++m) {
      double days = inst.time.days(m, y) / static_cast<double>(sc.segment_days);
      for (int d = 0; d < ds.scenarios; ++d) {
        int blk = ds.block(d, m, y);
        double kg = 0.0;
        for (int h = 0; h < ds.hours; ++h)
          for (int n = 0; n < ds.sites; ++n) {
            size_t i = ds.site_index(blk, h, n);
            kg += E.onee * ds.onee[i] + E.nareva * ds.nareva[i];
          }
        v[y] += days * sc.weight(d, m) * kg / 1000.0;
      }
    }
  return v;
}

inline double emissions_reduction(double plan, double baseline) {
  if (!(std::abs(baseline) > 0.0)) fail(ErrorCode::zero_baseline, "baseline emissions are zero");
  return 1.0 - plan / baseline;
}

struct EmissionsSummary {
  double plan = 0.0, baseline = 0.0;  // tonnes over the horizon
  double reduction = 0.0;             // 1 - plan / baseline
};

inline EmissionsSummary compute_emissions(const PlanningInstance& inst, const DispatchSchedule& plan,
                                          const DispatchSchedule& baseline) {
  if (plan.years != baseline.years) fail(ErrorCode::horizon_mismatch, "plan and baseline cover different horizons");
  EmissionsSummary s;
  for (double v : annual_emissions(inst, plan)) s.plan += v;
  for (double v : annual_emissions(inst, baseline)) s.baseline += v;
  s.reduction = emissions_reduction(s.plan, s.baseline);
  return s;
}

// One-sided sign test: P(X >= wins) for X ~ Binomial(n, 1/2).
inline double sign_test_p(int wins, int n) {
  if (n <= 0) return 1.0;
  double p = 0.0;
  for (int k = wins; k <= n; ++k) p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
  return std::min(1.0, p);
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

inline double stdev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

}  // namespace helios::eval
