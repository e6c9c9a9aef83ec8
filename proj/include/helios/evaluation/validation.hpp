#pragma once

// Out-of-sample cost of a fixed plan on held-out capacity-factor days.

#include <string>
#include <vector>

#include "helios/core/parallel.hpp"
#include "helios/realtime/replay.hpp"

namespace helios::eval {

struct DayOutcome {
  double cost = 0.0;       // MAD, undiscounted
  double emissions = 0.0;  // kg CO2
};

// Full-information dispatch of one day: the hour-0 rolling model with the realized trace. With exact
// forecasts every later re-solve keeps this schedule optimal, so it equals a zero-noise replay.
inline DayOutcome perfect_foresight_day(const PlanningInstance& inst, const InvestmentPlan& plan,
                                        const std::vector<double>& realized, int month, int year,
                                        const SolveOptions& sopt = {}) {
  const int N = inst.sites(), T = inst.time.hours_per_day;
  auto st = realtime::SystemState::initial(inst, plan, month, year);
  auto rm = realtime::build_realtime(inst, st, realtime::ForecastTrace::clamped(N, T, T, realized));
  auto out = solve_optimal(rm.model, sopt);
  DayOutcome d;
  for (int k = 0; k < T; ++k) {
    auto a = realtime::extract_action(rm.layout, out.x, k);
    d.cost += realtime::hour_cost(inst, month, k, a);
    for (int n = 0; n < N; ++n) d.emissions += inst.emissions.onee * a.onee[n] + inst.emissions.nareva * a.nareva[n];
  }
  return d;
}

struct SampleCost {
  double operational = 0.0;  // sum_y rho^y sum_m days(m,y) * mean day cost of month m
  double investment = 0.0;   // discounted investment net of salvage, as in the planning objective
  double emissions = 0.0;    // tonnes over the horizon
  double total() const { return operational + investment; }
};

struct EvalOptions {
  int threads = 1;
  SolveOptions solver;
};

// Month means over the chosen days scale to calendar months of every planning year.
inline SampleCost evaluate_on_days(const PlanningInstance& inst, const InvestmentPlan& plan,
                                   const CapacityFactorDataset& data, const std::vector<int>& days,
                                   const EvalOptions& opt = {}) {
  const int M = inst.time.months, Y = inst.years();
  std::vector<int> per_month(M, 0);
  for (int i : days) {
    int m = data.days.at(i).month;
    if (m < 0 || m >= M) fail(ErrorCode::validation, "day " + data.days[i].date + " has month out of range");
    per_month[m]++;
  }
  for (int m = 0; m < M; ++m)
    if (per_month[m] == 0) fail(ErrorCode::insufficient_days, "no evaluation days in month " + std::to_string(m + 1));
  const int D = static_cast<int>(days.size());
  std::vector<DayOutcome> out(static_cast<size_t>(Y) * D);
  parallel_for(Y * D, opt.threads, [&](int k) {
    int y = k / D, i = days[k % D];
    out[k] = perfect_foresight_day(inst, plan, realtime::realized_day(inst, data, i, y), data.days[i].month, y,
                                   opt.solver);
  });
  const auto& C = inst.costs;
  SampleCost s;
  for (int y = 0; y < Y; ++y) {
    const double rho = C.discount_factor(y);
    for (int k = 0; k < D; ++k) {
      int m = data.days[days[k]].month;
      double w = inst.time.days(m, y) / static_cast<double>(per_month[m]);
      s.operational += rho * w * out[static_cast<size_t>(y) * D + k].cost;
      s.emissions += w * out[static_cast<size_t>(y) * D + k].emissions / 1000.0;
    }
  }
  const double rhoY = C.discount_factor(Y - 1);
  for (int y = 0; y < Y; ++y)
    for (int n = 0; n < plan.sites; ++n) {
      double c = C.battery_cost[y] * plan.b(n, y) + C.solar_cost[y] * plan.z(n, y);
      s.investment += (C.discount_factor(y) - rhoY) * c;
    }
  return s;
}

}  // namespace helios::eval
