#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "helios/realtime/replay.hpp"
#include "helios/saa/solution.hpp"

using namespace helios;
using namespace helios::realtime;

namespace {

CapacityFactorDataset centroid_days(const PlanningInstance& inst, int month = 0) {
  const auto& sc = *inst.scenarios;
  CapacityFactorDataset ds;
  ds.sites = sc.sites;
  ds.hours = 24;
  for (int d = 0; d < sc.scenarios; ++d) {
    CapacityFactorDay day;
    day.date = "2025-01-" + std::to_string(10 + d);
    day.month = month;
    for (int s = 0; s < sc.site_count(); ++s)
      for (int h = 0; h < 24; ++h) day.values.push_back(sc.centroid(d, s, h));
    ds.days.push_back(day);
  }
  return ds;
}

CapacityFactorDataset noisy_days(const PlanningInstance& inst, int count, uint64_t seed) {
  auto base = centroid_days(inst);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.6, 1.2);
  CapacityFactorDataset ds;
  ds.sites = base.sites;
  ds.hours = 24;
  for (int i = 0; i < count; ++i) {
    auto day = base.days[i % base.days.size()];
    day.date = "day" + std::to_string(i);
    for (double& v : day.values) v = std::min(1.0, v * U(rng));
    ds.days.push_back(day);
  }
  return ds;
}

PlanSolution saa_plan(const PlanningInstance& inst) {
  auto sm = build_saa(inst);
  return extract_solution(inst, sm, solve_optimal(sm.model));
}

ForecastTrace exact_trace(const PlanningInstance& inst, const std::vector<double>& v, int observed) {
  return ForecastTrace::clamped(inst.sites(), 24, observed, v);
}

}  // namespace

TEST(Realtime, FirstHourWithCentroidForecastMatchesSaaBlock) {
  auto inst = fixtures::toy_instance(1, 1, 3);
  auto sol = saa_plan(inst);
  auto days = centroid_days(inst);
  ASSERT_GT(sol.plan.z(0, 0) + sol.plan.b(0, 0), 0.0);
  for (int d = 0; d < 3; ++d) {
    auto st = SystemState::initial(inst, sol.plan, 0, 0);
    auto rm = build_realtime(inst, st, exact_trace(inst, realized_day(inst, days, d, 0), 0));
    double saa = sol.block_cost[d];
    EXPECT_NEAR(solve_optimal(rm.model).objective, saa, 1e-6 * std::abs(saa)) << "scenario " << d;
  }
}

TEST(Realtime, ZeroNoiseReplayMatchesSaaOperationalCost) {
  auto inst = fixtures::toy_instance(1, 1, 3);
  auto sol = saa_plan(inst);
  auto rep = replay(inst, sol.plan, centroid_days(inst));
  for (int d = 0; d < 3; ++d) {
    EXPECT_TRUE(rep.days[d].feasible);
    EXPECT_NEAR(rep.days[d].cost, sol.block_cost[d], 1e-6 * std::abs(sol.block_cost[d])) << "scenario " << d;
  }
}

TEST(Realtime, NoAssetsBuysFromCheapestProvider) {
  auto inst = fixtures::toy_instance(1, 1, 2, false);
  auto rep = replay(inst, InvestmentPlan::zero(1, 1), centroid_days(inst));
  double expect = 0.0;
  for (int h = 0; h < 24; ++h) expect += 100.0 * std::min(io::onee_tariff(h), 0.78);
  for (const auto& d : rep.days) {
    EXPECT_NEAR(d.cost, expect, 1e-6 * expect);
    EXPECT_NEAR(d.sales_kwh, 0.0, 1e-6);
  }
}

TEST(Realtime, LastHourIsSingleHourAndClosesStorage) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  auto sol = saa_plan(inst);
  auto days = centroid_days(inst);
  auto v = realized_day(inst, days, 0, 0);
  std::mt19937_64 rng(1);
  auto rep = replay_day(inst, sol.plan, v, 0, 0, noisy_forecaster(v, inst.sites(), 24, {}), rng);
  auto st = SystemState::initial(inst, sol.plan, 0, 0);
  st.history.assign(rep.actions.begin(), rep.actions.begin() + 23);
  st.hour = 23;
  auto rm = build_realtime(inst, st, exact_trace(inst, v, 24));
  EXPECT_EQ(rm.layout.K, 1);
  EXPECT_EQ(rm.model.num_vars(), 2 * inst.arcs() + 5 * inst.sites());
  auto x = solve_optimal(rm.model).x;
  auto act = extract_action(rm.layout, x);
  const double psi = inst.costs.battery_retention;
  for (int n = 0; n < inst.sites(); ++n)
    EXPECT_NEAR(psi * act.storage[n] - act.discharge[n], st.start_storage()[n], 1e-6 * std::max(1.0, st.battery[n]));
}

TEST(Realtime, SizeLinearInRemainingHours) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  auto st = SystemState::initial(inst, InvestmentPlan::zero(2, 1), 0, 0);
  auto rm = build_realtime(inst, st, exact_trace(inst, std::vector<double>(48, 0.0), 0));
  EXPECT_EQ(rm.model.num_vars(), 24 * (2 * inst.arcs() + 5 * inst.sites()));
}

TEST(Realtime, OversoldHistoryIsInfeasibleResidual) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  auto sol = saa_plan(inst);
  auto v = realized_day(inst, centroid_days(inst), 0, 0);
  auto st = SystemState::initial(inst, sol.plan, 0, 0);
  HourAction a;
  a.flow_pos.assign(1, 0.0);
  a.flow_neg.assign(1, 0.0);
  a.storage.assign(2, 0.0);
  a.discharge.assign(2, 0.0);
  a.onee.assign(2, 0.0);
  a.nareva.assign(2, 0.0);
  a.sales = {1.0e7, 0.0};
  st.history.push_back(a);
  st.hour = 1;
  try {
    build_realtime(inst, st, exact_trace(inst, v, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::infeasible_residual);
  }
  EXPECT_NO_THROW(build_realtime(inst, st, exact_trace(inst, v, 1), {true}));
}

TEST(Realtime, RejectsInconsistentState) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  auto st = SystemState::initial(inst, InvestmentPlan::zero(2, 1), 0, 0);
  auto fc = exact_trace(inst, std::vector<double>(48, 0.0), 0);
  st.hour = 3;  // no history
  EXPECT_THROW(build_realtime(inst, st, fc), Error);
  st.hour = 24;
  EXPECT_THROW(build_realtime(inst, st, fc), Error);
  st.hour = 0;
  fc.values.pop_back();
  EXPECT_THROW(build_realtime(inst, st, fc), Error);
}

TEST(Realtime, CommittedActionsIgnoreTheFuture) {
  // forecasts that do not look at realized values: changing hours after t must not move hours <= t
  auto inst = fixtures::toy_instance(1, 1, 3);
  auto sol = saa_plan(inst);
  auto days = noisy_days(inst, 50, 9);
  std::vector<double> climatology(48, 0.0);
  for (int h = 6; h < 19; ++h) climatology[h] = 0.6 * std::sin(M_PI * (h - 5.5) / 13.0);
  Forecaster fixed = [&](int, std::mt19937_64&) { return climatology; };
  std::mt19937_64 pick(4);
  for (int i = 0; i < days.day_count(); ++i) {
    auto v = realized_day(inst, days, i, 0);
    int t = std::uniform_int_distribution<int>(0, 22)(pick);
    auto w = v;
    for (int h = t + 1; h < 24; ++h) w[h] = std::min(1.0, 0.3 + 0.5 * w[h]);
    std::mt19937_64 r1(1), r2(1);
    auto a = replay_day(inst, sol.plan, v, 0, 0, fixed, r1);
    auto b = replay_day(inst, sol.plan, w, 0, 0, fixed, r2);
    for (int h = 0; h <= t; ++h) {
      EXPECT_EQ(a.actions[h].sales, b.actions[h].sales) << "day " << i << " hour " << h;
      EXPECT_EQ(a.actions[h].onee, b.actions[h].onee);
      EXPECT_EQ(a.actions[h].discharge, b.actions[h].discharge);
      EXPECT_EQ(a.actions[h].flow_pos, b.actions[h].flow_pos);
    }
  }
}

TEST(Realtime, NoisyReplayConservesEnergyAndHonorsSellCap) {
  auto inst = fixtures::toy_instance(1, 1, 3);
  auto sol = saa_plan(inst);
  auto days = noisy_days(inst, 30, 2);
  ReplayOptions opt;
  opt.noise = {0.15, 0.8};
  opt.seed = 5;
  auto rep = replay(inst, sol.plan, days, opt);
  const auto& net = inst.network;
  const auto& C = inst.costs;
  const double zbar = sol.plan.cumulative_solar(0, 0, C.solar_degradation);
  for (int i = 0; i < days.day_count(); ++i) {
    auto v = realized_day(inst, days, i, 0);
    const auto& day = rep.days[i];
    EXPECT_TRUE(day.feasible) << "day " << i;
    double sold = 0.0, cap = 0.0;
    for (int h = 0; h < 24; ++h) {
      const auto& a = day.actions[h];
      for (int n = 0; n < 2; ++n) {
        double inflow = 0.0;
        if (net.arc_to(0) == n) inflow += net.arcs[0].efficiency * a.flow_pos[0] - a.flow_neg[0];
        if (net.arc_from(0) == n) inflow += net.arcs[0].efficiency * a.flow_neg[0] - a.flow_pos[0];
        double solar = n == 0 ? v[h] * zbar : 0.0;
        double lhs = inflow + C.discharge_rate * a.discharge[n] + a.onee[n] + a.nareva[n] - a.sales[n] + solar;
        EXPECT_GE(lhs, inst.demand.at(n, h, 0, 0) - 1e-6) << "day " << i << " hour " << h << " site " << n;
      }
      sold += a.sales[0];
      cap += v[h] * zbar;
      if (h < 23) {
        double next = C.battery_retention * a.storage[0] - a.discharge[0];
        EXPECT_NEAR(day.actions[h + 1].storage[0], next, 1e-6 * std::max(1.0, next));
      }
    }
    EXPECT_LE(sold, C.sell_fraction * cap + 1e-6);
  }
  EXPECT_DOUBLE_EQ(rep.summary.feasibility_rate, 1.0);
}

TEST(Realtime, ThreadCountDoesNotChangeResults) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  auto sol = saa_plan(inst);
  auto days = noisy_days(inst, 6, 3);
  ReplayOptions opt;
  opt.noise = {0.1, 0.5};
  auto a = replay(inst, sol.plan, days, opt);
  opt.threads = 3;
  auto b = replay(inst, sol.plan, days, opt);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(a.days[i].cost, b.days[i].cost);
}

TEST(Realtime, ActionCsvHasOneRowPerQuantity) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  auto rep = replay(inst, InvestmentPlan::zero(2, 1), centroid_days(inst));
  std::ostringstream os;
  write_actions_csv(os, inst, rep);
  std::string s = os.str();
  EXPECT_EQ(s.rfind("day,hour,site,action,value\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 2 * 24 * (5 * 2 + 1));
}

TEST(Realtime, EmptyDatasetRejected) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  CapacityFactorDataset empty;
  empty.sites = {"A"};
  EXPECT_THROW(replay(inst, InvestmentPlan::zero(2, 1), empty), Error);
}
