#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "helios/saa/builder.hpp"
#include "helios/solver/solve.hpp"

namespace helios {

struct ObjectiveBreakdown {
  double battery = 0.0;  // sum c_b rho^y b
  double solar = 0.0;    // sum c_s rho^y z
  double rent = 0.0;     // expected discounted line rent
  double energy = 0.0;   // expected discounted purchases minus sales
  double salvage = 0.0;  // -rho^|Y| (c_b b + c_s z)
  double adjustment = 0.0;  // objective minus the nominal terms (worst-case premium of DRO models)

  double nominal() const { return battery + solar + rent + energy + salvage; }
  double total() const { return nominal() + adjustment; }
};

struct PlanSolution {
  InvestmentPlan plan;
  DispatchSchedule dispatch;
  double objective = 0.0;
  ObjectiveBreakdown breakdown;
  std::vector<double> annual_operational;  // expected operational cost in year y, undiscounted
  std::vector<double> annual_investment;   // c_b b + c_s z in year y, undiscounted
  std::vector<double> block_cost;          // per (d, m, y) block: one day of scenario d, undiscounted
  std::string solver;
  double seconds = 0.0;
  int iterations = 0;
};

inline InvestmentPlan extract_plan(const SaaLayout& L, const std::vector<double>& x) {
  auto p = InvestmentPlan::zero(L.N, L.Y);
  for (int n = 0; n < L.N; ++n)
    for (int y = 0; y < L.Y; ++y) {
      p.battery[static_cast<size_t>(n) * L.Y + y] = std::max(0.0, x[L.ny(L.b, n, y)]);
      p.solar[static_cast<size_t>(n) * L.Y + y] = std::max(0.0, x[L.ny(L.z, n, y)]);
    }
  return p;
}

inline DispatchSchedule extract_dispatch(const SaaLayout& L, const std::vector<double>& x) {
  DispatchSchedule ds;
  ds.hours = L.H;
  ds.scenarios = L.D;
  ds.months = L.M;
  ds.years = L.Y;
  ds.sites = L.N;
  ds.arcs = L.A;
  ds.resize();
  for (int blk = 0; blk < L.blocks(); ++blk)
    for (int h = 0; h < L.H; ++h) {
      for (int a = 0; a < L.A; ++a) {
        ds.flow_pos[ds.arc_index(blk, h, a)] = x[L.arc_var(L.fp, blk, h, a)];
        ds.flow_neg[ds.arc_index(blk, h, a)] = x[L.arc_var(L.fn, blk, h, a)];
      }
      for (int n = 0; n < L.N; ++n) {
        size_t i = ds.site_index(blk, h, n);
        ds.storage[i] = x[L.site_var(L.s, blk, h, n)];
        ds.discharge[i] = x[L.site_var(L.r, blk, h, n)];
        ds.onee[i] = x[L.site_var(L.xo, blk, h, n)];
        ds.nareva[i] = x[L.site_var(L.xn, blk, h, n)];
        ds.sales[i] = x[L.site_var(L.w, blk, h, n)];
      }
    }
  return ds;
}

// Undiscounted operating cost of one scenario day (or extended segment) of block (d,m,y).
inline double dispatch_day_cost(const PlanningInstance& inst, const DispatchSchedule& ds, int d, int m, int y) {
  const auto& T = inst.tariffs;
  const int H24 = inst.time.hours_per_day;
  int blk = ds.block(d, m, y);
  double c = 0.0;
  for (int h = 0; h < ds.hours; ++h) {
    int hd = h % H24;
    for (int a = 0; a < ds.arcs; ++a)
      c += inst.network.arcs[a].rent_price[static_cast<size_t>(m) * H24 + hd] *
           (ds.flow_pos[ds.arc_index(blk, h, a)] + ds.flow_neg[ds.arc_index(blk, h, a)]);
    for (int n = 0; n < ds.sites; ++n) {
      size_t i = ds.site_index(blk, h, n);
      c += T.onee(n, m, hd) * ds.onee[i] + T.nareva(n, m, hd) * ds.nareva[i] - T.feed_in(n, m, hd) * ds.sales[i];
    }
  }
  return c;
}

inline std::vector<double> annual_investment_cost(const PlanningInstance& inst, const InvestmentPlan& p) {
  std::vector<double> v(p.years, 0.0);
  for (int y = 0; y < p.years; ++y)
    for (int n = 0; n < p.sites; ++n)
      v[y] += inst.costs.battery_cost[y] * p.b(n, y) + inst.costs.solar_cost[y] * p.z(n, y);
  return v;
}

// Expected undiscounted operating cost per year under the scenario weights.
inline std::vector<double> annual_operational_cost(const PlanningInstance& inst, const DispatchSchedule& ds) {
  const auto& sc = *inst.scenarios;
  std::vector<double> v(ds.years, 0.0);
  for (int y = 0; y < ds.years; ++y)
    for (int m = 0; m < ds.months; ++m) {
      double days = inst.time.days(m, y) / static_cast<double>(sc.segment_days);
      for (int d = 0; d < ds.scenarios; ++d) v[y] += days * sc.weight(d, m) * dispatch_day_cost(inst, ds, d, m, y);
    }
  return v;
}

// Splits the planning objective into the four cost terms and the salvage credit.
inline ObjectiveBreakdown objective_breakdown(const PlanningInstance& inst, const SaaModel& sm,
                                             const PlanSolution& sol) {
  const SaaLayout& L = sm.layout;
  const auto& P = sol.plan;
  const auto& ds = sol.dispatch;
  if (P.sites != L.N || P.years != L.Y || ds.scenarios != L.D || ds.years != L.Y || ds.months != L.M ||
      ds.hours != L.H || ds.sites != L.N || ds.arcs != L.A)
    fail(ErrorCode::dimension_mismatch, "solution does not match the model dimensions");
  const auto& C = inst.costs;
  const auto& sc = *inst.scenarios;
  const auto& T = inst.tariffs;
  const int H24 = inst.time.hours_per_day;
  const double rhoY = C.discount_factor(L.Y - 1);
  ObjectiveBreakdown br;
  for (int y = 0; y < L.Y; ++y)
    for (int n = 0; n < L.N; ++n) {
      br.battery += C.battery_cost[y] * L.discount[y] * P.b(n, y);
      br.solar += C.solar_cost[y] * L.discount[y] * P.z(n, y);
      br.salvage -= rhoY * (C.battery_cost[y] * P.b(n, y) + C.solar_cost[y] * P.z(n, y));
    }
  for (int y = 0; y < L.Y; ++y)
    for (int m = 0; m < L.M; ++m)
      for (int d = 0; d < L.D; ++d) {
        double w = block_day_weight(inst, L, m, y) * sc.weight(d, m);
        int blk = ds.block(d, m, y);
        for (int h = 0; h < L.H; ++h) {
          int hd = h % H24;
          for (int a = 0; a < L.A; ++a)
            br.rent += w * inst.network.arcs[a].rent_price[static_cast<size_t>(m) * H24 + hd] *
                       (ds.flow_pos[ds.arc_index(blk, h, a)] + ds.flow_neg[ds.arc_index(blk, h, a)]);
          for (int n = 0; n < L.N; ++n) {
            size_t i = ds.site_index(blk, h, n);
            br.energy += w * (T.onee(n, m, hd) * ds.onee[i] + T.nareva(n, m, hd) * ds.nareva[i] -
                              T.feed_in(n, m, hd) * ds.sales[i]);
          }
        }
      }
  br.adjustment = sol.objective - br.nominal();
  return br;
}

inline PlanSolution extract_solution(const PlanningInstance& inst, const SaaModel& sm, const SolveOutcome& out) {
  if (!out.optimal()) fail(ErrorCode::numerical_failure, "no optimal solution to extract");
  PlanSolution sol;
  sol.plan = extract_plan(sm.layout, out.x);
  sol.dispatch = extract_dispatch(sm.layout, out.x);
  sol.objective = out.objective;
  sol.solver = out.solver;
  sol.seconds = out.seconds;
  sol.iterations = out.iterations;
  sol.breakdown = objective_breakdown(inst, sm, sol);
  sol.annual_investment = annual_investment_cost(inst, sol.plan);
  sol.annual_operational = annual_operational_cost(inst, sol.dispatch);
  const auto& L = sm.layout;
  sol.block_cost.resize(L.blocks());
  for (int y = 0; y < L.Y; ++y)
    for (int m = 0; m < L.M; ++m)
      for (int d = 0; d < L.D; ++d) sol.block_cost[L.block(d, m, y)] = dispatch_day_cost(inst, sol.dispatch, d, m, y);
  return sol;
}

}  // namespace helios
