#pragma once

// Aggregated robust balance and sell-cap rows, one pair per (d, m), added to a built planning model.

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "helios/robust/uncertainty_set.hpp"
#include "helios/saa/builder.hpp"

namespace helios::robust {

struct RobustLayout {
  int D = 0, M = 0, N = 0, H = 0, Y = 0;
  int first_var = 0, num_vars = 0;
  int demand_row = 0, sell_row = 0;  // first robust row of each side, (d, m)
  std::array<int, 2> lambda{}, phi{}, chi{}, psi{}, omega{}, tau{};  // [demand, sell], dims (D, M, N, H, Y) / (D)
  UncertaintySetSpec spec;

  DualVars vars(int side, int d, int m) const {
    const int off = (d * M + m) * N * H * Y;
    DualVars dv;
    dv.sites = N;
    dv.hours = H;
    dv.years = Y;
    dv.lambda = lambda[side] + off;
    dv.phi = phi[side] + off;
    dv.chi = chi[side] + off;
    dv.psi = psi[side] + off;
    dv.omega = omega[side] + off;
    dv.tau = tau[side] + d;
    return dv;
  }
};

// Nominal factors vbar(n, h, y) of scenario d, with the horizon ramp; zero where no solar data.
inline std::vector<double> nominal_factors(const PlanningInstance& inst, const SaaLayout& L, int d) {
  std::vector<double> v(static_cast<size_t>(L.N) * L.H * L.Y, 0.0);
  for (int n = 0; n < L.N; ++n)
    for (int h = 0; h < L.H; ++h)
      for (int y = 0; y < L.Y; ++y) v[(static_cast<size_t>(n) * L.H + h) * L.Y + y] = scenario_factor(inst, L, n, h, d, y);
  return v;
}

inline UncertaintySetSpec derive_set(const PlanningInstance& inst) {
  const int D = inst.scenarios->scenarios, H = inst.scenarios->hours;
  if (!inst.statistics) {
    if (!inst.robustness.zero())
      fail(ErrorCode::budget_not_derived, "robust budgets need uncertainty statistics for the scenario set");
    return zero_uncertainty_set(D, H);
  }
  const auto& st = *inst.statistics;
  if (st.scenarios != D || st.hours != H)
    fail(ErrorCode::budget_not_derived, "uncertainty statistics do not match the scenario set");
  return build_uncertainty_set(st, inst.robustness, inst.sites(), inst.years(), inst.months());
}

// Adds 2 |D| (5 |N| |H| |M| |Y| + 1) dual variables and the robust rows of both sides.
inline RobustLayout add_robust_counterparts(SaaModel& sm, const PlanningInstance& inst) {
  const SaaLayout& L = sm.layout;
  ModelInstance& mdl = sm.model;
  const auto& net = inst.network;
  const auto& C = inst.costs;
  RobustLayout R;
  R.D = L.D;
  R.M = L.M;
  R.N = L.N;
  R.H = L.H;
  R.Y = L.Y;
  R.spec = derive_set(inst);
  R.first_var = mdl.num_vars();
  const char* tag[2] = {"ro_demand_", "ro_sell_"};
  for (int s = 0; s < 2; ++s) {
    std::string p = tag[s];
    R.lambda[s] = mdl.add_block(p + "lambda", {L.D, L.M, L.N, L.H, L.Y}, 0.0, kInf);
    R.phi[s] = mdl.add_block(p + "phi", {L.D, L.M, L.N, L.H, L.Y}, 0.0, kInf);
    R.chi[s] = mdl.add_block(p + "chi", {L.D, L.M, L.N, L.H, L.Y}, 0.0, kInf);
    R.psi[s] = mdl.add_block(p + "psi", {L.D, L.M, L.N, L.H, L.Y}, 0.0, kInf);
    R.omega[s] = mdl.add_block(p + "omega", {L.D, L.M, L.N, L.H, L.Y}, 0.0, kInf);
    R.tau[s] = mdl.add_block(p + "tau", {L.D}, 0.0, kInf);
  }
  R.num_vars = mdl.num_vars() - R.first_var;

  std::vector<int> arc_from(L.A), arc_to(L.A);
  for (int a = 0; a < L.A; ++a) {
    arc_from[a] = net.arc_from(a);
    arc_to[a] = net.arc_to(a);
  }
  auto zbar = [&](int n, int y) { return L.ny(L.zbar, n, y); };

  std::vector<std::vector<double>> vbar(L.D);
  for (int d = 0; d < L.D; ++d) vbar[d] = nominal_factors(inst, L, d);

  // Demand side: a1'x + (dual objective) >= sum of demand
  mdl.begin_rows("ro_demand_dual", "demand-side dual feasibility");
  std::vector<LinExpr> dual_obj(static_cast<size_t>(L.D) * L.M);
  for (int d = 0; d < L.D; ++d)
    for (int m = 0; m < L.M; ++m)
      dual_obj[static_cast<size_t>(d) * L.M + m] =
          emit_dual_block(mdl, R.spec, d, R.vars(0, d, m), vbar[d], zbar, Side::demand, C.sell_fraction);
  R.demand_row = mdl.num_rows();
  mdl.begin_rows("ro_demand", "aggregated robust balance");
  for (int d = 0; d < L.D; ++d)
    for (int m = 0; m < L.M; ++m) {
      LinExpr e = dual_obj[static_cast<size_t>(d) * L.M + m];
      double b1 = 0.0;
      for (int y = 0; y < L.Y; ++y) {
        int blk = L.block(d, m, y);
        for (int h = 0; h < L.H; ++h) {
          for (int a = 0; a < L.A; ++a) {
            double eta = net.arcs[a].efficiency;
            // arc a credits eta f+ - f- at its head and eta f- - f+ at its tail
            if (arc_to[a] >= 0) {
              e.add(L.arc_var(L.fp, blk, h, a), eta);
              e.add(L.arc_var(L.fn, blk, h, a), -1.0);
            }
            if (arc_from[a] >= 0) {
              e.add(L.arc_var(L.fn, blk, h, a), eta);
              e.add(L.arc_var(L.fp, blk, h, a), -1.0);
            }
          }
          for (int n = 0; n < L.N; ++n) {
            e.add(L.site_var(L.r, blk, h, n), C.discharge_rate);
            e.add(L.site_var(L.xo, blk, h, n), 1.0);
            e.add(L.site_var(L.xn, blk, h, n), 1.0);
            e.add(L.site_var(L.w, blk, h, n), -1.0);
            b1 += inst.demand.at(n, h % L.day_hours, m, y);
          }
        }
      }
      mdl.add_row(e, Sense::ge, b1);
    }

  // Sell side: sum w - (dual objective) <= beta * sum max(0, -d)
  mdl.begin_rows("ro_sell_dual", "sell-side dual feasibility");
  for (int d = 0; d < L.D; ++d)
    for (int m = 0; m < L.M; ++m)
      dual_obj[static_cast<size_t>(d) * L.M + m] =
          emit_dual_block(mdl, R.spec, d, R.vars(1, d, m), vbar[d], zbar, Side::sell, C.sell_fraction);
  R.sell_row = mdl.num_rows();
  mdl.begin_rows("ro_sell", "aggregated robust sell cap");
  for (int d = 0; d < L.D; ++d)
    for (int m = 0; m < L.M; ++m) {
      LinExpr e;
      for (size_t k = 0; k < dual_obj[static_cast<size_t>(d) * L.M + m].idx.size(); ++k)
        e.add(dual_obj[static_cast<size_t>(d) * L.M + m].idx[k], -dual_obj[static_cast<size_t>(d) * L.M + m].val[k]);
      double surplus = 0.0;
      for (int y = 0; y < L.Y; ++y) {
        int blk = L.block(d, m, y);
        for (int h = 0; h < L.H; ++h)
          for (int n = 0; n < L.N; ++n) {
            e.add(L.site_var(L.w, blk, h, n), 1.0);
            surplus += std::max(0.0, -inst.demand.at(n, h % L.day_hours, m, y));
          }
      }
      mdl.add_row(e, Sense::le, C.sell_fraction * surplus);
    }
  return R;
}

struct RobustModel {
  SaaModel saa;
  RobustLayout robust;
};

inline RobustModel build_robust(const PlanningInstance& inst) {
  RobustModel rm;
  rm.saa = build_saa(inst);
  rm.saa.model.name = inst.name + "/robust";
  rm.robust = add_robust_counterparts(rm.saa, inst);
  return rm;
}

// Solar block of (d, m) under a fixed plan.
inline SolarBlock solar_block(const PlanningInstance& inst, const SaaLayout& L, const InvestmentPlan& plan, int d) {
  SolarBlock b;
  b.sites = L.N;
  b.hours = L.H;
  b.years = L.Y;
  b.vbar = nominal_factors(inst, L, d);
  b.zbar.resize(static_cast<size_t>(L.N) * L.Y);
  for (int n = 0; n < L.N; ++n)
    for (int y = 0; y < L.Y; ++y)
      b.zbar[static_cast<size_t>(n) * L.Y + y] = plan.cumulative_solar(n, y, inst.costs.solar_degradation);
  return b;
}

}  // namespace helios::robust
