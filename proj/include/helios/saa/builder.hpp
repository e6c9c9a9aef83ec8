#pragma once

// Multi-period sample-average planning LP: investment (b, z) plus hourly dispatch for every
// (scenario d, month m, year y) block.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "helios/core/error.hpp"
#include "helios/core/types.hpp"
#include "helios/core/validate.hpp"
#include "helios/model/model_instance.hpp"

namespace helios {

// Column/row offsets of a built planning model.
struct SaaLayout {
  int N = 0, A = 0, Y = 0, M = 0, D = 0, H = 0;  // H: hours per scenario (24 x segment length)
  int day_hours = 24;
  int segments = 1;
  int b = 0, z = 0, zbar = 0, bbar = 0;          // (n, y)
  int fp = 0, fn = 0;                            // (blk, h, a)
  int s = 0, r = 0, xo = 0, xn = 0, w = 0;       // (blk, h, n)
  int balance_row = 0;                           // (blk, h, n)
  int sell_row = 0;                              // (blk, segment, n)
  int dynamics_row = 0;                          // (blk, h, n)
  bool nominal_rows = true;                      // balance/sell rows present
  std::vector<int> data_site;                    // scenario-set site of each network site, -1 if none
  std::vector<double> discount;                  // rho^y

  int blocks() const { return D * M * Y; }
  int block(int d, int m, int y) const { return (y * M + m) * D + d; }
  int ny(int first, int n, int y) const { return first + n * Y + y; }
  int site_var(int first, int blk, int h, int n) const { return first + (blk * H + h) * N + n; }
  int arc_var(int first, int blk, int h, int a) const { return first + (blk * H + h) * A + a; }
};

struct SaaModel {
  ModelInstance model;
  SaaLayout layout;
};

namespace saa_detail {

inline std::vector<int> data_site_map(const PlanningInstance& inst) {
  std::vector<int> map(inst.sites(), -1);
  const auto& sc = *inst.scenarios;
  for (int n = 0; n < inst.sites(); ++n)
    for (int k = 0; k < sc.site_count(); ++k)
      if (sc.sites[k] == inst.network.sites[n].id) map[n] = k;
  return map;
}

}  // namespace saa_detail

// Nominal capacity factor v(n, h, d) in year y, with the horizon degradation ramp.
inline double scenario_factor(const PlanningInstance& inst, const SaaLayout& L, int n, int h, int d, int y) {
  int k = L.data_site[n];
  if (k < 0 || !inst.network.sites[n].solar_allowed) return 0.0;
  return inst.scenarios->centroid(d, k, h) * inst.options.solar_trend(y);
}

// Operational cost coefficient of one unit of each dispatch variable in block (d,m,y),
// already multiplied by rho^y and the days represented, but not by the scenario weight.
inline double block_day_weight(const PlanningInstance& inst, const SaaLayout& L, int m, int y) {
  return L.discount[y] * inst.time.days(m, y) / static_cast<double>(L.segments);
}

inline SaaModel build_saa(const PlanningInstance& inst) {
  if (!inst.scenarios) fail(ErrorCode::missing_scenario_set, "planning instance has no scenario set");
  {
    auto rep = validate_instance(inst);
    if (!rep.ok()) fail(ErrorCode::inconsistent_dimensions, "instance failed validation:\n" + rep.str());
  }
  const auto& sc = *inst.scenarios;
  const auto& net = inst.network;
  const auto& C = inst.costs;
  const auto& T = inst.tariffs;

  SaaModel out;
  SaaLayout& L = out.layout;
  ModelInstance& mdl = out.model;
  mdl.name = inst.name + "/saa";
  L.N = inst.sites();
  L.A = inst.arcs();
  L.Y = inst.years();
  L.M = inst.months();
  L.D = sc.scenarios;
  L.day_hours = inst.time.hours_per_day;
  L.segments = sc.segment_days;
  L.H = sc.hours;
  L.data_site = saa_detail::data_site_map(inst);
  for (int y = 0; y < L.Y; ++y) L.discount.push_back(C.discount_factor(y));
  const int N = L.N, A = L.A, Y = L.Y, M = L.M, D = L.D, H = L.H, H24 = L.day_hours;
  const double rhoY = C.discount_factor(Y - 1);

  std::vector<int> arc_from(A), arc_to(A);
  for (int a = 0; a < A; ++a) {
    arc_from[a] = net.arc_from(a);
    arc_to[a] = net.arc_to(a);
  }

  // Strategic variables; the objective carries cost net of salvage.
  L.b = mdl.add_block("b", {N, Y}, 0.0, kInf);
  L.z = mdl.add_block("z", {N, Y}, 0.0, kInf);
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < Y; ++y) {
      mdl.obj[L.ny(L.b, n, y)] = C.battery_cost[y] * (L.discount[y] - rhoY);
      mdl.obj[L.ny(L.z, n, y)] = C.solar_cost[y] * (L.discount[y] - rhoY);
      if (!net.sites[n].solar_allowed) mdl.ub[L.ny(L.z, n, y)] = 0.0;
      if (inst.fixed_investment) {
        const auto& P = *inst.fixed_investment;
        mdl.lb[L.ny(L.b, n, y)] = mdl.ub[L.ny(L.b, n, y)] = P.b(n, y);
        mdl.lb[L.ny(L.z, n, y)] = mdl.ub[L.ny(L.z, n, y)] = net.sites[n].solar_allowed ? P.z(n, y) : 0.0;
      }
    }
  L.zbar = mdl.add_block("zbar", {N, Y}, 0.0, kInf);
  L.bbar = mdl.add_block("bbar", {N, Y}, 0.0, kInf);

  const int BH = L.blocks() * H;
  L.fp = mdl.add_block("f_pos", {Y, M, D, H, A}, 0.0, kInf);
  L.fn = mdl.add_block("f_neg", {Y, M, D, H, A}, 0.0, kInf);
  L.s = mdl.add_block("s", {Y, M, D, H, N}, 0.0, kInf);
  L.r = mdl.add_block("r", {Y, M, D, H, N}, -kInf, kInf);
  L.xo = mdl.add_block("x_onee", {Y, M, D, H, N}, 0.0, kInf);
  L.xn = mdl.add_block("x_nareva", {Y, M, D, H, N}, 0.0, kInf);
  L.w = mdl.add_block("w", {Y, M, D, H, N}, 0.0, kInf);
  (void)BH;

  for (int blk = 0; blk < L.blocks(); ++blk)
    for (int h = 0; h < H; ++h) {
      int hd = h % H24;
      for (int n = 0; n < N; ++n) {
        mdl.ub[L.site_var(L.xo, blk, h, n)] = T.onee_capacity[hd];
        mdl.ub[L.site_var(L.xn, blk, h, n)] = net.sites[n].nareva_allowed ? T.nareva_capacity[hd] : 0.0;
      }
    }

  // Budget
  mdl.begin_rows("budget", "discounted investment within budget");
  {
    LinExpr e;
    for (int n = 0; n < N; ++n)
      for (int y = 0; y < Y; ++y) {
        e.add(L.ny(L.b, n, y), C.battery_cost[y] * L.discount[y]);
        e.add(L.ny(L.z, n, y), C.solar_cost[y] * L.discount[y]);
      }
    if (!e.empty()) mdl.add_row(e, Sense::le, C.budget);
  }

  // Degraded cumulative capacities
  mdl.begin_rows("cumulative_solar", "zbar = sum xi^(y-y') z");
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < Y; ++y) {
      LinExpr e;
      e.add(L.ny(L.zbar, n, y), 1.0);
      for (int k = 0; k <= y; ++k) e.add(L.ny(L.z, n, k), -std::pow(C.solar_degradation, y - k));
      mdl.add_row(e, Sense::eq, 0.0);
    }
  mdl.begin_rows("cumulative_battery", "bbar = sum nu^(y-y') b");
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < Y; ++y) {
      LinExpr e;
      e.add(L.ny(L.bbar, n, y), 1.0);
      for (int k = 0; k <= y; ++k) e.add(L.ny(L.b, n, k), -std::pow(C.battery_degradation, y - k));
      mdl.add_row(e, Sense::eq, 0.0);
    }

  const bool nominal = !(inst.options.paper_literal_ro && !inst.robustness.zero());
  L.nominal_rows = nominal;

  // Nodal balance: inflow after losses + R r + purchases - sales + v zbar >= demand
  L.balance_row = mdl.num_rows();
  if (nominal) {
    mdl.begin_rows("balance", "nodal energy balance");
    LinExpr e;
    for (int y = 0; y < Y; ++y)
      for (int m = 0; m < M; ++m)
        for (int d = 0; d < D; ++d) {
          int blk = L.block(d, m, y);
          for (int h = 0; h < H; ++h)
            for (int n = 0; n < N; ++n) {
              e.clear();
              for (int a = 0; a < A; ++a) {
                if (arc_to[a] == n) {
                  e.add(L.arc_var(L.fp, blk, h, a), net.arcs[a].efficiency);
                  e.add(L.arc_var(L.fn, blk, h, a), -1.0);
                }
                if (arc_from[a] == n) {
                  e.add(L.arc_var(L.fn, blk, h, a), net.arcs[a].efficiency);
                  e.add(L.arc_var(L.fp, blk, h, a), -1.0);
                }
              }
              e.add(L.site_var(L.r, blk, h, n), C.discharge_rate);
              e.add(L.site_var(L.xo, blk, h, n), 1.0);
              e.add(L.site_var(L.xn, blk, h, n), 1.0);
              e.add(L.site_var(L.w, blk, h, n), -1.0);
              e.add(L.ny(L.zbar, n, y), scenario_factor(inst, L, n, h, d, y));
              mdl.add_row(e, Sense::ge, inst.demand.at(n, h % H24, m, y));
            }
        }
  }

  // Daily sell cap, per 24-hour segment of a scenario
  L.sell_row = mdl.num_rows();
  if (nominal) {
    mdl.begin_rows("sell_cap", "daily sales within a fraction of production");
    for (int y = 0; y < Y; ++y)
      for (int m = 0; m < M; ++m)
        for (int d = 0; d < D; ++d) {
          int blk = L.block(d, m, y);
          for (int g = 0; g < L.segments; ++g)
            for (int n = 0; n < N; ++n) {
              LinExpr e;
              double vsum = 0.0, surplus = 0.0;
              for (int h = g * H24; h < (g + 1) * H24; ++h) {
                e.add(L.site_var(L.w, blk, h, n), 1.0);
                vsum += scenario_factor(inst, L, n, h, d, y);
                surplus += std::max(0.0, -inst.demand.at(n, h % H24, m, y));
              }
              e.add(L.ny(L.zbar, n, y), -C.sell_fraction * vsum);
              mdl.add_row(e, Sense::le, C.sell_fraction * surplus);
            }
        }
  }

  // Battery dynamics with cyclic closure, storage within degraded capacity
  L.dynamics_row = mdl.num_rows();
  mdl.begin_rows("storage_dynamics", "s(h+1) = psi s(h) - r(h), cyclic");
  for (int blk = 0; blk < L.blocks(); ++blk)
    for (int h = 0; h < H; ++h)
      for (int n = 0; n < N; ++n) {
        int hn = (h + 1) % H;
        LinExpr e;
        e.add(L.site_var(L.s, blk, hn, n), 1.0);
        e.add(L.site_var(L.s, blk, h, n), -C.battery_retention);
        e.add(L.site_var(L.r, blk, h, n), 1.0);
        mdl.add_row(e, Sense::eq, 0.0);
      }
  mdl.begin_rows("storage_capacity", "s <= bbar");
  for (int y = 0; y < Y; ++y)
    for (int m = 0; m < M; ++m)
      for (int d = 0; d < D; ++d) {
        int blk = L.block(d, m, y);
        for (int h = 0; h < H; ++h)
          for (int n = 0; n < N; ++n)
            mdl.add_row({L.site_var(L.s, blk, h, n), L.ny(L.bbar, n, y)}, {1.0, -1.0}, Sense::le, 0.0);
      }
  if (std::isfinite(inst.options.power_rating)) {
    mdl.begin_rows("power_rating", "|r| <= rating * bbar");
    for (int y = 0; y < Y; ++y)
      for (int m = 0; m < M; ++m)
        for (int d = 0; d < D; ++d) {
          int blk = L.block(d, m, y);
          for (int h = 0; h < H; ++h)
            for (int n = 0; n < N; ++n) {
              int rv = L.site_var(L.r, blk, h, n), bv = L.ny(L.bbar, n, y);
              mdl.add_row({rv, bv}, {1.0, -inst.options.power_rating}, Sense::le, 0.0);
              mdl.add_row({rv, bv}, {-1.0, -inst.options.power_rating}, Sense::le, 0.0);
            }
        }
  }

  mdl.begin_rows("arc_capacity", "f+ + f- <= K");
  for (int blk = 0; blk < L.blocks(); ++blk)
    for (int h = 0; h < H; ++h)
      for (int a = 0; a < A; ++a)
        mdl.add_row({L.arc_var(L.fp, blk, h, a), L.arc_var(L.fn, blk, h, a)}, {1.0, 1.0}, Sense::le,
                    net.arcs[a].capacity);

  // Operational cost, one block per (d, m, y)
  for (int y = 0; y < Y; ++y)
    for (int m = 0; m < M; ++m)
      for (int d = 0; d < D; ++d) {
        int blk = L.block(d, m, y);
        double wday = block_day_weight(inst, L, m, y);
        CostBlock cb;
        cb.group = y * M + m;
        cb.scenario = d;
        cb.probability = sc.weight(d, m);
        for (int h = 0; h < H; ++h) {
          int hd = h % H24;
          for (int a = 0; a < A; ++a) {
            double c = wday * net.arcs[a].rent_price[static_cast<size_t>(m) * H24 + hd];
            if (c == 0.0) continue;
            cb.vars.push_back(L.arc_var(L.fp, blk, h, a));
            cb.coefs.push_back(c);
            cb.vars.push_back(L.arc_var(L.fn, blk, h, a));
            cb.coefs.push_back(c);
          }
          for (int n = 0; n < N; ++n) {
            double po = wday * T.onee(n, m, hd), pn = wday * T.nareva(n, m, hd), pw = wday * T.feed_in(n, m, hd);
            if (po != 0.0) {
              cb.vars.push_back(L.site_var(L.xo, blk, h, n));
              cb.coefs.push_back(po);
            }
            if (pn != 0.0) {
              cb.vars.push_back(L.site_var(L.xn, blk, h, n));
              cb.coefs.push_back(pn);
            }
            if (pw != 0.0) {
              cb.vars.push_back(L.site_var(L.w, blk, h, n));
              cb.coefs.push_back(-pw);
            }
          }
        }
        mdl.add_cost_block(std::move(cb));
      }
  mdl.cost_groups = Y * M;
  return out;
}

}  // namespace helios
