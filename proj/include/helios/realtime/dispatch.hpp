#pragma once

// Intra-day real-time LP over hours t..T-1 of one day, given sunk assets and committed history.
// Hours are zero-based here: t = 0 is the first hour of the day.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "helios/core/error.hpp"
#include "helios/core/types.hpp"
#include "helios/model/model_instance.hpp"
#include "helios/solver/solve.hpp"

namespace helios::realtime {

// Committed decisions of one hour.
struct HourAction {
  std::vector<double> flow_pos, flow_neg;                       // per arc
  std::vector<double> storage, discharge, onee, nareva, sales;  // per site, storage at the start of the hour
};

struct SystemState {
  int hour = 0;  // current hour t; history covers hours < t
  int hours = 24;
  int month = 0, year = 0;
  std::vector<double> solar;    // z-tilde: degraded cumulative kW per site
  std::vector<double> battery;  // b-tilde: degraded cumulative kWh per site
  std::vector<HourAction> history;

  int sites() const { return static_cast<int>(solar.size()); }

  // Level at the start of hour t: psi s(t-1) - r(t-1). Meaningless at t = 0.
  std::vector<double> storage_now(double psi) const {
    std::vector<double> s(sites(), 0.0);
    if (history.empty()) return s;
    const auto& h = history.back();
    for (int n = 0; n < sites(); ++n) s[n] = std::clamp(psi * h.storage[n] - h.discharge[n], 0.0, battery[n]);
    return s;
  }
  std::vector<double> start_storage() const {
    return history.empty() ? std::vector<double>(sites(), 0.0) : history.front().storage;
  }

  static SystemState initial(const PlanningInstance& inst, const InvestmentPlan& plan, int month, int year) {
    SystemState st;
    st.hours = inst.time.hours_per_day;
    st.month = month;
    st.year = year;
    for (int n = 0; n < inst.sites(); ++n) {
      st.solar.push_back(plan.cumulative_solar(n, year, inst.costs.solar_degradation));
      st.battery.push_back(plan.cumulative_battery(n, year, inst.costs.battery_degradation));
    }
    return st;
  }
};

// Capacity factors per (site, hour) for one day; hours < observed are realized, the rest forecast.
struct ForecastTrace {
  int sites = 0;
  int hours = 24;
  int observed = 0;
  std::vector<double> values;

  double at(int n, int h) const { return values[static_cast<size_t>(n) * hours + h]; }
  static ForecastTrace clamped(int sites, int hours, int observed, std::vector<double> v) {
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    return {sites, hours, observed, std::move(v)};
  }
};

struct RealtimeOptions {
  bool clamp_residual = false;  // floor a negative residual sell cap at zero instead of failing
};

struct RealtimeLayout {
  int t = 0, K = 0, N = 0, A = 0;
  int fp = 0, fn = 0, s = 0, r = 0, xo = 0, xn = 0, w = 0;  // (k, n) / (k, a), k = hour - t
  int balance_row = 0, sell_row = 0;
  std::vector<double> residual_cap;  // per site

  int site_var(int first, int k, int n) const { return first + k * N + n; }
  int arc_var(int first, int k, int a) const { return first + k * A + a; }
};

struct RealtimeModel {
  ModelInstance model;
  RealtimeLayout layout;
};

inline void check_state(const PlanningInstance& inst, const SystemState& st, const ForecastTrace& fc) {
  const int N = inst.sites(), A = inst.arcs(), T = inst.time.hours_per_day;
  if (st.hour < 0 || st.hour >= T) fail(ErrorCode::validation, "real-time hour outside the day");
  if (st.sites() != N || static_cast<int>(st.battery.size()) != N)
    fail(ErrorCode::dimension_mismatch, "system state does not match the network sites");
  if (static_cast<int>(st.history.size()) != st.hour)
    fail(ErrorCode::dimension_mismatch, "history must cover every hour before t");
  for (const auto& h : st.history)
    if (static_cast<int>(h.flow_pos.size()) != A || static_cast<int>(h.flow_neg.size()) != A ||
        static_cast<int>(h.storage.size()) != N || static_cast<int>(h.discharge.size()) != N ||
        static_cast<int>(h.onee.size()) != N || static_cast<int>(h.nareva.size()) != N ||
        static_cast<int>(h.sales.size()) != N)
      fail(ErrorCode::dimension_mismatch, "history entry has wrong dimensions");
  for (int n = 0; n < N; ++n)
    for (const auto& h : st.history)
      if (h.storage[n] > st.battery[n] * (1.0 + 1e-9) + 1e-6)
        fail(ErrorCode::validation, "stored energy exceeds installed capacity at " + inst.network.sites[n].id);
  if (fc.sites != N || fc.hours != T || static_cast<int>(fc.values.size()) != N * T)
    fail(ErrorCode::dimension_mismatch, "forecast trace does not match the network and day length");
  if (fc.observed < st.hour) fail(ErrorCode::validation, "forecast trace lacks realized values for elapsed hours");
}

inline RealtimeModel build_realtime(const PlanningInstance& inst, const SystemState& st, const ForecastTrace& fc,
                                    const RealtimeOptions& opt = {}) {
  check_state(inst, st, fc);
  const auto& net = inst.network;
  const auto& C = inst.costs;
  const auto& Tf = inst.tariffs;
  const int N = inst.sites(), A = inst.arcs(), T = inst.time.hours_per_day, t = st.hour, K = T - t;
  const int m = st.month, y = st.year;

  RealtimeModel out;
  RealtimeLayout& L = out.layout;
  ModelInstance& mdl = out.model;
  mdl.name = inst.name + "/realtime@" + std::to_string(t);
  L.t = t;
  L.K = K;
  L.N = N;
  L.A = A;
  L.fp = mdl.add_block("f_pos", {K, A}, 0.0, kInf);
  L.fn = mdl.add_block("f_neg", {K, A}, 0.0, kInf);
  L.s = mdl.add_block("s", {K, N}, 0.0, kInf);
  L.r = mdl.add_block("r", {K, N}, -kInf, kInf);
  L.xo = mdl.add_block("x_onee", {K, N}, 0.0, kInf);
  L.xn = mdl.add_block("x_nareva", {K, N}, 0.0, kInf);
  L.w = mdl.add_block("w", {K, N}, 0.0, kInf);

  std::vector<int> arc_from(A), arc_to(A);
  for (int a = 0; a < A; ++a) {
    arc_from[a] = net.arc_from(a);
    arc_to[a] = net.arc_to(a);
  }

  for (int k = 0; k < K; ++k) {
    int h = t + k;
    for (int a = 0; a < A; ++a) {
      double c = net.arcs[a].rent_price[static_cast<size_t>(m) * T + h];
      mdl.obj[L.arc_var(L.fp, k, a)] = c;
      mdl.obj[L.arc_var(L.fn, k, a)] = c;
    }
    for (int n = 0; n < N; ++n) {
      mdl.obj[L.site_var(L.xo, k, n)] = Tf.onee(n, m, h);
      mdl.obj[L.site_var(L.xn, k, n)] = Tf.nareva(n, m, h);
      mdl.obj[L.site_var(L.w, k, n)] = -Tf.feed_in(n, m, h);
      mdl.ub[L.site_var(L.xo, k, n)] = Tf.onee_capacity[h];
      mdl.ub[L.site_var(L.xn, k, n)] = net.sites[n].nareva_allowed ? Tf.nareva_capacity[h] : 0.0;
      mdl.ub[L.site_var(L.s, k, n)] = st.battery[n];
      if (std::isfinite(inst.options.power_rating)) {
        mdl.lb[L.site_var(L.r, k, n)] = -inst.options.power_rating * st.battery[n];
        mdl.ub[L.site_var(L.r, k, n)] = inst.options.power_rating * st.battery[n];
      }
    }
  }
  // storage entering hour t is history unless the day has not started
  const auto now = st.storage_now(C.battery_retention), start = st.start_storage();
  if (t > 0)
    for (int n = 0; n < N; ++n) mdl.lb[L.site_var(L.s, 0, n)] = mdl.ub[L.site_var(L.s, 0, n)] = now[n];

  L.balance_row = mdl.num_rows();
  mdl.begin_rows("balance", "nodal energy balance");
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n) {
      LinExpr e;
      for (int a = 0; a < A; ++a) {
        if (arc_to[a] == n) {
          e.add(L.arc_var(L.fp, k, a), net.arcs[a].efficiency);
          e.add(L.arc_var(L.fn, k, a), -1.0);
        }
        if (arc_from[a] == n) {
          e.add(L.arc_var(L.fn, k, a), net.arcs[a].efficiency);
          e.add(L.arc_var(L.fp, k, a), -1.0);
        }
      }
      e.add(L.site_var(L.r, k, n), C.discharge_rate);
      e.add(L.site_var(L.xo, k, n), 1.0);
      e.add(L.site_var(L.xn, k, n), 1.0);
      e.add(L.site_var(L.w, k, n), -1.0);
      mdl.add_row(e, Sense::ge, inst.demand.at(n, t + k, m, y) - fc.at(n, t + k) * st.solar[n]);
    }

  // Residual daily sell cap
  L.sell_row = mdl.num_rows();
  mdl.begin_rows("sell_cap", "remaining sales within the residual daily cap");
  const bool literal = inst.options.literal_realtime_sell_cap;
  for (int n = 0; n < N; ++n) {
    double cap = 0.0, sold = 0.0;
    for (int h = 0; h < T; ++h) {
      if (literal && h >= t) break;
      cap += fc.at(n, h) * st.solar[n] + std::max(0.0, -inst.demand.at(n, h, m, y));
    }
    for (const auto& past : st.history) sold += past.sales[n];
    double rhs = C.sell_fraction * cap - sold;
    if (rhs < -1e-7 * std::max(1.0, sold)) {
      if (!opt.clamp_residual)
        fail(ErrorCode::infeasible_residual, "realized sales at " + net.sites[n].id + " exceed the daily cap by " +
                                                 std::to_string(-rhs) + " kWh before hour " + std::to_string(t));
    }
    rhs = std::max(0.0, rhs);
    L.residual_cap.push_back(rhs);
    LinExpr e;
    for (int k = 0; k < K; ++k) e.add(L.site_var(L.w, k, n), 1.0);
    mdl.add_row(e, Sense::le, rhs);
  }

  // s(h+1) = psi s(h) - r(h); the day closes at its starting level
  mdl.begin_rows("storage_dynamics", "s(h+1) = psi s(h) - r(h), end of day at start level");
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n) {
      LinExpr e;
      e.add(L.site_var(L.s, k, n), -C.battery_retention);
      e.add(L.site_var(L.r, k, n), 1.0);
      double rhs = 0.0;
      if (k + 1 < K) {
        e.add(L.site_var(L.s, k + 1, n), 1.0);
      } else if (t == 0) {
        e.add(L.site_var(L.s, 0, n), 1.0);
      } else {
        rhs = start[n];
      }
      mdl.add_row(e, Sense::eq, rhs);
    }

  mdl.begin_rows("arc_capacity", "f+ + f- <= K");
  for (int k = 0; k < K; ++k)
    for (int a = 0; a < A; ++a)
      mdl.add_row({L.arc_var(L.fp, k, a), L.arc_var(L.fn, k, a)}, {1.0, 1.0}, Sense::le, net.arcs[a].capacity);
  return out;
}

inline HourAction extract_action(const RealtimeLayout& L, const std::vector<double>& x, int k = 0) {
  HourAction h;
  for (int a = 0; a < L.A; ++a) {
    h.flow_pos.push_back(std::max(0.0, x[L.arc_var(L.fp, k, a)]));
    h.flow_neg.push_back(std::max(0.0, x[L.arc_var(L.fn, k, a)]));
  }
  for (int n = 0; n < L.N; ++n) {
    h.storage.push_back(std::max(0.0, x[L.site_var(L.s, k, n)]));
    h.discharge.push_back(x[L.site_var(L.r, k, n)]);
    h.onee.push_back(std::max(0.0, x[L.site_var(L.xo, k, n)]));
    h.nareva.push_back(std::max(0.0, x[L.site_var(L.xn, k, n)]));
    h.sales.push_back(std::max(0.0, x[L.site_var(L.w, k, n)]));
  }
  return h;
}

// Cost of one committed hour at the day's tariffs.
inline double hour_cost(const PlanningInstance& inst, int month, int hour, const HourAction& a) {
  const int T = inst.time.hours_per_day;
  double c = 0.0;
  for (int k = 0; k < inst.arcs(); ++k)
    c += inst.network.arcs[k].rent_price[static_cast<size_t>(month) * T + hour] * (a.flow_pos[k] + a.flow_neg[k]);
  for (int n = 0; n < inst.sites(); ++n)
    c += inst.tariffs.onee(n, month, hour) * a.onee[n] + inst.tariffs.nareva(n, month, hour) * a.nareva[n] -
         inst.tariffs.feed_in(n, month, hour) * a.sales[n];
  return c;
}

}  // namespace helios::realtime
