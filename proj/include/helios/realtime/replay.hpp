#pragma once

// Hour-by-hour replay of capacity-factor days against a fixed investment plan.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "helios/core/parallel.hpp"
#include "helios/realtime/dispatch.hpp"

namespace helios::realtime {

// Multiplicative forecast error: zero at the current hour, AR(1) over the lead time.
struct ForecastNoiseSpec {
  double sigma = 0.0;
  double ar = 0.8;
};

// Returns a (site, hour) forecast for the day as seen at hour t; hours <= t are overwritten with
// realized values by the caller.
using Forecaster = std::function<std::vector<double>(int t, std::mt19937_64& rng)>;

inline Forecaster noisy_forecaster(const std::vector<double>& realized, int sites, int hours, ForecastNoiseSpec noise) {
  return [&realized, sites, hours, noise](int t, std::mt19937_64& rng) {
    std::vector<double> f = realized;
    if (noise.sigma <= 0.0) return f;
    std::normal_distribution<double> g(0.0, 1.0);
    const double innov = noise.sigma * std::sqrt(std::max(0.0, 1.0 - noise.ar * noise.ar));
    for (int n = 0; n < sites; ++n) {
      double e = 0.0;
      for (int h = t + 1; h < hours; ++h) {
        e = noise.ar * e + innov * g(rng);
        f[static_cast<size_t>(n) * hours + h] *= 1.0 + e;
      }
    }
    return f;
  };
}

struct ActionRecord {
  int day = 0, hour = 0;
  std::string site;  // site id, or "from>to" for arc flows
  std::string action;
  double value = 0.0;
};

struct DayReport {
  std::string date;
  int month = 0;
  double cost = 0.0;     // rent + purchases - sales revenue + penalty, undiscounted MAD
  double rent = 0.0;
  double onee_kwh = 0.0, nareva_kwh = 0.0, sales_kwh = 0.0, solar_kwh = 0.0;
  double emissions = 0.0;  // kg CO2
  double penalty = 0.0;    // MAD charged for sales above the realized cap
  double excess_sales = 0.0;
  bool feasible = true;
  int infeasible_hour = -1;
  std::vector<HourAction> actions;
};

struct ReplaySummary {
  int days = 0;
  double mean_cost = 0.0, std_cost = 0.0, p05 = 0.0, p50 = 0.0, p95 = 0.0;
  double total_cost = 0.0, total_emissions = 0.0, feasibility_rate = 1.0;
};

struct ReplayReport {
  std::vector<DayReport> days;
  ReplaySummary summary;
};

struct ReplayOptions {
  int year = 0;
  ForecastNoiseSpec noise;
  uint64_t seed = 1;
  int threads = 1;
  SolveOptions solver;
};

// Realized factors of dataset day i mapped onto network sites, with the year's trend applied.
inline std::vector<double> realized_day(const PlanningInstance& inst, const CapacityFactorDataset& ds, int i, int year) {
  const int N = inst.sites(), T = inst.time.hours_per_day;
  if (ds.hours != T) fail(ErrorCode::dimension_mismatch, "dataset hours differ from the day length");
  std::vector<double> v(static_cast<size_t>(N) * T, 0.0);
  for (int n = 0; n < N; ++n) {
    if (!inst.network.sites[n].solar_allowed) continue;
    for (int k = 0; k < ds.site_count(); ++k)
      if (ds.sites[k] == inst.network.sites[n].id)
        for (int h = 0; h < T; ++h)
          v[static_cast<size_t>(n) * T + h] = std::clamp(ds.at(i, k, h), 0.0, 1.0) * inst.options.solar_trend(year);
  }
  return v;
}

// One day, t = 0..T-1: reveal hour t, forecast the rest, solve, commit hour t.
inline DayReport replay_day(const PlanningInstance& inst, const InvestmentPlan& plan, const std::vector<double>& realized,
                            int month, int year, const Forecaster& forecaster, std::mt19937_64& rng,
                            const SolveOptions& sopt = {}) {
  const int N = inst.sites(), T = inst.time.hours_per_day;
  const auto& C = inst.costs;
  DayReport rep;
  rep.month = month;
  auto st = SystemState::initial(inst, plan, month, year);
  RealtimeOptions ropt;
  for (int t = 0; t < T; ++t) {
    auto f = forecaster(t, rng);
    for (int n = 0; n < N; ++n)
      for (int h = 0; h <= t; ++h) f[static_cast<size_t>(n) * T + h] = realized[static_cast<size_t>(n) * T + h];
    auto fc = ForecastTrace::clamped(N, T, t + 1, std::move(f));
    RealtimeModel rm;
    try {
      rm = build_realtime(inst, st, fc, ropt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::infeasible_residual) throw;
      rep.feasible = false;
      rep.infeasible_hour = t;
      ropt.clamp_residual = true;
      rm = build_realtime(inst, st, fc, ropt);
    }
    auto out = solve_optimal(rm.model, sopt);
    auto act = extract_action(rm.layout, out.x);
    if (t > 0) act.storage = st.storage_now(C.battery_retention);
    rep.cost += hour_cost(inst, month, t, act);
    for (int a = 0; a < inst.arcs(); ++a)
      rep.rent += inst.network.arcs[a].rent_price[static_cast<size_t>(month) * T + t] * (act.flow_pos[a] + act.flow_neg[a]);
    for (int n = 0; n < N; ++n) {
      rep.onee_kwh += act.onee[n];
      rep.nareva_kwh += act.nareva[n];
      rep.sales_kwh += act.sales[n];
      rep.solar_kwh += realized[static_cast<size_t>(n) * T + t] * st.solar[n];
      rep.emissions += inst.emissions.onee * act.onee[n] + inst.emissions.nareva * act.nareva[n];
    }
    st.history.push_back(act);
    rep.actions.push_back(std::move(act));
    ++st.hour;
  }
  // ex-post sell cap on realized production
  for (int n = 0; n < N; ++n) {
    double sold = 0.0, cap = 0.0, price = 0.0;
    for (int h = 0; h < T; ++h) {
      sold += rep.actions[h].sales[n];
      cap += realized[static_cast<size_t>(n) * T + h] * st.solar[n] + std::max(0.0, -inst.demand.at(n, h, month, year));
      price = std::max(price, inst.tariffs.feed_in(n, month, h));
    }
    double excess = sold - C.sell_fraction * cap;
    if (excess > 1e-6) {
      rep.excess_sales += excess;
      rep.penalty += excess * price;
      rep.feasible = false;
    }
  }
  rep.cost += rep.penalty;
  return rep;
}

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double pos = q * (v.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(pos));
  size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

inline ReplaySummary summarize(const std::vector<DayReport>& days) {
  ReplaySummary s;
  s.days = static_cast<int>(days.size());
  if (days.empty()) return s;
  std::vector<double> c;
  int ok = 0;
  for (const auto& d : days) {
    c.push_back(d.cost);
    s.total_cost += d.cost;
    s.total_emissions += d.emissions;
    ok += d.feasible;
  }
  s.mean_cost = s.total_cost / s.days;
  double var = 0.0;
  for (double x : c) var += (x - s.mean_cost) * (x - s.mean_cost);
  s.std_cost = s.days > 1 ? std::sqrt(var / (s.days - 1)) : 0.0;
  s.p05 = quantile(c, 0.05);
  s.p50 = quantile(c, 0.50);
  s.p95 = quantile(c, 0.95);
  s.feasibility_rate = static_cast<double>(ok) / s.days;
  return s;
}

// Days are independent: each gets its own generator seeded from (seed, day index).
inline ReplayReport replay(const PlanningInstance& inst, const InvestmentPlan& plan, const CapacityFactorDataset& days,
                           const ReplayOptions& opt = {}) {
  if (days.days.empty()) fail(ErrorCode::validation, "replay needs at least one day");
  if (plan.sites != inst.sites() || plan.years != inst.years())
    fail(ErrorCode::dimension_mismatch, "plan does not match the instance");
  if (opt.year < 0 || opt.year >= inst.years()) fail(ErrorCode::validation, "replay year outside the horizon");
  for (double v : plan.battery)
    if (!(v >= 0.0)) fail(ErrorCode::validation, "negative battery investment");
  for (double v : plan.solar)
    if (!(v >= 0.0)) fail(ErrorCode::validation, "negative solar investment");
  const int N = inst.sites(), T = inst.time.hours_per_day, D = days.day_count();
  ReplayReport rep;
  rep.days.resize(D);
  parallel_for(D, opt.threads, [&](int i) {
    auto v = realized_day(inst, days, i, opt.year);
    std::seed_seq seq{static_cast<uint32_t>(opt.seed), static_cast<uint32_t>(opt.seed >> 32), static_cast<uint32_t>(i)};
    std::mt19937_64 rng(seq);
    auto fc = noisy_forecaster(v, N, T, opt.noise);
    rep.days[i] = replay_day(inst, plan, v, days.days[i].month, opt.year, fc, rng, opt.solver);
    rep.days[i].date = days.days[i].date;
  });
  rep.summary = summarize(rep.days);
  return rep;
}

inline std::vector<ActionRecord> action_records(const PlanningInstance& inst, const ReplayReport& rep) {
  std::vector<ActionRecord> out;
  const auto& net = inst.network;
  for (size_t d = 0; d < rep.days.size(); ++d)
    for (size_t h = 0; h < rep.days[d].actions.size(); ++h) {
      const auto& a = rep.days[d].actions[h];
      int di = static_cast<int>(d), hi = static_cast<int>(h);
      for (int n = 0; n < inst.sites(); ++n) {
        const auto& id = net.sites[n].id;
        out.push_back({di, hi, id, "storage", a.storage[n]});
        out.push_back({di, hi, id, "discharge", a.discharge[n]});
        out.push_back({di, hi, id, "onee", a.onee[n]});
        out.push_back({di, hi, id, "nareva", a.nareva[n]});
        out.push_back({di, hi, id, "sales", a.sales[n]});
      }
      for (int k = 0; k < inst.arcs(); ++k)
        out.push_back({di, hi, net.arcs[k].from + ">" + net.arcs[k].to, "flow", a.flow_pos[k] - a.flow_neg[k]});
    }
  return out;
}

inline void write_actions_csv(std::ostream& os, const PlanningInstance& inst, const ReplayReport& rep) {
  os << "day,hour,site,action,value\n";
  os.precision(10);
  for (const auto& r : action_records(inst, rep))
    os << r.day << ',' << r.hour << ',' << r.site << ',' << r.action << ',' << r.value << '\n';
}

inline void write_summary(std::ostream& os, const ReplayReport& rep) {
  const auto& s = rep.summary;
  os << "days: " << s.days << "\n"
     << "mean_cost: " << s.mean_cost << "\n"
     << "std_cost: " << s.std_cost << "\n"
     << "p05_cost: " << s.p05 << "\n"
     << "p50_cost: " << s.p50 << "\n"
     << "p95_cost: " << s.p95 << "\n"
     << "total_cost: " << s.total_cost << "\n"
     << "total_emissions_kg: " << s.total_emissions << "\n"
     << "feasibility_rate: " << s.feasibility_rate << "\n";
}

}  // namespace helios::realtime
