#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "helios/core/types.hpp"

namespace helios {

struct Violation {
  std::string path;
  std::string message;
  bool warning = false;
};

struct ValidationReport {
  std::vector<Violation> items;

  bool ok() const {
    for (const auto& v : items)
      if (!v.warning) return false;
    return true;
  }
  size_t errors() const {
    size_t k = 0;
    for (const auto& v : items) k += v.warning ? 0 : 1;
    return k;
  }
  void error(std::string path, std::string msg) { items.push_back({std::move(path), std::move(msg), false}); }
  void warn(std::string path, std::string msg) { items.push_back({std::move(path), std::move(msg), true}); }
  bool mentions(std::string_view text) const {
    for (const auto& v : items)
      if (v.message.find(text) != std::string::npos || v.path.find(text) != std::string::npos) return true;
    return false;
  }
  std::string str() const {
    std::ostringstream os;
    for (const auto& v : items) os << (v.warning ? "warning " : "error ") << v.path << ": " << v.message << "\n";
    return os.str();
  }
};

namespace detail {

inline std::string at(std::string_view base, size_t i) {
  return std::string(base) + "[" + std::to_string(i) + "]";
}

inline void check_size(ValidationReport& r, const std::string& path, size_t got, size_t want) {
  if (got != want)
    r.error(path, "size " + std::to_string(got) + " != expected " + std::to_string(want));
}

inline void check_all(ValidationReport& r, const std::string& path, const std::vector<double>& v, double lo,
                      double hi, const char* what) {
  for (size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || v[i] < lo || v[i] > hi) {
      r.error(at(path, i), std::string(what));
      return;
    }
}

}  // namespace detail

inline void validate_plan(const PlanningInstance& inst, const InvestmentPlan& plan, ValidationReport& r,
                          const std::string& path = "plan") {
  const int N = inst.sites(), Y = inst.years();
  if (plan.sites != N || plan.years != Y) {
    r.error(path, "dimensions do not match network and horizon");
    return;
  }
  detail::check_size(r, path + ".battery", plan.battery.size(), static_cast<size_t>(N) * Y);
  detail::check_size(r, path + ".solar", plan.solar.size(), static_cast<size_t>(N) * Y);
  if (!r.ok()) return;
  double spend = 0;
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < Y; ++y) {
      if (plan.b(n, y) < 0) r.error(path + ".battery", "negative battery build at " + inst.network.sites[n].id);
      if (plan.z(n, y) < 0) r.error(path + ".solar", "negative solar build at " + inst.network.sites[n].id);
      if (plan.z(n, y) > 0 && !inst.network.sites[n].solar_allowed)
        r.error(path + ".solar", "solar_allowed=false at " + inst.network.sites[n].id);
      double rho = inst.costs.discount_factor(y);
      if (y < static_cast<int>(inst.costs.battery_cost.size()) && y < static_cast<int>(inst.costs.solar_cost.size()))
        spend += inst.costs.battery_cost[y] * rho * plan.b(n, y) + inst.costs.solar_cost[y] * rho * plan.z(n, y);
    }
  if (spend > inst.costs.budget * (1 + 1e-9) + 1e-6) r.error(path, "discounted investment exceeds budget");
}

inline ValidationReport validate_instance(const PlanningInstance& inst) {
  ValidationReport r;
  const auto& net = inst.network;
  const int N = net.site_count();
  const auto& t = inst.time;

  if (N == 0) r.error("network.sites", "no sites");
  for (int n = 0; n < N; ++n) {
    const auto& s = net.sites[n];
    std::string p = detail::at("network.sites", n);
    if (s.id.empty()) r.error(p, "empty site id");
    for (int k = 0; k < n; ++k)
      if (net.sites[k].id == s.id) r.error(p, "duplicate site id " + s.id);
    if (s.kind == SiteKind::chemical && s.solar_allowed) r.error(p, "solar_allowed=false required at chemical site");
    if (s.kind != SiteKind::mining && s.nareva_allowed) r.error(p, "nareva_allowed only at mining sites");
  }
  for (int a = 0; a < net.arc_count(); ++a) {
    const auto& arc = net.arcs[a];
    std::string p = detail::at("network.arcs", a);
    if (net.site_index(arc.from) < 0 || net.site_index(arc.to) < 0) r.error(p, "arc references unknown site");
    if (!(arc.capacity > 0)) r.error(p, "K_a must be > 0");
    if (!(arc.efficiency > 0 && arc.efficiency <= 1)) r.error(p, "eta out of (0,1]");
    detail::check_size(r, p + ".rent_price", arc.rent_price.size(), static_cast<size_t>(t.months) * t.hours_per_day);
    detail::check_all(r, p + ".rent_price", arc.rent_price, 0, kInf, "rent price must be >= 0");
  }

  if (t.hours_per_day < 1) r.error("time.hours_per_day", "must be >= 1");
  if (t.months < 1) r.error("time.months", "must be >= 1");
  if (t.years < 1) r.error("time.years", "Y must be >= 1");
  detail::check_size(r, "time.days_in_month", t.days_in_month.size(), static_cast<size_t>(t.years) * t.months);
  if (r.ok() && t.months == 12 && t.hours_per_day == 24) {
    for (int y = 0; y < t.years; ++y) {
      int total = 0;
      for (int m = 0; m < 12; ++m) total += t.days(m, y);
      if (total != 365 && total != 366)
        r.error(detail::at("time.days_in_month", y), "days per year must be 365 or 366");
    }
  }
  for (size_t i = 0; i < t.days_in_month.size(); ++i)
    if (t.days_in_month[i] < 0) r.error(detail::at("time.days_in_month", i), "negative day count");
  if (!r.ok()) return r;

  const int M = t.months, H = t.hours_per_day, Y = t.years;
  const auto& c = inst.costs;
  if (!(c.budget >= 0)) r.error("costs.budget", "B must be >= 0");
  if (!(c.discount > 0 && c.discount < 1)) r.error("costs.discount", "rho out of (0,1)");
  if (!(c.solar_degradation > 0 && c.solar_degradation <= 1)) r.error("costs.solar_degradation", "xi out of (0,1]");
  if (!(c.battery_degradation > 0 && c.battery_degradation <= 1))
    r.error("costs.battery_degradation", "nu out of (0,1]");
  if (!(c.battery_retention > 0 && c.battery_retention <= 1)) r.error("costs.battery_retention", "psi out of (0,1]");
  if (!(c.sell_fraction >= 0 && c.sell_fraction <= 1)) r.error("costs.sell_fraction", "beta out of [0,1]");
  if (!(c.discharge_rate > 0)) r.error("costs.discharge_rate", "R must be > 0");
  detail::check_size(r, "costs.battery_cost", c.battery_cost.size(), Y);
  detail::check_size(r, "costs.solar_cost", c.solar_cost.size(), Y);
  detail::check_all(r, "costs.battery_cost", c.battery_cost, 0, kInf, "c_b must be >= 0");
  detail::check_all(r, "costs.solar_cost", c.solar_cost, 0, kInf, "c_s must be >= 0");

  const auto& tf = inst.tariffs;
  if (tf.months != M || tf.hours != H) r.error("tariffs", "tariff grid does not match time structure");
  size_t nmh = static_cast<size_t>(N) * M * H;
  detail::check_size(r, "tariffs.onee_price", tf.onee_price.size(), nmh);
  detail::check_size(r, "tariffs.nareva_price", tf.nareva_price.size(), nmh);
  detail::check_size(r, "tariffs.feed_in_price", tf.feed_in_price.size(), nmh);
  detail::check_size(r, "tariffs.onee_capacity", tf.onee_capacity.size(), H);
  detail::check_size(r, "tariffs.nareva_capacity", tf.nareva_capacity.size(), H);
  detail::check_all(r, "tariffs.onee_price", tf.onee_price, 0, kInf, "prices must be >= 0");
  detail::check_all(r, "tariffs.nareva_price", tf.nareva_price, 0, kInf, "prices must be >= 0");
  detail::check_all(r, "tariffs.feed_in_price", tf.feed_in_price, 0, kInf, "prices must be >= 0");
  detail::check_all(r, "tariffs.onee_capacity", tf.onee_capacity, 0, kInf, "capacities must be >= 0");
  detail::check_all(r, "tariffs.nareva_capacity", tf.nareva_capacity, 0, kInf, "capacities must be >= 0");
  if (tf.nareva_price.size() == nmh)
    for (int n = 0; n < N; ++n)
      if (!net.sites[n].nareva_allowed)
        for (int m = 0; m < M; ++m)
          for (int h = 0; h < H; ++h)
            if (tf.nareva(n, m, h) != 0) {
              r.error("tariffs.nareva_price", "p_N defined where nareva_allowed=false at " + net.sites[n].id);
              m = M;
              break;
            }

  const auto& dm = inst.demand;
  if (dm.sites != N || dm.years != Y || dm.months != M || dm.hours != H)
    r.error("demand", "dimension does not match time structure x network");
  detail::check_size(r, "demand.values", dm.values.size(), static_cast<size_t>(N) * Y * M * H);
  bool negative = false;
  for (size_t i = 0; i < dm.values.size(); ++i) {
    if (!std::isfinite(dm.values[i])) {
      r.error(detail::at("demand.values", i), "demand must be finite");
      break;
    }
    negative = negative || dm.values[i] < 0;
  }
  if (negative) r.warn("demand.values", "negative demand (cogeneration) present");

  if (inst.emissions.onee < 0 || inst.emissions.nareva < 0) r.error("emissions", "intensities must be >= 0");
  detail::check_all(r, "emissions.local", inst.emissions.local, 0, kInf, "intensities must be >= 0");

  const auto& g = inst.robustness;
  if (!(g.gamma_max >= 0)) r.error("robustness.gamma_max", "gamma must be >= 0");
  if (!(g.gamma_c >= 0)) r.error("robustness.gamma_c", "gamma must be >= 0");
  if (!(g.gamma_clt >= 0)) r.error("robustness.gamma_clt", "gamma must be >= 0");
  if (!(inst.delta >= 0)) r.error("delta", "delta must be >= 0");

  if (inst.scenarios) {
    const auto& sc = *inst.scenarios;
    if (sc.scenarios < 1) r.error("scenarios", "|D| must be >= 1");
    if (sc.months != M) r.error("scenarios.months", "month count differs from time structure");
    if (sc.hours != H * sc.segment_days) r.error("scenarios.hours", "hours must equal H x segment length");
    detail::check_size(r, "scenarios.centroids", sc.centroids.size(),
                       static_cast<size_t>(sc.scenarios) * sc.site_count() * sc.hours);
    detail::check_size(r, "scenarios.weights", sc.weights.size(), static_cast<size_t>(sc.scenarios) * sc.months);
    detail::check_all(r, "scenarios.centroids", sc.centroids, 0, 1, "centroids must lie in [0,1]");
    detail::check_all(r, "scenarios.weights", sc.weights, 0, 1 + 1e-9, "weights must lie in [0,1]");
    if (sc.weights.size() == static_cast<size_t>(sc.scenarios) * sc.months)
      for (int m = 0; m < sc.months; ++m) {
        double s = 0;
        for (int d = 0; d < sc.scenarios; ++d) s += sc.weight(d, m);
        if (std::abs(s - 1) > 1e-9) r.error(detail::at("scenarios.weights", m), "weights must sum to 1");
      }
    for (const auto& id : sc.sites)
      if (net.site_index(id) < 0) r.error("scenarios.sites", "unknown site " + id);
  }
  if (inst.statistics && inst.scenarios) {
    const auto& st = *inst.statistics;
    if (st.scenarios != inst.scenarios->scenarios || st.hours != inst.scenarios->hours)
      r.error("statistics", "statistics do not match scenario set");
    detail::check_all(r, "statistics.u_max", st.u_max, 0, kInf, "U_MAX must be >= 0");
    detail::check_all(r, "statistics.u_sv", st.u_sv, 0, kInf, "U_SV must be >= 0");
    detail::check_all(r, "statistics.sigma", st.sigma, 0, kInf, "sigma must be >= 0");
  }
  if (inst.fixed_investment) validate_plan(inst, *inst.fixed_investment, r, "fixed_investment");
  return r;
}

}  // namespace helios
