#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace helios {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SiteKind { mining, chemical };

struct Site {
  std::string id;
  SiteKind kind = SiteKind::mining;
  bool solar_allowed = true;
  bool nareva_allowed = true;
};

struct Arc {
  std::string from;
  std::string to;
  double capacity = 0.0;    // K_a, kW
  double efficiency = 1.0;  // eta_a
  std::vector<double> rent_price;  // MAD/kWh, (month, hour)
};

struct EnergyNetwork {
  std::vector<Site> sites;
  std::vector<Arc> arcs;

  int site_count() const { return static_cast<int>(sites.size()); }
  int arc_count() const { return static_cast<int>(arcs.size()); }

  int site_index(std::string_view id) const {
    for (int n = 0; n < site_count(); ++n)
      if (sites[n].id == id) return n;
    return -1;
  }
  int arc_from(int a) const { return site_index(arcs[a].from); }
  int arc_to(int a) const { return site_index(arcs[a].to); }

  // I(n): arcs ending at n; O(n): arcs leaving n.
  std::vector<int> inbound(int n) const {
    std::vector<int> out;
    for (int a = 0; a < arc_count(); ++a)
      if (arc_to(a) == n) out.push_back(a);
    return out;
  }
  std::vector<int> outbound(int n) const {
    std::vector<int> out;
    for (int a = 0; a < arc_count(); ++a)
      if (arc_from(a) == n) out.push_back(a);
    return out;
  }
};

struct TimeStructure {
  int hours_per_day = 24;
  int months = 12;
  int years = 20;
  std::vector<int> days_in_month;  // (year, month)

  int days(int m, int y) const { return days_in_month[static_cast<size_t>(y) * months + m]; }

  static bool leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

  static TimeStructure calendar(int years, int first_year = 2025) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    TimeStructure t;
    t.years = years;
    for (int y = 0; y < years; ++y)
      for (int m = 0; m < 12; ++m)
        t.days_in_month.push_back(kDays[m] + (m == 1 && leap(first_year + y) ? 1 : 0));
    return t;
  }
};

struct CostParameters {
  double budget = 0.0;                // B, MAD
  double discount = 0.96;             // rho
  std::vector<double> battery_cost;   // c_b^y, MAD/kWh
  std::vector<double> solar_cost;     // c_s^y, MAD/kW
  double solar_degradation = 0.995;   // xi
  double battery_degradation = 0.96;  // nu
  double battery_retention = 0.997;   // psi
  double sell_fraction = 0.2;         // beta (Table 1 sell fraction, not the DRO dual)
  double discharge_rate = 1.0;        // R

  // rho^y with y counted from 1; `y` here is zero-based.
  double discount_factor(int y) const { return std::pow(discount, y + 1); }
};

struct TariffSchedule {
  int months = 12;
  int hours = 24;
  std::vector<double> onee_price;     // (site, month, hour)
  std::vector<double> nareva_price;   // (site, month, hour)
  std::vector<double> feed_in_price;  // (site, month, hour)
  std::vector<double> onee_capacity;    // per hour, kW
  std::vector<double> nareva_capacity;  // per hour, kW

  size_t index(int n, int m, int h) const {
    return (static_cast<size_t>(n) * months + m) * hours + h;
  }
  double onee(int n, int m, int h) const { return onee_price[index(n, m, h)]; }
  double nareva(int n, int m, int h) const { return nareva_price[index(n, m, h)]; }
  double feed_in(int n, int m, int h) const { return feed_in_price[index(n, m, h)]; }
};

struct DemandProfile {
  int sites = 0;
  int years = 0;
  int months = 12;
  int hours = 24;
  std::vector<double> values;  // (site, year, month, hour), kWh

  size_t index(int n, int y, int m, int h) const {
    return ((static_cast<size_t>(n) * years + y) * months + m) * hours + h;
  }
  double at(int n, int h, int m, int y) const { return values[index(n, y, m, h)]; }
};

struct CapacityFactorDay {
  std::string date;           // ISO-8601
  int month = 0;              // zero-based
  std::vector<double> values; // (site, hour)
};

struct CapacityFactorDataset {
  std::vector<std::string> sites;
  int hours = 24;
  std::vector<CapacityFactorDay> days;

  int site_count() const { return static_cast<int>(sites.size()); }
  int day_count() const { return static_cast<int>(days.size()); }
  double at(int i, int s, int h) const { return days[i].values[static_cast<size_t>(s) * hours + h]; }
};

struct InvestmentPlan {
  int sites = 0;
  int years = 0;
  std::vector<double> battery;  // b_n^y, kWh, (site, year)
  std::vector<double> solar;    // z_n^y, kW, (site, year)

  static InvestmentPlan zero(int sites, int years) {
    InvestmentPlan p;
    p.sites = sites;
    p.years = years;
    p.battery.assign(static_cast<size_t>(sites) * years, 0.0);
    p.solar.assign(static_cast<size_t>(sites) * years, 0.0);
    return p;
  }
  double b(int n, int y) const { return battery[static_cast<size_t>(n) * years + y]; }
  double z(int n, int y) const { return solar[static_cast<size_t>(n) * years + y]; }

  // z-bar: degraded cumulative solar capacity in year y.
  double cumulative_solar(int n, int y, double xi) const {
    double s = 0;
    for (int k = 0; k <= y; ++k) s += std::pow(xi, y - k) * z(n, k);
    return s;
  }
  double cumulative_battery(int n, int y, double nu) const {
    double s = 0;
    for (int k = 0; k <= y; ++k) s += std::pow(nu, y - k) * b(n, k);
    return s;
  }
};

// Operational decisions for every (hour, scenario, month, year) block.
struct DispatchSchedule {
  int hours = 24;
  int scenarios = 0;
  int months = 12;
  int years = 0;
  int sites = 0;
  int arcs = 0;
  std::vector<double> flow_pos;   // f+, (block, hour, arc)
  std::vector<double> flow_neg;   // f-
  std::vector<double> storage;    // s, (block, hour, site)
  std::vector<double> discharge;  // r
  std::vector<double> onee;       // x_O
  std::vector<double> nareva;     // x_N
  std::vector<double> sales;      // w

  int block(int d, int m, int y) const { return (y * months + m) * scenarios + d; }
  int block_count() const { return scenarios * months * years; }
  size_t site_index(int blk, int h, int n) const {
    return (static_cast<size_t>(blk) * hours + h) * sites + n;
  }
  size_t arc_index(int blk, int h, int a) const {
    return (static_cast<size_t>(blk) * hours + h) * arcs + a;
  }
  void resize() {
    size_t ns = static_cast<size_t>(block_count()) * hours * sites;
    size_t na = static_cast<size_t>(block_count()) * hours * arcs;
    flow_pos.assign(na, 0.0);
    flow_neg.assign(na, 0.0);
    storage.assign(ns, 0.0);
    discharge.assign(ns, 0.0);
    onee.assign(ns, 0.0);
    nareva.assign(ns, 0.0);
    sales.assign(ns, 0.0);
  }
};

struct EmissionIntensity {
  double onee = 0.66;          // kg CO2 per kWh purchased
  double nareva = 0.63;
  std::vector<double> local;   // per site, local generation (0 for solar)
};

struct ReducedScenarioSet {
  std::vector<std::string> sites;  // sites carrying capacity-factor data
  int scenarios = 0;
  int hours = 24;                  // 24, or 48/72 for extended sets
  int months = 12;
  int segment_days = 1;            // days per scenario
  std::vector<double> centroids;   // v-bar, (scenario, site, hour)
  std::vector<double> weights;     // P, (month, scenario)
  std::vector<int> assignment;     // c(i): dataset day -> scenario
  std::vector<int> day_month;      // month of each dataset day
  std::vector<double> transport;   // W, (day, scenario)
  std::vector<std::vector<int>> members;  // base scenarios of each (extended) scenario

  int site_count() const { return static_cast<int>(sites.size()); }
  double centroid(int d, int s, int h) const {
    return centroids[(static_cast<size_t>(d) * site_count() + s) * hours + h];
  }
  double weight(int d, int m) const { return weights[static_cast<size_t>(m) * scenarios + d]; }
};

struct UncertaintyStatistics {
  int scenarios = 0;
  int hours = 24;
  std::vector<double> u_max;  // (scenario, hour)
  std::vector<double> u_sv;   // (scenario, hour)
  std::vector<double> sigma;  // per scenario

  double max_dev(int d, int h) const { return u_max[static_cast<size_t>(d) * hours + h]; }
  double smooth_dev(int d, int h) const { return u_sv[static_cast<size_t>(d) * hours + h]; }
};

struct UncertaintyBudget {
  double gamma_max = 0.0;
  double gamma_c = 0.0;
  double gamma_clt = 0.0;

  bool zero() const { return gamma_max == 0.0 && gamma_c == 0.0 && gamma_clt == 0.0; }
};

struct ModelOptions {
  bool paper_literal_ro = false;       // drop nominal balance/sell rows in the robust model
  double solar_trend_total = 0.015;    // capacity-factor loss over solar_trend_years
  int solar_trend_years = 20;
  double power_rating = kInf;          // |r| <= rating * installed kWh; unbounded by default
  bool literal_realtime_sell_cap = false;  // realized-only production in the residual cap

  // Linear ramp applied to v-bar in year y (zero-based).
  double solar_trend(int y) const {
    if (solar_trend_years <= 1) return 1.0;
    return 1.0 - solar_trend_total * static_cast<double>(y) / (solar_trend_years - 1);
  }
};

struct PlanningInstance {
  std::string name = "instance";
  EnergyNetwork network;
  TimeStructure time;
  CostParameters costs;
  TariffSchedule tariffs;
  DemandProfile demand;
  EmissionIntensity emissions;
  std::optional<ReducedScenarioSet> scenarios;
  std::optional<UncertaintyStatistics> statistics;
  UncertaintyBudget robustness;
  double delta = 0.0;
  ModelOptions options;
  std::optional<InvestmentPlan> fixed_investment;  // sunk assets; builders pin b and z

  int sites() const { return network.site_count(); }
  int arcs() const { return network.arc_count(); }
  int years() const { return time.years; }
  int months() const { return time.months; }

  // Capacity factor of site n in hour h of scenario d, year y, before uncertainty.
  double nominal_factor(int n, int h, int d, int y) const {
    const auto& sc = *scenarios;
    int s = -1;
    for (int k = 0; k < sc.site_count(); ++k)
      if (sc.sites[k] == network.sites[n].id) s = k;
    if (s < 0) return 0.0;
    return sc.centroid(d, s, h) * options.solar_trend(y);
  }
};

}  // namespace helios
