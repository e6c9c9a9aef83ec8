#pragma once

// Row-by-row re-check of a plan and its dispatch against the instance data, without the model.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "helios/core/types.hpp"

namespace helios {

struct FeasibilityReport {
  double worst = 0.0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

inline FeasibilityReport check_plan_feasibility(const PlanningInstance& inst, const InvestmentPlan& plan,
                                                const DispatchSchedule& ds, double tol = 1e-6) {
  FeasibilityReport rep;
  const auto& net = inst.network;
  const auto& C = inst.costs;
  const auto& T = inst.tariffs;
  const auto& sc = *inst.scenarios;
  const int N = net.site_count(), A = net.arc_count(), H = ds.hours, H24 = inst.time.hours_per_day;
  auto note = [&](double excess, const std::string& what) {
    rep.worst = std::max(rep.worst, excess);
    if (excess > tol && rep.violations.size() < 50) {
      std::ostringstream os;
      os << what << " violated by " << excess;
      rep.violations.push_back(os.str());
    }
  };
  auto tag = [](const char* name, int d, int m, int y, int h, int n) {
    return std::string(name) + "(d=" + std::to_string(d) + ",m=" + std::to_string(m) + ",y=" + std::to_string(y) +
           ",h=" + std::to_string(h) + ",n=" + std::to_string(n) + ")";
  };

  double spend = 0.0;
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < plan.years; ++y) {
      note(-plan.b(n, y), "b >= 0");
      note(-plan.z(n, y), "z >= 0");
      if (!net.sites[n].solar_allowed) note(std::abs(plan.z(n, y)), "z = 0 at " + net.sites[n].id);
      spend += C.discount_factor(y) * (C.battery_cost[y] * plan.b(n, y) + C.solar_cost[y] * plan.z(n, y));
    }
  note(spend - C.budget, "budget");

  std::vector<int> data_site(N, -1);
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < sc.site_count(); ++k)
      if (sc.sites[k] == net.sites[n].id) data_site[n] = k;

  for (int y = 0; y < ds.years; ++y)
    for (int m = 0; m < ds.months; ++m)
      for (int d = 0; d < ds.scenarios; ++d) {
        int blk = ds.block(d, m, y);
        for (int n = 0; n < N; ++n) {
          double zbar = plan.cumulative_solar(n, y, C.solar_degradation);
          double bbar = plan.cumulative_battery(n, y, C.battery_degradation);
          auto v = [&](int h) {
            if (data_site[n] < 0 || !net.sites[n].solar_allowed) return 0.0;
            return sc.centroid(d, data_site[n], h) * inst.options.solar_trend(y);
          };
          double wsum = 0.0, cap = 0.0;
          for (int h = 0; h < H; ++h) {
            size_t i = ds.site_index(blk, h, n);
            double inflow = 0.0;
            for (int a = 0; a < A; ++a) {
              double fp = ds.flow_pos[ds.arc_index(blk, h, a)], fn = ds.flow_neg[ds.arc_index(blk, h, a)];
              if (net.arc_to(a) == n) inflow += net.arcs[a].efficiency * fp - fn;
              if (net.arc_from(a) == n) inflow += net.arcs[a].efficiency * fn - fp;
            }
            double lhs = inflow + C.discharge_rate * ds.discharge[i] + ds.onee[i] + ds.nareva[i];
            double rhs = inst.demand.at(n, h % H24, m, y) + ds.sales[i] - v(h) * zbar;
            if (!(inst.options.paper_literal_ro && !inst.robustness.zero()))
              note(rhs - lhs, tag("balance", d, m, y, h, n));
            int hn = (h + 1) % H;
            double next = ds.storage[ds.site_index(blk, hn, n)];
            note(std::abs(next - (C.battery_retention * ds.storage[i] - ds.discharge[i])), tag("dynamics", d, m, y, h, n));
            note(ds.storage[i] - bbar, tag("storage", d, m, y, h, n));
            note(-ds.storage[i], tag("s>=0", d, m, y, h, n));
            note(-ds.onee[i], tag("xO>=0", d, m, y, h, n));
            note(-ds.nareva[i], tag("xN>=0", d, m, y, h, n));
            note(-ds.sales[i], tag("w>=0", d, m, y, h, n));
            note(ds.onee[i] - T.onee_capacity[h % H24], tag("onee_capacity", d, m, y, h, n));
            double gn = net.sites[n].nareva_allowed ? T.nareva_capacity[h % H24] : 0.0;
            note(ds.nareva[i] - gn, tag("nareva_capacity", d, m, y, h, n));
            wsum += ds.sales[i];
            cap += v(h) * zbar + std::max(0.0, -inst.demand.at(n, h % H24, m, y));
            if ((h + 1) % H24 == 0) {
              if (!(inst.options.paper_literal_ro && !inst.robustness.zero()))
                note(wsum - C.sell_fraction * cap, tag("sell_cap", d, m, y, h, n));
              wsum = cap = 0.0;
            }
          }
        }
        for (int h = 0; h < H; ++h)
          for (int a = 0; a < A; ++a) {
            double fp = ds.flow_pos[ds.arc_index(blk, h, a)], fn = ds.flow_neg[ds.arc_index(blk, h, a)];
            note(-fp, "f+ >= 0");
            note(-fn, "f- >= 0");
            note(fp + fn - net.arcs[a].capacity, tag("arc_capacity", d, m, y, h, a));
          }
      }
  return rep;
}

}  // namespace helios
