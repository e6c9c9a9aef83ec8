#pragma once

// Structured summaries of a solved plan, shared by the CLI and the plan service.

#include <ostream>
#include <string>

#include "helios/core/json.hpp"
#include "helios/evaluation/metrics.hpp"
#include "helios/io/csv.hpp"
#include "helios/plan/pipeline.hpp"

namespace helios {

inline json breakdown_json(const ObjectiveBreakdown& b) {
  return {{"battery", b.battery}, {"solar", b.solar},   {"rent", b.rent},
          {"energy", b.energy},   {"salvage", b.salvage}, {"adjustment", b.adjustment}};
}

// Investment by site and year, NPV and emissions against `baseline` (the budget-0 solve of the same model).
inline json plan_summary(const PlanningInstance& inst, const PlanSolution& sol, const PlanSolution& baseline) {
  json inv = json::array();
  for (int n = 0; n < sol.plan.sites; ++n) {
    json b = json::array(), z = json::array();
    for (int y = 0; y < sol.plan.years; ++y) {
      b.push_back(sol.plan.b(n, y));
      z.push_back(sol.plan.z(n, y));
    }
    inv.push_back({{"site", inst.network.sites[n].id}, {"battery_kwh", b}, {"solar_kw", z}});
  }
  auto npv = eval::compute_npv(inst, sol, baseline);
  json em;
  auto plan_em = eval::annual_emissions(inst, sol.dispatch), base_em = eval::annual_emissions(inst, baseline.dispatch);
  double pe = 0.0, be = 0.0;
  for (double v : plan_em) pe += v;
  for (double v : base_em) be += v;
  em = {{"plan_t", pe}, {"baseline_t", be}, {"annual_t", plan_em}};
  em["reduction"] = be > 0.0 ? json(eval::emissions_reduction(pe, be)) : json(nullptr);
  return {{"objective", sol.objective},
          {"breakdown", breakdown_json(sol.breakdown)},
          {"annual_operational", sol.annual_operational},
          {"annual_investment", sol.annual_investment},
          {"investment", inv},
          {"npv",
           {{"npv", npv.npv},
            {"baseline_operational", npv.baseline_operational},
            {"plan_operational", npv.plan_operational},
            {"investment", npv.investment}}},
          {"emissions", em},
          {"dimensions",
           {{"sites", sol.dispatch.sites},
            {"scenarios", sol.dispatch.scenarios},
            {"months", sol.dispatch.months},
            {"years", sol.dispatch.years},
            {"hours", sol.dispatch.hours}}},
          {"solver", {{"name", sol.solver}, {"seconds", sol.seconds}, {"iterations", sol.iterations}}}};
}

// Hourly rows of scenario d, month m, year y. `balance_residual` is supply minus demand at each site
// (>= 0 up to solver tolerance).
inline json dispatch_slice(const PlanningInstance& inst, const PlanSolution& sol, int d, int m, int y) {
  const auto& ds = sol.dispatch;
  if (d < 0 || d >= ds.scenarios || m < 0 || m >= ds.months || y < 0 || y >= ds.years)
    fail(ErrorCode::not_found, "no dispatch block for scenario " + std::to_string(d) + ", month " +
                                   std::to_string(m) + ", year " + std::to_string(y));
  const auto& net = inst.network;
  const int blk = ds.block(d, m, y), H24 = inst.time.hours_per_day;
  json rows = json::array();
  for (int h = 0; h < ds.hours; ++h) {
    json sites = json::array(), arcs = json::array();
    for (int n = 0; n < ds.sites; ++n) {
      size_t i = ds.site_index(blk, h, n);
      double solar = inst.nominal_factor(n, h, d, y) * sol.plan.cumulative_solar(n, y, inst.costs.solar_degradation);
      double supply = solar + ds.onee[i] + ds.nareva[i] + inst.costs.discharge_rate * ds.discharge[i] - ds.sales[i];
      for (int a = 0; a < ds.arcs; ++a) {
        double fp = ds.flow_pos[ds.arc_index(blk, h, a)], fn = ds.flow_neg[ds.arc_index(blk, h, a)];
        double eta = net.arcs[a].efficiency;
        if (net.arc_to(a) == n) supply += eta * fp - fn;
        if (net.arc_from(a) == n) supply += eta * fn - fp;
      }
      double demand = inst.demand.at(n, h % H24, m, y);
      sites.push_back({{"site", net.sites[n].id},
                       {"solar", solar},
                       {"onee", ds.onee[i]},
                       {"nareva", ds.nareva[i]},
                       {"sales", ds.sales[i]},
                       {"discharge", ds.discharge[i]},
                       {"storage", ds.storage[i]},
                       {"demand", demand},
                       {"balance_residual", supply - demand}});
    }
    for (int a = 0; a < ds.arcs; ++a)
      arcs.push_back({{"from", net.arcs[a].from},
                      {"to", net.arcs[a].to},
                      {"flow_pos", ds.flow_pos[ds.arc_index(blk, h, a)]},
                      {"flow_neg", ds.flow_neg[ds.arc_index(blk, h, a)]}});
    rows.push_back({{"hour", h + 1}, {"sites", sites}, {"arcs", arcs}});
  }
  return {{"scenario", d}, {"month", m + 1}, {"year", y + 1}, {"weight", inst.scenarios->weight(d, m)}, {"rows", rows}};
}

inline void write_investment_csv(std::ostream& os, const PlanningInstance& inst, const InvestmentPlan& p) {
  os << "site,year,battery_kwh,solar_kw\n";
  for (int n = 0; n < p.sites; ++n)
    for (int y = 0; y < p.years; ++y)
      os << inst.network.sites[n].id << ',' << y + 1 << ',' << io::format_double(p.b(n, y)) << ','
         << io::format_double(p.z(n, y)) << '\n';
}

}  // namespace helios
