#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "helios/core/types.hpp"
#include "helios/io/synthetic.hpp"
#include "helios/scenario/reduction.hpp"
#include "helios/scenario/statistics.hpp"

namespace fixtures {

using namespace helios;

// Hand-sized instance: site A (mining, may host solar), site B (chemical), one arc A->B.
// With months == 1 the single month carries the whole year.
inline PlanningInstance toy_instance(int years = 1, int months = 1, int scenarios = 2, bool two_sites = true) {
  PlanningInstance inst;
  inst.name = "toy";
  inst.network.sites.push_back({"A", SiteKind::mining, true, true});
  if (two_sites) {
    inst.network.sites.push_back({"B", SiteKind::chemical, false, false});
    Arc a;
    a.from = "A";
    a.to = "B";
    a.capacity = 500.0;
    a.efficiency = 0.99;
    a.rent_price.assign(static_cast<size_t>(months) * 24, 0.01);
    inst.network.arcs.push_back(a);
  }
  const int N = inst.sites();
  if (months == 12) {
    inst.time = TimeStructure::calendar(years, 2025);
  } else {
    inst.time.months = months;
    inst.time.years = years;
    for (int y = 0; y < years; ++y)
      for (int m = 0; m < months; ++m) inst.time.days_in_month.push_back(365 / months + (m < 365 % months ? 1 : 0));
  }
  inst.costs.budget = 2.0e5;
  for (int y = 0; y < years; ++y) {
    inst.costs.battery_cost.push_back(300.0 * std::pow(0.95, y));
    inst.costs.solar_cost.push_back(1500.0 * std::pow(0.97, y));
  }
  auto& T = inst.tariffs;
  T.months = months;
  T.hours = 24;
  T.onee_price.resize(static_cast<size_t>(N) * months * 24);
  T.nareva_price.resize(T.onee_price.size());
  T.feed_in_price.resize(T.onee_price.size());
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < months; ++m)
      for (int h = 0; h < 24; ++h) {
        size_t i = T.index(n, m, h);
        T.onee_price[i] = io::onee_tariff(h);
        T.nareva_price[i] = inst.network.sites[n].nareva_allowed ? 0.78 : 0.0;
        T.feed_in_price[i] = 0.3;
      }
  T.onee_capacity.assign(24, 1.0e4);
  T.nareva_capacity.assign(24, 1.0e4);
  auto& D = inst.demand;
  D.sites = N;
  D.years = years;
  D.months = months;
  D.hours = 24;
  D.values.resize(static_cast<size_t>(N) * years * months * 24);
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < years; ++y)
      for (int m = 0; m < months; ++m)
        for (int h = 0; h < 24; ++h) D.values[D.index(n, y, m, h)] = n == 0 ? 100.0 : 150.0;

  ReducedScenarioSet sc;
  sc.sites = {"A"};
  sc.scenarios = scenarios;
  sc.hours = 24;
  sc.months = months;
  sc.centroids.assign(static_cast<size_t>(scenarios) * 24, 0.0);
  for (int d = 0; d < scenarios; ++d)
    for (int h = 6; h < 19; ++h)
      sc.centroids[static_cast<size_t>(d) * 24 + h] = (0.9 - 0.3 * d / std::max(1, scenarios - 1)) *
                                                      std::sin(M_PI * (h - 5.5) / 13.0);
  sc.weights.assign(static_cast<size_t>(months) * scenarios, 1.0 / scenarios);
  sc.members.resize(scenarios);
  for (int d = 0; d < scenarios; ++d) sc.members[d] = {d};
  inst.scenarios = sc;

  UncertaintyStatistics st;
  st.scenarios = scenarios;
  st.hours = 24;
  st.u_max.assign(static_cast<size_t>(scenarios) * 24, 0.0);
  st.u_sv.assign(st.u_max.size(), 0.0);
  for (int d = 0; d < scenarios; ++d)
    for (int h = 6; h < 19; ++h) {
      st.u_max[static_cast<size_t>(d) * 24 + h] = 0.15;
      st.u_sv[static_cast<size_t>(d) * 24 + h] = 0.08;
    }
  st.sigma.assign(scenarios, 0.4);
  inst.statistics = st;
  return inst;
}

// Synthetic five-site instance with reduced scenarios and statistics attached.
inline io::SyntheticData synthetic(int years, int k, uint64_t seed = 7, double budget = 2.0e8) {
  io::SyntheticSpec spec;
  spec.years = years;
  spec.seed = seed;
  spec.budget = budget;
  auto data = io::generate_synthetic(spec);
  data.instance.scenarios = scenario::reduce_scenarios(data.dataset, k, seed);
  data.instance.statistics = scenario::compute_uncertainty_statistics(data.dataset, *data.instance.scenarios);
  return data;
}

}  // namespace fixtures
