#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "helios/core/types.hpp"
#include "helios/model/model_instance.hpp"
#include "helios/scenario/kmeans.hpp"
#include "helios/solver/solve.hpp"

namespace helios::scenario {

struct ReduceOptions {
  int months = 12;
  KMeansOptions kmeans;
};

// Per-month transport LP with fixed centroids: W(i,d) >= 0, sum_d W(i,d) = 1,
// min sum W(i,d) * ||v_i - vbar_d||^2.  Returns W as (day, scenario) for the given days.
inline std::vector<double> transport_weights(const std::vector<double>& x, int dim, const std::vector<int>& days,
                                             const std::vector<double>& centroids, int k) {
  const int nd = static_cast<int>(days.size());
  ModelInstance lp;
  lp.name = "transport";
  std::vector<double> cost(static_cast<size_t>(nd) * k);
  for (int a = 0; a < nd; ++a)
    for (int d = 0; d < k; ++d)
      cost[static_cast<size_t>(a) * k + d] =
          squared_distance(&x[static_cast<size_t>(days[a]) * dim], &centroids[static_cast<size_t>(d) * dim], dim);
  int w0 = lp.add_block("W", {nd, k}, 0.0, kInf);
  for (size_t t = 0; t < cost.size(); ++t) lp.obj[w0 + t] = cost[t];
  lp.begin_rows("unit_mass", "transport mass per day");
  for (int a = 0; a < nd; ++a) {
    LinExpr e;
    for (int d = 0; d < k; ++d) e.add(w0 + a * k + d, 1.0);
    lp.add_row(e, Sense::eq, 1.0);
  }
  SolveOptions so;
  so.backend = "dense-simplex";
  auto out = solve_optimal(lp, so);
  // Vertex solutions put unit mass on a cheapest centroid; resolve ties to the lowest index.
  std::vector<double> W(static_cast<size_t>(nd) * k, 0.0);
  for (int a = 0; a < nd; ++a) {
    int arg = 0;
    for (int d = 1; d < k; ++d)
      if (out.x[w0 + a * k + d] > out.x[w0 + a * k + arg]) arg = d;
    double c = cost[static_cast<size_t>(a) * k + arg];
    for (int d = 0; d < arg; ++d)
      if (cost[static_cast<size_t>(a) * k + d] <= c) {
        arg = d;
        break;
      }
    W[static_cast<size_t>(a) * k + arg] = 1.0;
  }
  return W;
}

inline ReducedScenarioSet reduce_scenarios(const CapacityFactorDataset& data, int k, uint64_t seed,
                                           const ReduceOptions& opt = {},
                                           std::vector<std::string>* warnings = nullptr) {
  const int n = data.day_count();
  const int dim = data.site_count() * data.hours;
  if (k < 1) fail(ErrorCode::validation, "scenario count must be >= 1");
  if (n < k) fail(ErrorCode::insufficient_days, "dataset has " + std::to_string(n) + " days, fewer than k=" +
                                                    std::to_string(k));
  std::vector<std::vector<int>> by_month(opt.months);
  for (int i = 0; i < n; ++i) {
    int m = data.days[i].month;
    if (m < 0 || m >= opt.months) fail(ErrorCode::validation, "day " + data.days[i].date + " has month out of range");
    by_month[m].push_back(i);
  }
  for (int m = 0; m < opt.months; ++m)
    if (by_month[m].empty()) fail(ErrorCode::empty_month, "month " + std::to_string(m + 1) + " has no days");

  std::vector<double> x(static_cast<size_t>(n) * dim);
  for (int i = 0; i < n; ++i) std::copy(data.days[i].values.begin(), data.days[i].values.end(), x.begin() + static_cast<size_t>(i) * dim);

  // Distinct points bound the useful cluster count.
  int distinct = 0;
  {
    std::vector<int> reps;
    for (int i = 0; i < n && distinct <= k; ++i) {
      bool seen = false;
      for (int r : reps)
        if (squared_distance(&x[static_cast<size_t>(i) * dim], &x[static_cast<size_t>(r) * dim], dim) == 0.0) {
          seen = true;
          break;
        }
      if (!seen) {
        reps.push_back(i);
        ++distinct;
      }
    }
  }
  int keff = std::min(k, distinct);
  if (keff < k && warnings)
    warnings->push_back("DegenerateData: only " + std::to_string(distinct) + " distinct days; using k=" +
                        std::to_string(keff));

  auto km = kmeans(x, n, dim, keff, seed, opt.kmeans);

  ReducedScenarioSet out;
  out.sites = data.sites;
  out.scenarios = keff;
  out.hours = data.hours;
  out.months = opt.months;
  out.segment_days = 1;
  out.centroids = km.centroids;
  for (double& v : out.centroids) v = std::clamp(v, 0.0, 1.0);
  out.assignment.resize(n);
  out.day_month.resize(n);
  out.transport.assign(static_cast<size_t>(n) * keff, 0.0);
  out.weights.assign(static_cast<size_t>(opt.months) * keff, 0.0);
  for (int i = 0; i < n; ++i) {
    out.day_month[i] = data.days[i].month;
    out.assignment[i] = nearest(&x[static_cast<size_t>(i) * dim], out.centroids, keff, dim);
  }
  for (int m = 0; m < opt.months; ++m) {
    const auto& J = by_month[m];
    auto W = transport_weights(x, dim, J, out.centroids, keff);
    for (size_t a = 0; a < J.size(); ++a)
      for (int d = 0; d < keff; ++d) {
        double w = W[a * keff + d];
        out.transport[static_cast<size_t>(J[a]) * keff + d] = w;
        out.weights[static_cast<size_t>(m) * keff + d] += w;
      }
    for (int d = 0; d < keff; ++d) out.weights[static_cast<size_t>(m) * keff + d] /= static_cast<double>(J.size());
  }
  out.members.resize(keff);
  for (int d = 0; d < keff; ++d) out.members[d] = {d};
  return out;
}

}  // namespace helios::scenario
