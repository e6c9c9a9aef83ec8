#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "helios/core/error.hpp"
#include "helios/core/types.hpp"

namespace helios::scenario {

// Deviation u = v_0 - vbar over each cluster's member days, pooled across data sites.
//   U_MAX(h,d) = max |u(h)|
//   U_SV(h,d)  = max |u(h) - u(h-1)|, hour 0 wraps to the last hour
//   sigma(d)   = corrected sample stdev of the daily sums sum_h u(h)
inline UncertaintyStatistics compute_uncertainty_statistics(const CapacityFactorDataset& data,
                                                            const ReducedScenarioSet& sc,
                                                            std::vector<std::string>* warnings = nullptr) {
  if (static_cast<int>(sc.assignment.size()) != data.day_count())
    fail(ErrorCode::dimension_mismatch, "assignment map does not cover the dataset");
  if (sc.segment_days != 1) fail(ErrorCode::validation, "statistics are computed on single-day scenarios");
  const int H = data.hours, K = sc.scenarios, S = data.site_count();
  if (H != sc.hours || S != sc.site_count()) fail(ErrorCode::dimension_mismatch, "dataset/scenario shape differs");
  UncertaintyStatistics st;
  st.scenarios = K;
  st.hours = H;
  st.u_max.assign(static_cast<size_t>(K) * H, 0.0);
  st.u_sv.assign(static_cast<size_t>(K) * H, 0.0);
  st.sigma.assign(K, 0.0);
  std::vector<std::vector<double>> sums(K);
  std::vector<int> members(K, 0);
  for (int i = 0; i < data.day_count(); ++i) {
    int d = sc.assignment[i];
    members[d]++;
    for (int s = 0; s < S; ++s) {
      double tot = 0.0;
      for (int h = 0; h < H; ++h) {
        int hp = (h + H - 1) % H;
        double u = data.at(i, s, h) - sc.centroid(d, s, h);
        double up = data.at(i, s, hp) - sc.centroid(d, s, hp);
        double& mx = st.u_max[static_cast<size_t>(d) * H + h];
        double& sv = st.u_sv[static_cast<size_t>(d) * H + h];
        mx = std::max(mx, std::abs(u));
        sv = std::max(sv, std::abs(u - up));
        tot += u;
      }
      sums[d].push_back(tot);
    }
  }
  for (int d = 0; d < K; ++d) {
    if (members[d] <= 1) {
      if (warnings) warnings->push_back("SingletonCluster: scenario " + std::to_string(d) + " has sigma = 0");
      continue;
    }
    const auto& v = sums[d];
    double mean = 0.0;
    for (double t : v) mean += t;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double t : v) ss += (t - mean) * (t - mean);
    st.sigma[d] = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return st;
}

}  // namespace helios::scenario
