#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "helios/core/error.hpp"
#include "helios/core/types.hpp"

namespace helios::scenario {

// Outer product of a single-day set: |D|^length sequences of consecutive days.
// Sequence weights in month m are products of member weights.
inline ReducedScenarioSet extend_scenarios(const ReducedScenarioSet& base, int length, int max_scenarios = 1000) {
  if (length != 2 && length != 3) fail(ErrorCode::validation, "extension length must be 2 or 3");
  if (base.segment_days != 1) fail(ErrorCode::validation, "only single-day sets can be extended");
  const int K = base.scenarios, H = base.hours, S = base.site_count();
  const double count = std::pow(static_cast<double>(K), length);
  if (count > max_scenarios)
    fail(ErrorCode::size_limit, std::to_string(static_cast<long long>(count)) + " extended scenarios exceed the cap of " +
                                    std::to_string(max_scenarios));
  const int Ke = static_cast<int>(count);
  ReducedScenarioSet e;
  e.sites = base.sites;
  e.scenarios = Ke;
  e.hours = H * length;
  e.months = base.months;
  e.segment_days = length;
  e.centroids.assign(static_cast<size_t>(Ke) * S * e.hours, 0.0);
  e.weights.assign(static_cast<size_t>(e.months) * Ke, 1.0);
  e.members.resize(Ke);
  for (int q = 0; q < Ke; ++q) {
    std::vector<int> seq(length);
    for (int t = length - 1, r = q; t >= 0; --t, r /= K) seq[t] = r % K;
    e.members[q] = seq;
    for (int t = 0; t < length; ++t) {
      for (int s = 0; s < S; ++s)
        for (int h = 0; h < H; ++h)
          e.centroids[(static_cast<size_t>(q) * S + s) * e.hours + t * H + h] = base.centroid(seq[t], s, h);
      for (int m = 0; m < e.months; ++m) e.weights[static_cast<size_t>(m) * Ke + q] *= base.weight(seq[t], m);
    }
  }
  return e;
}

// Statistics of a sequence: hourly bounds concatenate; daily deviation sums add, so sigma
// combines as the root of summed variances.
inline UncertaintyStatistics extend_statistics(const UncertaintyStatistics& base, const ReducedScenarioSet& ext) {
  const int H = base.hours, L = ext.segment_days;
  UncertaintyStatistics st;
  st.scenarios = ext.scenarios;
  st.hours = H * L;
  st.u_max.resize(static_cast<size_t>(st.scenarios) * st.hours);
  st.u_sv.resize(st.u_max.size());
  st.sigma.assign(st.scenarios, 0.0);
  for (int q = 0; q < st.scenarios; ++q) {
    double var = 0.0;
    for (int t = 0; t < L; ++t) {
      int d = ext.members[q][t];
      for (int h = 0; h < H; ++h) {
        st.u_max[static_cast<size_t>(q) * st.hours + t * H + h] = base.max_dev(d, h);
        st.u_sv[static_cast<size_t>(q) * st.hours + t * H + h] = base.smooth_dev(d, h);
      }
      var += base.sigma[d] * base.sigma[d];
    }
    st.sigma[q] = std::sqrt(var);
  }
  return st;
}

}  // namespace helios::scenario
