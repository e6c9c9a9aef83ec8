#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "helios/core/error.hpp"

namespace helios::scenario {

struct KMeansOptions {
  int restarts = 20;
  int max_iter = 300;
  double rel_tol = 1e-8;
};

struct KMeansResult {
  int k = 0;
  int dim = 0;
  std::vector<double> centroids;  // (k, dim)
  std::vector<int> assignment;
  double objective = 0.0;         // sum of squared distances
  std::vector<double> history;    // objective after each Lloyd iteration of the kept run
};

inline double squared_distance(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int t = 0; t < dim; ++t) {
    double d = a[t] - b[t];
    s += d * d;
  }
  return s;
}

// Nearest centroid; ties go to the lowest index.
inline int nearest(const double* p, const std::vector<double>& c, int k, int dim, double* dist = nullptr) {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (int d = 0; d < k; ++d) {
    double v = squared_distance(p, c.data() + static_cast<size_t>(d) * dim, dim);
    if (v < bd) {
      bd = v;
      best = d;
    }
  }
  if (dist) *dist = bd;
  return best;
}

namespace kmeans_detail {

inline std::vector<double> seed_plus_plus(const std::vector<double>& x, int n, int dim, int k, std::mt19937_64& rng) {
  std::vector<double> c(static_cast<size_t>(k) * dim);
  std::uniform_int_distribution<int> pick(0, n - 1);
  int first = pick(rng);
  std::copy_n(x.begin() + static_cast<size_t>(first) * dim, dim, c.begin());
  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) d2[i] = squared_distance(&x[static_cast<size_t>(i) * dim], c.data(), dim);
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : d2) total += v;
    int chosen = 0;
    if (total <= 0.0) {
      chosen = pick(rng);
    } else {
      std::uniform_real_distribution<double> U(0.0, total);
      double r = U(rng), acc = 0.0;
      chosen = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r && d2[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    }
    std::copy_n(x.begin() + static_cast<size_t>(chosen) * dim, dim, c.begin() + static_cast<size_t>(j) * dim);
    for (int i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], squared_distance(&x[static_cast<size_t>(i) * dim], &c[static_cast<size_t>(j) * dim], dim));
  }
  return c;
}

}  // namespace kmeans_detail

// Lloyd iterations from given centroids.
inline KMeansResult lloyd(const std::vector<double>& x, int n, int dim, std::vector<double> c, int k,
                          const KMeansOptions& opt) {
  KMeansResult r;
  r.k = k;
  r.dim = dim;
  r.assignment.assign(n, 0);
  double prev = std::numeric_limits<double>::infinity();
  std::vector<double> sum(static_cast<size_t>(k) * dim);
  std::vector<int> cnt(k);
  for (int it = 0; it < opt.max_iter; ++it) {
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      double dist;
      r.assignment[i] = nearest(&x[static_cast<size_t>(i) * dim], c, k, dim, &dist);
      obj += dist;
    }
    r.history.push_back(obj);
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(cnt.begin(), cnt.end(), 0);
    for (int i = 0; i < n; ++i) {
      int d = r.assignment[i];
      cnt[d]++;
      for (int t = 0; t < dim; ++t) sum[static_cast<size_t>(d) * dim + t] += x[static_cast<size_t>(i) * dim + t];
    }
    bool moved = false;
    for (int d = 0; d < k; ++d) {
      if (cnt[d] == 0) {
        // Empty cluster: move it to the point farthest from its centroid.
        int far = 0;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          double v = squared_distance(&x[static_cast<size_t>(i) * dim],
                                      &c[static_cast<size_t>(r.assignment[i]) * dim], dim);
          if (v > fd) {
            fd = v;
            far = i;
          }
        }
        if (fd > 0.0) {
          std::copy_n(x.begin() + static_cast<size_t>(far) * dim, dim, c.begin() + static_cast<size_t>(d) * dim);
          moved = true;
        }
        continue;
      }
      for (int t = 0; t < dim; ++t) {
        double v = sum[static_cast<size_t>(d) * dim + t] / cnt[d];
        if (v != c[static_cast<size_t>(d) * dim + t]) moved = true;
        c[static_cast<size_t>(d) * dim + t] = v;
      }
    }
    if (!moved || (std::isfinite(prev) && prev - obj <= opt.rel_tol * std::max(prev, 1e-300))) {
      prev = obj;
      break;
    }
    prev = obj;
  }
  // Final assignment against the final centroids.
  r.objective = 0.0;
  for (int i = 0; i < n; ++i) {
    double dist;
    r.assignment[i] = nearest(&x[static_cast<size_t>(i) * dim], c, k, dim, &dist);
    r.objective += dist;
  }
  r.centroids = std::move(c);
  return r;
}

// k-means++ seeding, best of `restarts` Lloyd runs.
inline KMeansResult kmeans(const std::vector<double>& x, int n, int dim, int k, uint64_t seed,
                           const KMeansOptions& opt = {}) {
  if (k < 1 || k > n) fail(ErrorCode::validation, "k-means needs 1 <= k <= number of points");
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int rs = 0; rs < std::max(1, opt.restarts); ++rs) {
    auto c = kmeans_detail::seed_plus_plus(x, n, dim, k, rng);
    auto r = lloyd(x, n, dim, std::move(c), k, opt);
    if (r.objective < best.objective) best = std::move(r);
  }
  return best;
}

}  // namespace helios::scenario
