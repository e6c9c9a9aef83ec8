#pragma once

// Two-phase dense tableau simplex with Bland's rule. Meant for small LPs (reference
// answers in tests, per-month transport problems); cones are rejected.

#include <cmath>
#include <string>
#include <vector>

#include "helios/model/model_instance.hpp"

namespace helios::solver {

enum class SimplexStatus { optimal, infeasible, unbounded, limit };

struct SimplexResult {
  SimplexStatus status = SimplexStatus::limit;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
};

class DenseSimplex {
 public:
  explicit DenseSimplex(int max_iter = 100000) : max_iter_(max_iter) {}

  SimplexResult solve(const ModelInstance& mdl) const {
    if (!mdl.cones.empty()) fail(ErrorCode::backend_unavailable, "dense-simplex does not support cones");
    const int nu = mdl.num_vars();
    // x_j = off_j + sgn_j * x'_j  (x' >= 0), free vars split into two columns.
    struct Map {
      double off = 0, sgn = 1;
      int col = -1, col_neg = -1;
    };
    std::vector<Map> mp(nu);
    int nc = 0;
    struct Row {
      std::vector<std::pair<int, double>> a;
      Sense s;
      double r;
    };
    std::vector<Row> rows;
    for (int j = 0; j < nu; ++j) {
      double l = mdl.lb[j], u = mdl.ub[j];
      if (l > u + 1e-12) return {SimplexStatus::infeasible, {}, 0.0, 0};
      if (std::isfinite(l)) {
        mp[j] = {l, 1.0, nc++, -1};
        if (std::isfinite(u)) rows.push_back({{{mp[j].col, 1.0}}, Sense::le, u - l});
      } else if (std::isfinite(u)) {
        mp[j] = {u, -1.0, nc++, -1};
      } else {
        mp[j] = {0.0, 1.0, nc, nc + 1};
        nc += 2;
      }
    }
    for (int i = 0; i < mdl.num_rows(); ++i) {
      Row r{{}, mdl.sense[i], mdl.rhs[i]};
      for (int p = mdl.row_ptr[i]; p < mdl.row_ptr[i + 1]; ++p) {
        const Map& q = mp[mdl.cols[p]];
        double a = mdl.vals[p];
        r.r -= a * q.off;
        r.a.push_back({q.col, a * q.sgn});
        if (q.col_neg >= 0) r.a.push_back({q.col_neg, -a});
      }
      rows.push_back(std::move(r));
    }
    std::vector<double> cost(nc, 0.0);
    for (int j = 0; j < nu; ++j) {
      cost[mp[j].col] += mdl.obj[j] * mp[j].sgn;
      if (mp[j].col_neg >= 0) cost[mp[j].col_neg] -= mdl.obj[j];
    }

    // Tableau columns: structural, slacks, artificials, rhs.
    const int m = static_cast<int>(rows.size());
    int nslack = 0;
    for (const auto& r : rows)
      if (r.s != Sense::eq) ++nslack;
    const int ncol = nc + nslack + m;
    const int W = ncol + 1;
    std::vector<double> T(static_cast<size_t>(m + 1) * W, 0.0);
    auto at = [&](int i, int j) -> double& { return T[static_cast<size_t>(i) * W + j]; };
    std::vector<int> basis(m);
    int sc = nc;
    for (int i = 0; i < m; ++i) {
      const Row& r = rows[i];
      double flip = r.r < 0 ? -1.0 : 1.0;
      for (auto [j, a] : r.a) at(i, j) += flip * a;
      if (r.s != Sense::eq) at(i, sc++) = flip * (r.s == Sense::le ? 1.0 : -1.0);
      at(i, nc + nslack + i) = 1.0;
      at(i, ncol) = flip * r.r;
      basis[i] = nc + nslack + i;
    }
    const int art0 = nc + nslack;

    int iters = 0;
    auto pivot = [&](int pr, int pc) {
      double pv = at(pr, pc);
      for (int j = 0; j < W; ++j) at(pr, j) /= pv;
      for (int i = 0; i <= m; ++i) {
        if (i == pr) continue;
        double f = at(i, pc);
        if (f == 0.0) continue;
        for (int j = 0; j < W; ++j) at(i, j) -= f * at(pr, j);
      }
      basis[pr] = pc;
    };
    // Returns 0 optimal, 1 unbounded, 2 limit. Objective row m holds reduced costs.
    auto run = [&](int allowed) -> int {
      for (;;) {
        if (++iters > max_iter_) return 2;
        int pc = -1;
        for (int j = 0; j < allowed; ++j)
          if (at(m, j) < -1e-11) {
            pc = j;
            break;
          }
        if (pc < 0) return 0;
        int pr = -1;
        double best = 0;
        for (int i = 0; i < m; ++i) {
          double a = at(i, pc);
          if (a > 1e-11) {
            double ratio = at(i, ncol) / a;
            if (pr < 0 || ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && basis[i] < basis[pr])) {
              pr = i;
              best = ratio;
            }
          }
        }
        if (pr < 0) return 1;
        pivot(pr, pc);
      }
    };

    // Phase 1: minimize sum of artificials.
    for (int j = 0; j < W; ++j) at(m, j) = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < W; ++j)
        if (j < art0 || j == ncol) at(m, j) -= at(i, j);
    if (run(ncol) == 2) return {SimplexStatus::limit, {}, 0.0, iters};
    double scale = 1.0;
    for (const auto& r : rows) scale = std::max(scale, std::abs(r.r));
    if (-at(m, ncol) > 1e-9 * scale) return {SimplexStatus::infeasible, {}, 0.0, iters};
    // Drive remaining artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (basis[i] < art0) continue;
      for (int j = 0; j < art0; ++j)
        if (std::abs(at(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
    }
    // Phase 2
    for (int j = 0; j < W; ++j) at(m, j) = 0.0;
    for (int j = 0; j < nc; ++j) at(m, j) = cost[j];
    for (int i = 0; i < m; ++i) {
      int b = basis[i];
      if (b < nc && cost[b] != 0.0) {
        double f = cost[b];
        for (int j = 0; j < W; ++j) at(m, j) -= f * at(i, j);
      }
    }
    int st = run(art0);
    if (st == 1) return {SimplexStatus::unbounded, {}, 0.0, iters};
    if (st == 2) return {SimplexStatus::limit, {}, 0.0, iters};

    std::vector<double> xp(ncol, 0.0);
    for (int i = 0; i < m; ++i) xp[basis[i]] = at(i, ncol);
    SimplexResult res;
    res.status = SimplexStatus::optimal;
    res.iterations = iters;
    res.x.resize(nu);
    for (int j = 0; j < nu; ++j) {
      double v = mp[j].off + mp[j].sgn * xp[mp[j].col];
      if (mp[j].col_neg >= 0) v -= xp[mp[j].col_neg];
      res.x[j] = v;
    }
    res.objective = mdl.objective_value(res.x);
    return res;
  }

 private:
  int max_iter_;
};

}  // namespace helios::solver
