#pragma once

// Infeasible-start primal-dual interior-point method for
//   min c'x  s.t.  Ax (<=,=,>=) b,  l <= x <= u,  affine images of x in K_exp / K*_exp.
// Orthant complementarity uses Mehrotra predictor-corrector; exponential-cone blocks use
// primal-barrier scaling (Newton on s + mu*grad F(x) = 0) with a proximity safeguard.
// Newton systems are solved in augmented quasi-definite form with a sparse LDL^T.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "helios/model/model_instance.hpp"
#include "helios/solver/exp_cone.hpp"
#include "helios/solver/ldl.hpp"

namespace helios::solver {

inline constexpr double kProx = 1.0;  // cone neighbourhood radius
struct IpmSettings {
  double feas_tol = 1e-8;
  double opt_tol = 1e-8;
  double abs_feas_tol = 1e-7;  // row residual in user units; a few extra iterations are spent to reach it
  double stall_tol = 1e-5;     // a stalled run returns its best iterate if residuals and gap are below this
  int max_iter = 300;
  double time_limit = kInf;  // seconds
  bool verbose = false;
};

enum class IpmStatus { optimal, infeasible, unbounded, limit, numerical };

struct IpmResult {
  IpmStatus status = IpmStatus::numerical;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  std::string message;
};

namespace ipm_detail {

inline double big_to_inf(double v) {
  if (v >= 1e20) return kInf;
  if (v <= -1e20) return -kInf;
  return v;
}

// Internal standard form  A x = b, bounds, cones on consecutive triples.
struct StandardForm {
  int n = 0, m = 0;
  std::vector<int> Ap, Ai;  // CSC
  std::vector<double> Ax;
  std::vector<double> b, c, l, u;
  std::vector<char> cone;        // variable belongs to a cone triple
  std::vector<int> cone_first;   // first variable of each triple
  std::vector<int> user_col;     // internal column of each user variable, -1 if fixed
  std::vector<double> user_fixed;
  std::vector<double> colscale, rowscale;
  double bscale = 1.0, cscale = 1.0;
};

struct PresolveOutcome {
  bool infeasible = false;
  std::string message;
};

inline PresolveOutcome build_standard_form(const ModelInstance& mdl, StandardForm& sf) {
  const int nu = mdl.num_vars(), mu = mdl.num_rows();
  std::vector<double> lb(nu), ub(nu);
  for (int j = 0; j < nu; ++j) {
    lb[j] = big_to_inf(mdl.lb[j]);
    ub[j] = big_to_inf(mdl.ub[j]);
  }
  std::vector<char> in_cone(nu, 0);
  for (const auto& c : mdl.cones)
    for (int v : c.vars) in_cone[v] = 1;

  std::vector<char> fixed(nu, 0), alive(mu, 1);
  std::vector<double> fixval(nu, 0.0);
  PresolveOutcome out;
  auto tol_of = [](double a, double b) { return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); };

  for (int pass = 0; pass < 20; ++pass) {
    bool changed = false;
    for (int j = 0; j < nu; ++j) {
      if (fixed[j]) continue;
      if (lb[j] > ub[j] + tol_of(lb[j], ub[j])) {
        out.infeasible = true;
        out.message = "conflicting bounds on " + mdl.var_name(j);
        return out;
      }
      if (std::isfinite(lb[j]) && ub[j] - lb[j] <= 1e-12 * std::max(1.0, std::abs(lb[j]))) {
        fixed[j] = 1;
        fixval[j] = 0.5 * (lb[j] + ub[j]);
        changed = true;
      }
    }
    for (int i = 0; i < mu; ++i) {
      if (!alive[i]) continue;
      int cnt = 0, last = -1;
      double a_last = 0.0, r = mdl.rhs[i];
      for (int p = mdl.row_ptr[i]; p < mdl.row_ptr[i + 1]; ++p) {
        int j = mdl.cols[p];
        double a = mdl.vals[p];
        if (a == 0.0) continue;
        if (fixed[j]) {
          r -= a * fixval[j];
        } else {
          ++cnt;
          last = j;
          a_last = a;
        }
      }
      if (cnt == 0) {
        double t = 1e-9 * (1.0 + std::abs(mdl.rhs[i]));
        bool ok = (mdl.sense[i] == Sense::le && 0.0 <= r + t) || (mdl.sense[i] == Sense::ge && 0.0 >= r - t) ||
                  (mdl.sense[i] == Sense::eq && std::abs(r) <= t);
        if (!ok) {
          out.infeasible = true;
          out.message = "row " + mdl.row_name(i) + " cannot be satisfied";
          return out;
        }
        alive[i] = 0;
        changed = true;
      } else if (cnt == 1) {
        double v = r / a_last;
        bool upper = (mdl.sense[i] == Sense::le) == (a_last > 0);
        if (mdl.sense[i] == Sense::eq) {
          lb[last] = std::max(lb[last], v);
          ub[last] = std::min(ub[last], v);
        } else if (upper) {
          ub[last] = std::min(ub[last], v);
        } else {
          lb[last] = std::max(lb[last], v);
        }
        alive[i] = 0;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (int j = 0; j < nu; ++j)
    if (!fixed[j] && lb[j] > ub[j] + tol_of(lb[j], ub[j])) {
      out.infeasible = true;
      out.message = "conflicting bounds on " + mdl.var_name(j);
      return out;
    }

  // Column layout: free user vars, slacks, cone copies.
  sf.user_col.assign(nu, -1);
  sf.user_fixed = fixval;
  int n = 0;
  for (int j = 0; j < nu; ++j)
    if (!fixed[j]) sf.user_col[j] = n++;
  std::vector<int> row_of(mu, -1), slack_of(mu, -1);
  int m = 0;
  for (int i = 0; i < mu; ++i)
    if (alive[i]) {
      row_of[i] = m++;
      if (mdl.sense[i] != Sense::eq) slack_of[i] = n++;
    }
  const int ncones = static_cast<int>(mdl.cones.size());
  const int cone_base = n;
  n += 3 * ncones;
  const int cone_row_base = m;
  m += 3 * ncones;

  sf.n = n;
  sf.m = m;
  sf.c.assign(n, 0.0);
  sf.l.assign(n, -kInf);
  sf.u.assign(n, kInf);
  sf.cone.assign(n, 0);
  sf.b.assign(m, 0.0);

  // Triplets (row, col, val)
  std::vector<int> tr, tc;
  std::vector<double> tv;
  for (int j = 0; j < nu; ++j)
    if (!fixed[j]) {
      int k = sf.user_col[j];
      sf.c[k] = mdl.obj[j];
      sf.l[k] = lb[j];
      sf.u[k] = ub[j];
    }
  for (int i = 0; i < mu; ++i) {
    if (!alive[i]) continue;
    double r = mdl.rhs[i];
    for (int p = mdl.row_ptr[i]; p < mdl.row_ptr[i + 1]; ++p) {
      int j = mdl.cols[p];
      double a = mdl.vals[p];
      if (a == 0.0) continue;
      if (fixed[j]) {
        r -= a * fixval[j];
      } else {
        tr.push_back(row_of[i]);
        tc.push_back(sf.user_col[j]);
        tv.push_back(a);
      }
    }
    sf.b[row_of[i]] = r;
    if (slack_of[i] >= 0) {
      tr.push_back(row_of[i]);
      tc.push_back(slack_of[i]);
      tv.push_back(mdl.sense[i] == Sense::le ? 1.0 : -1.0);
      sf.l[slack_of[i]] = 0.0;
    }
  }
  for (int k = 0; k < ncones; ++k) {
    const auto& cn = mdl.cones[k];
    int col = cone_base + 3 * k, row = cone_row_base + 3 * k;
    sf.cone_first.push_back(col);
    for (int t = 0; t < 3; ++t) sf.cone[col + t] = 1;
    // Internal (p,q,r) in K_exp as linear images of the user triple.
    double M[3][3] = {{0}};
    if (cn.kind == ConeKind::exponential) {
      for (int t = 0; t < 3; ++t) M[t][t] = cn.scale[t];
    } else {
      M[0][0] = cn.scale[0];
      M[0][1] = -cn.scale[1];
      M[1][0] = -cn.scale[0];
      M[2][2] = cn.scale[2];
    }
    for (int t = 0; t < 3; ++t) {
      tr.push_back(row + t);
      tc.push_back(col + t);
      tv.push_back(1.0);
      double r = 0.0;
      for (int q = 0; q < 3; ++q) {
        if (M[t][q] == 0.0) continue;
        int j = cn.vars[q];
        if (fixed[j]) {
          r += M[t][q] * fixval[j];
        } else {
          tr.push_back(row + t);
          tc.push_back(sf.user_col[j]);
          tv.push_back(-M[t][q]);
        }
      }
      sf.b[row + t] = r;
    }
  }

  // Triplets -> CSC, merging duplicates.
  std::vector<int> order(tr.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::sort(order.begin(), order.end(),
            [&](int a, int b2) { return tc[a] != tc[b2] ? tc[a] < tc[b2] : tr[a] < tr[b2]; });
  sf.Ap.assign(n + 1, 0);
  sf.Ai.clear();
  sf.Ax.clear();
  int pc = -1, pr = -1;
  for (int k : order) {
    if (tc[k] == pc && tr[k] == pr) {
      sf.Ax.back() += tv[k];
      continue;
    }
    sf.Ai.push_back(tr[k]);
    sf.Ax.push_back(tv[k]);
    sf.Ap[tc[k] + 1]++;
    pc = tc[k];
    pr = tr[k];
  }
  for (int j = 0; j < n; ++j) sf.Ap[j + 1] += sf.Ap[j];
  return out;
}

inline void equilibrate(StandardForm& sf) {
  const int n = sf.n, m = sf.m;
  sf.colscale.assign(n, 1.0);
  sf.rowscale.assign(m, 1.0);
  std::vector<double> rmax(m), cmax(n);
  for (int it = 0; it < 12; ++it) {
    std::fill(rmax.begin(), rmax.end(), 0.0);
    std::fill(cmax.begin(), cmax.end(), 0.0);
    for (int j = 0; j < n; ++j)
      for (int p = sf.Ap[j]; p < sf.Ap[j + 1]; ++p) {
        double a = std::abs(sf.Ax[p]);
        rmax[sf.Ai[p]] = std::max(rmax[sf.Ai[p]], a);
        cmax[j] = std::max(cmax[j], a);
      }
    std::vector<double> rs(m, 1.0), cs(n, 1.0);
    for (int i = 0; i < m; ++i)
      if (rmax[i] > 0) rs[i] = 1.0 / std::sqrt(rmax[i]);
    for (int j = 0; j < n; ++j)
      if (cmax[j] > 0) cs[j] = 1.0 / std::sqrt(cmax[j]);
    for (int f : sf.cone_first) {
      double g = std::cbrt(cs[f] * cs[f + 1] * cs[f + 2]);
      cs[f] = cs[f + 1] = cs[f + 2] = g;
    }
    for (int j = 0; j < n; ++j)
      for (int p = sf.Ap[j]; p < sf.Ap[j + 1]; ++p) sf.Ax[p] *= rs[sf.Ai[p]] * cs[j];
    for (int i = 0; i < m; ++i) sf.rowscale[i] *= rs[i];
    for (int j = 0; j < n; ++j) sf.colscale[j] *= cs[j];
  }
  for (int i = 0; i < m; ++i) sf.b[i] *= sf.rowscale[i];
  for (int j = 0; j < n; ++j) {
    sf.c[j] *= sf.colscale[j];
    sf.l[j] /= sf.colscale[j];
    sf.u[j] /= sf.colscale[j];
  }
  double bmax = 0.0, cmx = 0.0;
  for (double v : sf.b) bmax = std::max(bmax, std::abs(v));
  for (double v : sf.c) cmx = std::max(cmx, std::abs(v));
  sf.bscale = std::max(1.0, bmax);
  sf.cscale = std::max(1.0, cmx);
  for (double& v : sf.b) v /= sf.bscale;
  for (int j = 0; j < n; ++j) {
    sf.l[j] /= sf.bscale;
    sf.u[j] /= sf.bscale;
    sf.c[j] /= sf.cscale;
  }
}

inline double inf_norm(const std::vector<double>& v) {
  double r = 0.0;
  for (double a : v) r = std::max(r, std::abs(a));
  return r;
}

}  // namespace ipm_detail

class InteriorPoint {
 public:
  explicit InteriorPoint(IpmSettings s = {}) : set_(s) {}

  IpmResult solve(const ModelInstance& mdl) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    IpmResult res;
    ipm_detail::StandardForm& sf = sf_;
    sf = ipm_detail::StandardForm{};
    auto pre = ipm_detail::build_standard_form(mdl, sf);
    if (pre.infeasible) {
      res.status = IpmStatus::infeasible;
      res.message = "presolve: " + pre.message;
      return res;
    }
    ipm_detail::equilibrate(sf);
    const int n = sf.n, m = sf.m;
    if (n == 0) {
      res.status = IpmStatus::optimal;
      res.x = recover(mdl, {});
      res.objective = mdl.objective_value(res.x);
      return res;
    }

    hasL_.assign(n, 0);
    hasU_.assign(n, 0);
    nu_ = 0;
    for (int j = 0; j < n; ++j) {
      if (sf.cone[j]) continue;
      hasL_[j] = std::isfinite(sf.l[j]);
      hasU_[j] = std::isfinite(sf.u[j]);
      nu_ += hasL_[j] + hasU_[j];
    }
    nu_ += 3 * static_cast<int>(sf.cone_first.size());
    build_kkt_pattern();
    reg_.assign(n + m, 0.0);

    std::vector<double> x(n, 0.0), y(m, 0.0), zl(n, 0.0), zu(n, 0.0), s(n, 0.0);
    initial_point(x, y, zl, zu, s);

    const double bnorm = ipm_detail::inf_norm(sf.b), cnorm = ipm_detail::inf_norm(sf.c);
    std::vector<double> rp(m), rd(n), gl(n), gu(n);
    std::vector<double> dx(n), dy(m), dzl(n), dzu(n), ds(n);
    std::vector<double> ax(n), ay(m), azl(n), azu(n), as(n);
    std::vector<double> rl(n), ru(n), rs(n);
    int small_steps = 0, polish = 0;
    bool recenter = false;
    std::vector<double> rd0(n), rp0(m);
    std::vector<double> polished;  // last iterate that met the relative criteria
    std::vector<double> best;      // iterate with the smallest max(pres, dres, gap)
    double best_err = kInf, best_p = 0.0, best_d = 0.0, best_g = 0.0;
    // Degenerate free directions can pin dres near 1e-7 while mu keeps falling; the run then stalls.
    auto accept_best = [&](const char* why) {
      if (!best.empty() && best_err <= set_.stall_tol) {
        x = best;
        res.status = IpmStatus::optimal;
        res.primal_residual = best_p;
        res.dual_residual = best_d;
        res.gap = best_g;
        res.message = std::string(why) + "; best iterate accepted at relaxed tolerance";
        return true;
      }
      return false;
    };
    const bool has_cones = !sf.cone_first.empty();

    for (int it = 0;; ++it) {
      // Residuals and measures
      for (int i = 0; i < m; ++i) rp[i] = sf.b[i];
      for (int j = 0; j < n; ++j) {
        double xj = x[j], atyj = 0.0;
        for (int p = sf.Ap[j]; p < sf.Ap[j + 1]; ++p) {
          rp[sf.Ai[p]] -= sf.Ax[p] * xj;
          atyj += sf.Ax[p] * y[sf.Ai[p]];
        }
        rd[j] = sf.c[j] - atyj - zl[j] + zu[j] - s[j];
        gl[j] = hasL_[j] ? x[j] - sf.l[j] : 0.0;
        gu[j] = hasU_[j] ? sf.u[j] - x[j] : 0.0;
      }
      double comp = 0.0, pobj = 0.0, dobj = 0.0;
      for (int j = 0; j < n; ++j) {
        comp += gl[j] * zl[j] + gu[j] * zu[j] + (sf.cone[j] ? x[j] * s[j] : 0.0);
        pobj += sf.c[j] * x[j];
        if (hasL_[j]) dobj += sf.l[j] * zl[j];
        if (hasU_[j]) dobj -= sf.u[j] * zu[j];
      }
      for (int i = 0; i < m; ++i) dobj += sf.b[i] * y[i];
      const double mu = nu_ > 0 ? comp / nu_ : 0.0;
      const double pres = ipm_detail::inf_norm(rp) / (1.0 + bnorm);
      const double dres = ipm_detail::inf_norm(rd) / (1.0 + cnorm);
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
      res.iterations = it;
      res.primal_residual = pres;
      res.dual_residual = dres;
      res.gap = gap;
      if (set_.verbose)
        std::fprintf(stderr, "ipm %3d pobj %+.10e dobj %+.10e pres %.2e dres %.2e gap %.2e mu %.2e\n", it,
                     pobj * sf.cscale * sf.bscale, dobj * sf.cscale * sf.bscale, pres, dres, gap, mu);
      if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu)) {
        if (!polished.empty()) {
          x = polished;
          res.status = IpmStatus::optimal;
        } else if (!accept_best("non-finite iterate")) {
          res.status = IpmStatus::numerical;
          res.message = "non-finite iterate";
        }
        break;
      }
      if (std::max({pres, dres, gap}) < best_err) {
        best_err = std::max({pres, dres, gap});
        best = x;
        best_p = pres, best_d = dres, best_g = gap;
      }
      if (pres <= set_.feas_tol && dres <= set_.feas_tol && gap <= set_.opt_tol) {
        double pabs = 0.0;
        for (int i = 0; i < m; ++i) pabs = std::max(pabs, std::abs(rp[i]) * sf.bscale / sf.rowscale[i]);
        if (set_.verbose) std::fprintf(stderr, "ipm     user-unit row residual %.2e\n", pabs);
        if (pabs <= set_.abs_feas_tol || ++polish > 8 || mu < 1e-18) {
          res.status = IpmStatus::optimal;
          break;
        }
        polished = x;
      }
      // Ray detection: diverging duals certify primal infeasibility; diverging primal, unboundedness.
      if (it >= 5) {
        double yz = 0.0;
        for (int i = 0; i < m; ++i) yz = std::max(yz, std::abs(y[i]));
        double ray_d = dobj;
        std::vector<double> atr(n);
        double cres = 0.0;
        for (int j = 0; j < n; ++j) cres = std::max(cres, std::abs(sf.c[j] - rd[j]));
        if (pres > set_.feas_tol && ray_d > 0 && yz > 1e8 && cres / ray_d < 1e-8) {
          res.status = IpmStatus::infeasible;
          res.message = "dual ray";
          break;
        }
        double xn = ipm_detail::inf_norm(x);
        if (dres > set_.feas_tol && pobj < 0 && xn > 1e8) {
          double axn = 0.0;
          for (int i = 0; i < m; ++i) axn = std::max(axn, std::abs(sf.b[i] - rp[i]));
          if (axn / -pobj < 1e-8) {
            res.status = IpmStatus::unbounded;
            res.message = "primal ray";
            break;
          }
        }
      }
      if (it >= set_.max_iter) {
        res.status = IpmStatus::limit;
        res.message = "iteration limit";
        break;
      }
      double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
      if (elapsed > set_.time_limit) {
        res.status = IpmStatus::limit;
        res.message = "time limit";
        break;
      }

      // Newton matrix. reg_ holds the diagonal shifts, which refinement removes again.
      // Free LP columns get a larger proximal term; cones stall with it.
      const double reg_p = 1e-10, reg_d = 1e-10, reg_free = has_cones ? reg_p : 1e-6;
      for (int j = 0; j < n; ++j)
        if (!sf.cone[j]) {
          double theta = 0.0;
          if (hasL_[j]) theta += zl[j] / gl[j];
          if (hasU_[j]) theta += zu[j] / gu[j];
          reg_[j] = hasL_[j] || hasU_[j] ? reg_p : reg_free;
          Kx_[diag_[j]] = -(theta + reg_[j]);
          reg_[j] = -reg_[j];
        }
      for (size_t k = 0; k < sf.cone_first.size(); ++k) {
        int f = sf.cone_first[k];
        auto H = expcone::hessian({x[f], x[f + 1], x[f + 2]});
        for (int a = 0; a < 3; ++a)
          for (int b = a; b < 3; ++b) {
            int pos = cone_pos_[k][a][b];
            Kx_[pos] = -mu * H[a][b] - (a == b ? reg_p : 0.0);
          }
        for (int a = 0; a < 3; ++a) reg_[f + a] = -reg_p;
      }
      for (int i = 0; i < m; ++i) {
        Kx_[diag_[n + i]] = reg_d;
        reg_[n + i] = reg_d;
      }
      ldl_.factor(Kx_, sign_, 1e-14, 1e-8);

      // Predictor
      for (int j = 0; j < n; ++j) {
        rl[j] = hasL_[j] ? -gl[j] * zl[j] : 0.0;
        ru[j] = hasU_[j] ? -gu[j] * zu[j] : 0.0;
        rs[j] = sf.cone[j] ? -s[j] : 0.0;
      }
      newton(x, mu, rd, rp, gl, gu, zl, zu, rl, ru, rs, ax, ay, azl, azu, as);
      double ap_aff = max_step_primal(x, gl, gu, ax);
      double ad_aff = max_step_dual(zl, zu, s, azl, azu, as);
      if (has_cones) ap_aff = ad_aff = std::min(ap_aff, ad_aff);
      double comp_aff = 0.0;
      for (int j = 0; j < n; ++j) {
        if (hasL_[j]) comp_aff += (gl[j] + ap_aff * ax[j]) * (zl[j] + ad_aff * azl[j]);
        if (hasU_[j]) comp_aff += (gu[j] - ap_aff * ax[j]) * (zu[j] + ad_aff * azu[j]);
        if (sf.cone[j]) comp_aff += (x[j] + ap_aff * ax[j]) * (s[j] + ad_aff * as[j]);
      }
      double mu_aff = nu_ > 0 ? comp_aff / nu_ : 0.0;
      double sigma = mu > 0 ? std::pow(std::max(0.0, mu_aff) / mu, 3) : 0.0;
      sigma = std::clamp(sigma, 0.0, 1.0);
      if (has_cones) sigma = std::max(sigma, 0.1);
      if (recenter) sigma = 1.0;  // previous step was cut short by the cone neighbourhood

      // Corrector
      const double target = sigma * mu;
      for (int j = 0; j < n; ++j) {
        const double soc = recenter ? 0.0 : 1.0;
        rl[j] = hasL_[j] ? target - gl[j] * zl[j] - soc * ax[j] * azl[j] : 0.0;
        ru[j] = hasU_[j] ? target - gu[j] * zu[j] + soc * ax[j] * azu[j] : 0.0;
        rs[j] = 0.0;
      }
      for (int f : sf.cone_first) {
        auto g = expcone::gradient({x[f], x[f + 1], x[f + 2]});
        for (int t = 0; t < 3; ++t) rs[f + t] = -s[f + t] - target * g[t];
      }
      if (recenter) {
        // hold the residuals and only restore centrality
        std::fill(rd0.begin(), rd0.end(), 0.0);
        std::fill(rp0.begin(), rp0.end(), 0.0);
        newton(x, mu, rd0, rp0, gl, gu, zl, zu, rl, ru, rs, dx, dy, dzl, dzu, ds);
      } else {
        newton(x, mu, rd, rp, gl, gu, zl, zu, rl, ru, rs, dx, dy, dzl, dzu, ds);
      }
      double ap = max_step_primal(x, gl, gu, dx);
      double ad = max_step_dual(zl, zu, s, dzl, dzu, ds);
      const double eta = std::max(0.9, 1.0 - 10.0 * mu);
      ap = std::min(1.0, eta * ap);
      ad = std::min(1.0, eta * ad);
      if (has_cones) {
        double a = std::min(ap, ad);
        double full = a;
        a = cone_backtrack(x, s, zl, zu, gl, gu, dx, ds, dzl, dzu, a);
        recenter = a < 0.5 * full;
        if (set_.verbose) std::fprintf(stderr, "    step %.3e of %.3e%s\n", a, full, recenter ? " (recentering next)" : "");
        ap = ad = a;
      }
      if (std::max(ap, ad) < 1e-10) {
        if (++small_steps > 5) {
          if (accept_best("step length collapsed")) break;
          res.status = IpmStatus::numerical;
          res.message = "step length collapsed";
          break;
        }
      } else {
        small_steps = 0;
      }
      for (int j = 0; j < n; ++j) {
        x[j] += ap * dx[j];
        zl[j] += ad * dzl[j];
        zu[j] += ad * dzu[j];
        s[j] += ad * ds[j];
      }
      for (int i = 0; i < m; ++i) y[i] += ad * dy[i];
    }
    res.x = recover(mdl, x);
    res.objective = mdl.objective_value(res.x);
    return res;
  }

 private:
  void build_kkt_pattern() {
    const auto& sf = sf_;
    const int n = sf.n, m = sf.m, N = n + m;
    // Row-wise view of A to emit columns n+i of the upper triangle.
    std::vector<int> rcount(m + 1, 0);
    for (int p = 0; p < sf.Ap[n]; ++p) rcount[sf.Ai[p] + 1]++;
    for (int i = 0; i < m; ++i) rcount[i + 1] += rcount[i];
    std::vector<int> rj(sf.Ap[n]), rp_src(sf.Ap[n]);
    std::vector<int> next(rcount.begin(), rcount.end() - 1);
    for (int j = 0; j < n; ++j)
      for (int p = sf.Ap[j]; p < sf.Ap[j + 1]; ++p) {
        int q = next[sf.Ai[p]]++;
        rj[q] = j;
        rp_src[q] = p;
      }
    std::vector<int> Kp(N + 1, 0), Ki;
    Ki.reserve(n + 3 * sf.cone_first.size() + sf.Ap[n] + m);
    diag_.assign(N, -1);
    cone_pos_.assign(sf.cone_first.size(), {});
    std::vector<int> cone_of(n, -1);
    for (size_t k = 0; k < sf.cone_first.size(); ++k)
      for (int t = 0; t < 3; ++t) cone_of[sf.cone_first[k] + t] = static_cast<int>(k);
    Kx_.clear();
    for (int j = 0; j < n; ++j) {
      if (cone_of[j] >= 0) {
        int k = cone_of[j], f = sf.cone_first[k], b = j - f;
        for (int a = 0; a < b; ++a) {
          cone_pos_[k][a][b] = static_cast<int>(Ki.size());
          Ki.push_back(f + a);
          Kx_.push_back(0.0);
        }
        cone_pos_[k][b][b] = static_cast<int>(Ki.size());
      }
      diag_[j] = static_cast<int>(Ki.size());
      Ki.push_back(j);
      Kx_.push_back(0.0);
      Kp[j + 1] = static_cast<int>(Ki.size());
    }
    for (int i = 0; i < m; ++i) {
      for (int q = rcount[i]; q < rcount[i + 1]; ++q) {
        Ki.push_back(rj[q]);
        Kx_.push_back(sf.Ax[rp_src[q]]);
      }
      diag_[n + i] = static_cast<int>(Ki.size());
      Ki.push_back(n + i);
      Kx_.push_back(0.0);
      Kp[n + i + 1] = static_cast<int>(Ki.size());
    }
    Kp_ = Kp;
    Ki_ = Ki;
    sign_.assign(N, 1);
    for (int j = 0; j < n; ++j) sign_[j] = -1;
    ldl_.analyze(N, Kp_, Ki_);
  }

  // y = K v using the stored upper triangle.
  void kkt_multiply(const std::vector<double>& v, std::vector<double>& out) const {
    const int N = static_cast<int>(Kp_.size()) - 1;
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < N; ++j)
      for (int p = Kp_[j]; p < Kp_[j + 1]; ++p) {
        int i = Ki_[p];
        out[i] += Kx_[p] * v[j];
        if (i != j) out[j] += Kx_[p] * v[i];
      }
    for (int j = 0; j < N; ++j) out[j] -= reg_[j] * v[j];
  }

  void kkt_solve(std::vector<double>& rhs) {
    const int N = static_cast<int>(rhs.size());
    std::vector<double> sol = rhs, r(N), kx(N);
    ldl_.solve(sol);
    double rn = ipm_detail::inf_norm(rhs);
    for (int k = 0; k < 10; ++k) {
      kkt_multiply(sol, kx);
      for (int i = 0; i < N; ++i) r[i] = rhs[i] - kx[i];
      if (ipm_detail::inf_norm(r) <= 1e-14 * (1.0 + rn)) break;
      ldl_.solve(r);
      for (int i = 0; i < N; ++i) sol[i] += r[i];
    }
    rhs.swap(sol);
  }

  void newton(const std::vector<double>& x, double mu, const std::vector<double>& rd, const std::vector<double>& rp,
              const std::vector<double>& gl, const std::vector<double>& gu, const std::vector<double>& zl,
              const std::vector<double>& zu, const std::vector<double>& rl, const std::vector<double>& ru,
              const std::vector<double>& rs, std::vector<double>& dx, std::vector<double>& dy,
              std::vector<double>& dzl, std::vector<double>& dzu, std::vector<double>& ds) {
    const auto& sf = sf_;
    const int n = sf.n, m = sf.m;
    std::vector<double> rhs(n + m);
    for (int j = 0; j < n; ++j) {
      double v = rd[j] - rs[j];
      if (hasL_[j]) v -= rl[j] / gl[j];
      if (hasU_[j]) v += ru[j] / gu[j];
      rhs[j] = v;
    }
    for (int i = 0; i < m; ++i) rhs[n + i] = rp[i];
    kkt_solve(rhs);
    for (int j = 0; j < n; ++j) dx[j] = rhs[j];
    for (int i = 0; i < m; ++i) dy[i] = rhs[n + i];
    for (int j = 0; j < n; ++j) {
      dzl[j] = hasL_[j] ? (rl[j] - zl[j] * dx[j]) / gl[j] : 0.0;
      dzu[j] = hasU_[j] ? (ru[j] + zu[j] * dx[j]) / gu[j] : 0.0;
      ds[j] = 0.0;
    }
    for (int f : sf.cone_first) {
      auto H = expcone::hessian({x[f], x[f + 1], x[f + 2]});
      for (int a = 0; a < 3; ++a) {
        double hv = 0.0;
        for (int b = 0; b < 3; ++b) hv += H[a][b] * dx[f + b];
        ds[f + a] = rs[f + a] - mu * hv;
      }
    }
  }

  double max_step_primal(const std::vector<double>& x, const std::vector<double>& gl, const std::vector<double>& gu,
                         const std::vector<double>& dx) const {
    double a = 1.0;
    for (int j = 0; j < sf_.n; ++j) {
      if (hasL_[j] && dx[j] < 0) a = std::min(a, -gl[j] / dx[j]);
      if (hasU_[j] && dx[j] > 0) a = std::min(a, gu[j] / dx[j]);
    }
    for (int f : sf_.cone_first) {
      double t = a;
      for (int k = 0; k < 60; ++k) {
        if (expcone::primal_interior({x[f] + t * dx[f], x[f + 1] + t * dx[f + 1], x[f + 2] + t * dx[f + 2]})) break;
        t *= 0.8;
        if (k == 59) t = 0.0;
      }
      a = std::min(a, t);
    }
    return a;
  }

  double max_step_dual(const std::vector<double>& zl, const std::vector<double>& zu, const std::vector<double>& s,
                       const std::vector<double>& dzl, const std::vector<double>& dzu,
                       const std::vector<double>& ds) const {
    double a = 1.0;
    for (int j = 0; j < sf_.n; ++j) {
      if (hasL_[j] && dzl[j] < 0) a = std::min(a, -zl[j] / dzl[j]);
      if (hasU_[j] && dzu[j] < 0) a = std::min(a, -zu[j] / dzu[j]);
    }
    for (int f : sf_.cone_first) {
      double t = a;
      for (int k = 0; k < 60; ++k) {
        if (expcone::dual_interior({s[f] + t * ds[f], s[f + 1] + t * ds[f + 1], s[f + 2] + t * ds[f + 2]})) break;
        t *= 0.8;
        if (k == 59) t = 0.0;
      }
      a = std::min(a, t);
    }
    return a;
  }

  // Shrink a common step until every cone block stays near the central path.
  double cone_backtrack(const std::vector<double>& x, const std::vector<double>& s, const std::vector<double>& zl,
                        const std::vector<double>& zu, const std::vector<double>& gl, const std::vector<double>& gu,
                        const std::vector<double>& dx, const std::vector<double>& ds,
                        const std::vector<double>& dzl, const std::vector<double>& dzu, double a) const {
    const auto& sf = sf_;
    for (int k = 0; k < 30; ++k) {
      double comp = 0.0;
      for (int j = 0; j < sf.n; ++j) {
        if (hasL_[j]) comp += (gl[j] + a * dx[j]) * (zl[j] + a * dzl[j]);
        if (hasU_[j]) comp += (gu[j] - a * dx[j]) * (zu[j] + a * dzu[j]);
        if (sf.cone[j]) comp += (x[j] + a * dx[j]) * (s[j] + a * ds[j]);
      }
      double mu = comp / nu_;
      bool ok = mu > 0;
      for (int f : sf.cone_first) {
        if (!ok) break;
        expcone::Vec3 xn{x[f] + a * dx[f], x[f + 1] + a * dx[f + 1], x[f + 2] + a * dx[f + 2]};
        expcone::Vec3 sn{s[f] + a * ds[f], s[f + 1] + a * ds[f + 1], s[f + 2] + a * ds[f + 2]};
        if (!expcone::primal_interior(xn) || !expcone::dual_interior(sn)) {
          ok = false;
          break;
        }
        double xs = xn[0] * sn[0] + xn[1] * sn[1] + xn[2] * sn[2];
        if (xs < 0.01 * 3.0 * mu || expcone::proximity(xn, sn, mu) > kProx) ok = false;
      }
      if (ok) return a;
      a *= 0.7;
    }
    return a;
  }

  void initial_point(std::vector<double>& x, std::vector<double>& y, std::vector<double>& zl,
                     std::vector<double>& zu, std::vector<double>& s) {
    const auto& sf = sf_;
    const int n = sf.n, m = sf.m;
    for (int j = 0; j < n; ++j) Kx_[diag_[j]] = -1.0;
    for (size_t k = 0; k < sf.cone_first.size(); ++k)
      for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) Kx_[cone_pos_[k][a][b]] = a == b ? -1.0 : 0.0;
    for (int i = 0; i < m; ++i) Kx_[diag_[n + i]] = 1e-8;
    ldl_.factor(Kx_, sign_, 1e-14, 1e-8);
    std::vector<double> rhs(n + m, 0.0);
    for (int i = 0; i < m; ++i) rhs[n + i] = sf.b[i];
    kkt_solve(rhs);
    for (int j = 0; j < n; ++j) {
      double v = rhs[j];
      const double l = sf.l[j], u = sf.u[j];
      if (hasL_[j] && hasU_[j]) {
        double w = u - l;
        v = w >= 2.0 ? std::clamp(v, l + 1.0, u - 1.0) : l + 0.5 * w;
      } else if (hasL_[j]) {
        v = std::max(v, l + 1.0);
      } else if (hasU_[j]) {
        v = std::min(v, u - 1.0);
      }
      x[j] = v;
      zl[j] = hasL_[j] ? 1.0 : 0.0;
      zu[j] = hasU_[j] ? 1.0 : 0.0;
      s[j] = 0.0;
    }
    // cones start on the central path of the LP part's average complementarity
    double comp = 0.0;
    int cnt = 0;
    for (int j = 0; j < n; ++j) {
      if (hasL_[j]) comp += (x[j] - sf.l[j]) * zl[j], ++cnt;
      if (hasU_[j]) comp += (sf.u[j] - x[j]) * zu[j], ++cnt;
    }
    const double t0 = cnt > 0 ? std::sqrt(comp / cnt) : 1.0;
    for (int f : sf.cone_first)
      for (int t = 0; t < 3; ++t) {
        x[f + t] = t0 * expcone::kCentral[t];
        s[f + t] = t0 * expcone::kCentral[t];
      }
    std::fill(y.begin(), y.end(), 0.0);
  }

  std::vector<double> recover(const ModelInstance& mdl, const std::vector<double>& xi) const {
    const auto& sf = sf_;
    std::vector<double> x(mdl.num_vars());
    for (int j = 0; j < mdl.num_vars(); ++j) {
      int k = sf.user_col[j];
      x[j] = k < 0 ? sf.user_fixed[j] : xi[k] * sf.colscale[k] * sf.bscale;
      x[j] = std::clamp(x[j], mdl.lb[j], mdl.ub[j]);
    }
    return x;
  }

  IpmSettings set_;
  ipm_detail::StandardForm sf_;
  std::vector<char> hasL_, hasU_;
  int nu_ = 0;
  std::vector<int> Kp_, Ki_, diag_;
  std::vector<double> Kx_, reg_;
  std::vector<std::array<std::array<int, 3>, 3>> cone_pos_;
  std::vector<int8_t> sign_;
  QuasiDefiniteLdl ldl_;
};

}  // namespace helios::solver
