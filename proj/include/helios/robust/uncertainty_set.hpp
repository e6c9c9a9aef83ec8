#pragma once

// Polyhedral solar uncertainty set around the scenario centroids and its LP duals.
//
//   |u(n,h,y)| <= U_MAX(h,d),  |u(n,h,y) - u(n,h-1,y)| <= U_SV(h,d) (cyclic),  |sum u| <= U_CLT(d),
//   v = vbar + u >= 0.
//
// Per (d, m) the solar credit sum_{n,h,y} zbar(n,y) v(n,h,y) is pessimized (minimized) on both sides:
// low production tightens the balance and shrinks the sales allowance beta * production.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "helios/core/error.hpp"
#include "helios/core/types.hpp"
#include "helios/model/model_instance.hpp"
#include "helios/solver/solve.hpp"

namespace helios::robust {

struct UncertaintySetSpec {
  int scenarios = 0;
  int hours = 24;
  std::vector<double> u_max;  // (d, h)
  std::vector<double> u_sv;   // (d, h)
  std::vector<double> u_clt;  // d

  double max_dev(int d, int h) const { return u_max[static_cast<size_t>(d) * hours + h]; }
  double smooth_dev(int d, int h) const { return u_sv[static_cast<size_t>(d) * hours + h]; }
  bool zero() const {
    for (const auto* v : {&u_max, &u_sv, &u_clt})
      for (double x : *v)
        if (x != 0.0) return false;
    return true;
  }
};

// U_CLT aggregates over sites x years x months x hours.
inline UncertaintySetSpec build_uncertainty_set(const UncertaintyStatistics& st, const UncertaintyBudget& g, int sites,
                                                int years, int months) {
  if (g.gamma_max < 0 || g.gamma_c < 0 || g.gamma_clt < 0 || !std::isfinite(g.gamma_max) ||
      !std::isfinite(g.gamma_c) || !std::isfinite(g.gamma_clt))
    fail(ErrorCode::validation, "uncertainty budgets must be finite and nonnegative");
  UncertaintySetSpec s;
  s.scenarios = st.scenarios;
  s.hours = st.hours;
  s.u_max.resize(st.u_max.size());
  s.u_sv.resize(st.u_sv.size());
  s.u_clt.resize(st.scenarios);
  for (size_t i = 0; i < st.u_max.size(); ++i) {
    s.u_max[i] = g.gamma_max * st.u_max[i];
    s.u_sv[i] = g.gamma_c * st.u_sv[i];
  }
  const double agg = std::sqrt(static_cast<double>(sites) * years * months * st.hours);
  for (int d = 0; d < st.scenarios; ++d) s.u_clt[d] = g.gamma_clt * agg * st.sigma[d];
  return s;
}

inline UncertaintySetSpec zero_uncertainty_set(int scenarios, int hours) {
  UncertaintySetSpec s;
  s.scenarios = scenarios;
  s.hours = hours;
  s.u_max.assign(static_cast<size_t>(scenarios) * hours, 0.0);
  s.u_sv.assign(s.u_max.size(), 0.0);
  s.u_clt.assign(scenarios, 0.0);
  return s;
}

enum class Side { demand, sell };

// Nominal factors and installed capacity of one (d, m) block.
struct SolarBlock {
  int sites = 0, hours = 0, years = 0;
  std::vector<double> vbar;  // (n, h, y)
  std::vector<double> zbar;  // (n, y)

  size_t at(int n, int h, int y) const { return (static_cast<size_t>(n) * hours + h) * years + y; }
  double credit(const std::vector<double>& v) const {
    double c = 0.0;
    for (int n = 0; n < sites; ++n)
      for (int h = 0; h < hours; ++h)
        for (int y = 0; y < years; ++y) c += zbar[static_cast<size_t>(n) * years + y] * v[at(n, h, y)];
    return c;
  }
};

struct OracleResult {
  double value = 0.0;
  std::vector<double> v;  // worst-case factors, (n, h, y)
};

// Explicit inner LP over u with the two-sided CLT row: min sum zbar v (times beta on the sell side).
inline OracleResult inner_oracle(const UncertaintySetSpec& spec, int d, const SolarBlock& blk, Side side,
                                 double beta = 0.2, const SolveOptions& opt = {}) {
  if (d < 0 || d >= spec.scenarios || blk.hours != spec.hours)
    fail(ErrorCode::dimension_mismatch, "uncertainty set does not match the solar block");
  for (double x : spec.u_max)
    if (!(x >= 0)) fail(ErrorCode::validation, "malformed uncertainty set: U_MAX must be >= 0");
  const int N = blk.sites, H = blk.hours, Y = blk.years;
  ModelInstance m;
  m.name = "inner_oracle";
  const int u = m.add_block("u", {N, H, Y}, 0.0, 0.0);
  const double sgn = side == Side::demand ? 1.0 : beta;
  for (int n = 0; n < N; ++n)
    for (int h = 0; h < H; ++h)
      for (int y = 0; y < Y; ++y) {
        int j = u + static_cast<int>(blk.at(n, h, y));
        double U = spec.max_dev(d, h), vb = blk.vbar[blk.at(n, h, y)];
        m.lb[j] = std::max(-U, -vb);  // v >= 0
        m.ub[j] = U;
        if (m.lb[j] > m.ub[j]) m.lb[j] = m.ub[j];  // vbar < -U cannot occur for valid data
        double z = blk.zbar[static_cast<size_t>(n) * Y + y];
        m.obj[j] = sgn * z;
      }
  m.begin_rows("smoothness", "|u(h) - u(h-1)| <= U_SV, cyclic");
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < Y; ++y)
      for (int h = 0; h < H; ++h) {
        int hp = (h + H - 1) % H;
        if (hp == h) continue;
        int a = u + static_cast<int>(blk.at(n, h, y)), b = u + static_cast<int>(blk.at(n, hp, y));
        if (spec.smooth_dev(d, h) == 0.0) {
          m.add_row({a, b}, {1.0, -1.0}, Sense::eq, 0.0);
          continue;
        }
        m.add_row({a, b}, {1.0, -1.0}, Sense::le, spec.smooth_dev(d, h));
        m.add_row({a, b}, {1.0, -1.0}, Sense::ge, -spec.smooth_dev(d, h));
      }
  m.begin_rows("clt", "|sum u| <= U_CLT");
  LinExpr all;
  for (int j = 0; j < N * H * Y; ++j) all.add(u + j, 1.0);
  if (!all.empty() && spec.u_clt[d] == 0.0) {
    m.add_row(all, Sense::eq, 0.0);
  } else if (!all.empty()) {
    m.add_row(all, Sense::le, spec.u_clt[d]);
    m.add_row(all, Sense::ge, -spec.u_clt[d]);
  }
  auto out = solve_optimal(m, opt);
  OracleResult r;
  r.v.resize(static_cast<size_t>(N) * H * Y);
  for (size_t k = 0; k < r.v.size(); ++k) r.v[k] = std::max(0.0, blk.vbar[k] + out.x[u + static_cast<int>(k)]);
  r.value = side == Side::demand ? blk.credit(r.v) : beta * blk.credit(r.v);
  return r;
}

// Dual variables of one (d, m) block: five (n, h, y) blocks plus the CLT multiplier.
struct DualVars {
  int lambda = 0, phi = 0, chi = 0, psi = 0, omega = 0;  // first index; stride given by `at`
  int tau = 0;
  int sites = 0, hours = 0, years = 0;
  int at(int first, int n, int h, int y) const { return first + (n * hours + h) * years + y; }
};

// Emits the dual feasibility rows of one block and returns the dual objective expression
//   max  sum vbar s - U(phi+chi) - S(psi+omega) - C tau
//   s <= c zbar,  -s + phi - chi + psi(h) - omega(h) - psi(h+1) + omega(h+1) + tau = 0
// with c = 1 (demand) or beta (sell). phi, chi, psi, omega, tau >= 0, s free.
// s is carried as lambda = c zbar - s >= 0 (the multiplier of v >= 0), which leaves no free column.
// Only the lower CLT side enters: the minimizer never gains from raising sum u.
// zbar_var(n, y) is a model column.
//
// Presolve: u is fixed at zero where U = 0, and the fixing spreads along cyclic edges with S = 0
// (u(h) = u(h-1) there). Rows of fixed entries are dropped and their lambda, phi, chi pinned at
// zero, as are psi, omega of edges between fixed hours. The value is unchanged; the pinned columns
// would otherwise be zero-cost rays that leave interior-point iterates drifting.
template <class ZbarVar>
LinExpr emit_dual_block(ModelInstance& m, const UncertaintySetSpec& spec, int d, const DualVars& dv,
                        const std::vector<double>& vbar, ZbarVar zbar_var, Side side, double beta) {
  const int N = dv.sites, H = dv.hours, Y = dv.years;
  const double zc = side == Side::demand ? 1.0 : beta;
  auto pin = [&](int j) { m.lb[j] = m.ub[j] = 0.0; };
  std::vector<char> fixed(H);
  for (int h = 0; h < H; ++h) fixed[h] = spec.max_dev(d, h) == 0.0;
  for (bool grew = H > 1; grew;) {
    grew = false;
    for (int h = 0; h < H; ++h) {
      int hp = (h + H - 1) % H;
      if (spec.smooth_dev(d, h) == 0.0 && fixed[h] != fixed[hp]) {
        fixed[h] = fixed[hp] = 1;
        grew = true;
      }
    }
  }
  auto vb = [&](int n, int h, int y) { return vbar[(static_cast<size_t>(n) * H + h) * Y + y]; };
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < Y; ++y)
      for (int h = 0; h < H; ++h) {
        int hp = (h + H - 1) % H;
        if (H == 1 || (fixed[h] && fixed[hp])) {
          pin(dv.at(dv.psi, n, h, y));
          pin(dv.at(dv.omega, n, h, y));
        }
        if (!fixed[h]) continue;
        pin(dv.at(dv.lambda, n, h, y));
        pin(dv.at(dv.phi, n, h, y));
        pin(dv.at(dv.chi, n, h, y));
      }
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < Y; ++y)
      for (int h = 0; h < H; ++h) {
        if (fixed[h]) continue;
        int hn = (h + 1) % H;
        LinExpr e;
        e.add(dv.at(dv.lambda, n, h, y), 1.0);
        e.add(zbar_var(n, y), -zc);
        e.add(dv.at(dv.phi, n, h, y), 1.0);
        e.add(dv.at(dv.chi, n, h, y), -1.0);
        if (hn != h) {
          e.add(dv.at(dv.psi, n, h, y), 1.0);
          e.add(dv.at(dv.omega, n, h, y), -1.0);
          e.add(dv.at(dv.psi, n, hn, y), -1.0);
          e.add(dv.at(dv.omega, n, hn, y), 1.0);
        }
        e.add(dv.tau, 1.0);
        m.add_row(e, Sense::eq, 0.0);
      }
  LinExpr obj;
  for (int n = 0; n < N; ++n)
    for (int y = 0; y < Y; ++y) {
      double vsum = 0.0;
      for (int h = 0; h < H; ++h) vsum += vb(n, h, y);
      if (vsum != 0.0) obj.add(zbar_var(n, y), zc * vsum);
      for (int h = 0; h < H; ++h) {
        obj.add(dv.at(dv.lambda, n, h, y), -vb(n, h, y));
        obj.add(dv.at(dv.phi, n, h, y), -spec.max_dev(d, h));
        obj.add(dv.at(dv.chi, n, h, y), -spec.max_dev(d, h));
        obj.add(dv.at(dv.psi, n, h, y), -spec.smooth_dev(d, h));
        obj.add(dv.at(dv.omega, n, h, y), -spec.smooth_dev(d, h));
      }
    }
  if (std::all_of(fixed.begin(), fixed.end(), [](char f) { return f != 0; })) pin(dv.tau);
  obj.add(dv.tau, -spec.u_clt[d]);
  return obj;
}

inline DualVars add_dual_vars(ModelInstance& m, const std::string& prefix, int N, int H, int Y) {
  DualVars dv;
  dv.sites = N;
  dv.hours = H;
  dv.years = Y;
  dv.lambda = m.add_block(prefix + "lambda", {N, H, Y}, 0.0, kInf);
  dv.phi = m.add_block(prefix + "phi", {N, H, Y}, 0.0, kInf);
  dv.chi = m.add_block(prefix + "chi", {N, H, Y}, 0.0, kInf);
  dv.psi = m.add_block(prefix + "psi", {N, H, Y}, 0.0, kInf);
  dv.omega = m.add_block(prefix + "omega", {N, H, Y}, 0.0, kInf);
  dv.tau = m.add_variable(prefix + "tau", 0.0, kInf);
  return dv;
}

// Optimal dual objective for fixed zbar: equals the inner oracle value by LP duality.
inline double dual_bound(const UncertaintySetSpec& spec, int d, const SolarBlock& blk, Side side, double beta = 0.2,
                         const SolveOptions& opt = {}) {
  const int N = blk.sites, H = blk.hours, Y = blk.years;
  ModelInstance m;
  m.name = "dual_bound";
  const int zb = m.add_block("zbar", {N, Y}, 0.0, 0.0);
  for (int k = 0; k < N * Y; ++k) m.lb[zb + k] = m.ub[zb + k] = blk.zbar[k];
  auto dv = add_dual_vars(m, "", N, H, Y);
  m.begin_rows("dual", side == Side::demand ? "demand-side dual block" : "sell-side dual block");
  LinExpr obj = emit_dual_block(m, spec, d, dv, blk.vbar, [&](int n, int y) { return zb + n * Y + y; }, side, beta);
  for (size_t k = 0; k < obj.idx.size(); ++k) m.obj[obj.idx[k]] -= obj.val[k];
  return -solve_optimal(m, opt).objective;
}

}  // namespace helios::robust
