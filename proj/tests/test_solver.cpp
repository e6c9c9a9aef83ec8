#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "helios/solver/exp_cone.hpp"
#include "helios/solver/solve.hpp"

using namespace helios;

namespace {

ModelInstance single_var(double lo, double hi) {
  ModelInstance m;
  int x = m.add_variable("x", -kInf, kInf, 1.0);
  m.add_row({x}, {1.0}, Sense::ge, lo);
  if (std::isfinite(hi)) m.add_row({x}, {1.0}, Sense::le, hi);
  return m;
}

// Feasible, bounded LP with mixed senses and bound types.
ModelInstance random_lp(std::mt19937& rng, int n, int rows) {
  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 5.0);
  ModelInstance m;
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    double lo = j % 4 == 3 ? -kInf : 0.0;
    double hi = j % 3 == 0 ? 10.0 : kInf;
    m.add_variable("x" + std::to_string(j), lo, hi, U(rng));
    x0[j] = j % 3 == 0 ? 5.0 * (P(rng) / 5.0) : P(rng);
  }
  for (int i = 0; i < rows; ++i) {
    LinExpr e;
    double act = 0.0;
    for (int j = 0; j < n; ++j)
      if (U(rng) > 0.3) {
        double a = U(rng);
        e.add(j, a);
        act += a * x0[j];
      }
    if (e.empty()) continue;
    int kind = i % 3;
    if (kind == 0) m.add_row(e, Sense::eq, act);
    if (kind == 1) m.add_row(e, Sense::le, act + P(rng));
    if (kind == 2) m.add_row(e, Sense::ge, act - P(rng));
  }
  // Box every variable through a row so the LP stays bounded.
  for (int j = 0; j < n; ++j) m.add_row({j}, {1.0}, Sense::ge, -20.0);
  LinExpr tot;
  for (int j = 0; j < n; ++j) tot.add(j, 1.0);
  m.add_row(tot, Sense::le, 100.0);
  return m;
}

}  // namespace

TEST(Solver, LowerBoundRow) {
  auto out = solve(single_var(3.0, kInf));
  ASSERT_EQ(out.status, SolveStatus::optimal);
  EXPECT_NEAR(out.x[0], 3.0, 1e-8);
  EXPECT_NEAR(out.objective, 3.0, 1e-8);
}

TEST(Solver, ConflictingRowsAreInfeasible) {
  EXPECT_EQ(solve(single_var(3.0, 2.0)).status, SolveStatus::infeasible);
  SolveOptions o;
  o.backend = "dense-simplex";
  EXPECT_EQ(solve(single_var(3.0, 2.0), o).status, SolveStatus::infeasible);
}

TEST(Solver, InfeasibleWithoutPresolveShortcut) {
  ModelInstance m;
  int x = m.add_variable("x", 0, kInf, 1.0);
  int y = m.add_variable("y", 0, kInf, 1.0);
  m.add_row({x, y}, {1, 1}, Sense::ge, 3.0);
  m.add_row({x, y}, {1, 1}, Sense::le, 2.0);
  EXPECT_EQ(solve(m).status, SolveStatus::infeasible);
}

TEST(Solver, Unbounded) {
  ModelInstance m;
  int x = m.add_variable("x", 0, kInf, -1.0);
  int y = m.add_variable("y", 0, kInf, -1.0);
  m.add_row({x, y}, {1, -1}, Sense::eq, 0.0);
  EXPECT_EQ(solve(m).status, SolveStatus::unbounded);
  SolveOptions o;
  o.backend = "dense-simplex";
  EXPECT_EQ(solve(m, o).status, SolveStatus::unbounded);
}

TEST(Solver, RandomLpsAgreeWithDenseSimplex) {
  std::mt19937 rng(7);
  SolveOptions dense;
  dense.backend = "dense-simplex";
  for (int k = 0; k < 40; ++k) {
    auto m = random_lp(rng, 4 + k % 9, 3 + k % 7);
    auto a = solve(m);
    auto b = solve(m, dense);
    ASSERT_EQ(b.status, SolveStatus::optimal) << k;
    ASSERT_EQ(a.status, SolveStatus::optimal) << k;
    EXPECT_NEAR(a.objective, b.objective, 1e-6 * (1.0 + std::abs(b.objective))) << k;
    EXPECT_LT(m.max_violation(a.x), 1e-6) << k;
  }
}

TEST(Solver, ExponentialConeEpigraph) {
  // min t  s.t. (1, 1, t) in K_exp  ->  t = e
  ModelInstance m;
  int x = m.add_variable("x", 1.0, 1.0);
  int y = m.add_variable("y", 1.0, 1.0);
  int t = m.add_variable("t", -kInf, kInf, 1.0);
  m.add_cone(ConeKind::exponential, {x, y, t});
  auto out = solve(m);
  ASSERT_EQ(out.status, SolveStatus::optimal);
  EXPECT_NEAR(out.objective, std::exp(1.0), 1e-7);
}

TEST(Solver, LogBarrierByCone) {
  // max log(q) s.t. q <= 2 written as min -s with (s, 1, q) in K_exp  ->  s = log 2
  ModelInstance m;
  int s = m.add_variable("s", -kInf, kInf, -1.0);
  int one = m.add_variable("one", 1.0, 1.0);
  int q = m.add_variable("q", 0.0, 2.0);
  m.add_cone(ConeKind::exponential, {s, one, q});
  auto out = solve(m);
  ASSERT_EQ(out.status, SolveStatus::optimal);
  EXPECT_NEAR(out.x[s], std::log(2.0), 1e-7);
}

TEST(Solver, DualExponentialCone) {
  // (-1, 0, w) in K*_exp  <=>  w >= 1/e
  ModelInstance m;
  int u = m.add_variable("u", 1.0, 1.0);
  int v = m.add_variable("v", 0.0, 0.0);
  int w = m.add_variable("w", -kInf, kInf, 1.0);
  m.add_cone(ConeKind::dual_exponential, {u, v, w}, {-1.0, 1.0, 1.0});
  auto out = solve(m);
  ASSERT_EQ(out.status, SolveStatus::optimal);
  EXPECT_NEAR(out.objective, std::exp(-1.0), 1e-7);
}

TEST(Solver, UnknownBackend) {
  SolveOptions o;
  o.backend = "cplex";
  try {
    solve(single_var(1.0, kInf), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::backend_unavailable);
  }
}

TEST(Solver, EnvironmentSelectsBackend) {
  setenv("HELIOS_SOLVER", "dense-simplex", 1);
  auto out = solve(single_var(3.0, kInf));
  unsetenv("HELIOS_SOLVER");
  EXPECT_EQ(out.solver, "helios-dense-simplex");
  EXPECT_NEAR(out.objective, 3.0, 1e-12);
}

TEST(Solver, DeterministicRepeat) {
  std::mt19937 rng(3);
  auto m = random_lp(rng, 10, 8);
  auto a = solve(m), b = solve(m);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.x, b.x);
}

TEST(ExpCone, CentralPointIsSelfDual) {
  auto g = solver::expcone::gradient(solver::expcone::kCentral);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(-g[i], solver::expcone::kCentral[i], 1e-9);
}
