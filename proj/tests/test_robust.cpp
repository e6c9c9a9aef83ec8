#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "helios/robust/counterparts.hpp"
#include "helios/saa/solution.hpp"

using namespace helios;
using namespace helios::robust;

namespace {

UncertaintySetSpec flat_set(int H, double U, double S, double C) {
  UncertaintySetSpec s;
  s.scenarios = 1;
  s.hours = H;
  s.u_max.assign(H, U);
  s.u_sv.assign(H, S);
  s.u_clt = {C};
  return s;
}

SolarBlock block(int N, int H, int Y, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uv(0.0, 0.9), uz(0.0, 100.0);
  SolarBlock b;
  b.sites = N;
  b.hours = H;
  b.years = Y;
  b.vbar.resize(static_cast<size_t>(N) * H * Y);
  for (double& v : b.vbar) v = uv(rng) < 0.2 ? 0.0 : uv(rng);
  b.zbar.resize(static_cast<size_t>(N) * Y);
  for (double& z : b.zbar) z = uz(rng);
  return b;
}

double nominal_credit(const SolarBlock& b) { return b.credit(b.vbar); }

}  // namespace

TEST(UncertaintySet, ZeroBudgetIsNominal) {
  std::mt19937_64 rng(1);
  auto b = block(2, 6, 2, rng);
  auto s = zero_uncertainty_set(1, 6);
  EXPECT_NEAR(dual_bound(s, 0, b, Side::demand), nominal_credit(b), 1e-6);
  EXPECT_NEAR(dual_bound(s, 0, b, Side::sell, 0.2), 0.2 * nominal_credit(b), 1e-6);
}

TEST(UncertaintySet, NoCapacityNoCredit) {
  std::mt19937_64 rng(2);
  auto b = block(2, 6, 1, rng);
  std::fill(b.zbar.begin(), b.zbar.end(), 0.0);
  auto s = flat_set(6, 0.2, 0.1, 0.5);
  EXPECT_NEAR(dual_bound(s, 0, b, Side::demand), 0.0, 1e-7);
  EXPECT_NEAR(dual_bound(s, 0, b, Side::sell), 0.0, 1e-7);
}

TEST(UncertaintySet, GridEnumerationMatchesDual) {
  // one site, one year, three hours
  SolarBlock b;
  b.sites = 1;
  b.hours = 3;
  b.years = 1;
  b.vbar = {0.05, 0.5, 0.3};
  b.zbar = {10.0};
  auto s = flat_set(3, 0.1, 0.05, 0.2);
  const double step = 1e-3;
  double lo = kInf;
  const int K = 200;
  for (int i = 0; i <= K; ++i)
    for (int j = 0; j <= K; ++j)
      for (int k = 0; k <= K; ++k) {
        double u[3] = {-0.1 + i * step, -0.1 + j * step, -0.1 + k * step};
        bool ok = true;
        for (int h = 0; h < 3 && ok; ++h) {
          if (b.vbar[h] + u[h] < -1e-12) ok = false;
          if (std::abs(u[h] - u[(h + 2) % 3]) > 0.05 + 1e-12) ok = false;
        }
        if (!ok || std::abs(u[0] + u[1] + u[2]) > 0.2 + 1e-12) continue;
        double c = 10.0 * (b.vbar[0] + u[0] + b.vbar[1] + u[1] + b.vbar[2] + u[2]);
        lo = std::min(lo, c);
      }
  EXPECT_NEAR(dual_bound(s, 0, b, Side::demand), lo, 2e-3 * 10.0);
  EXPECT_NEAR(dual_bound(s, 0, b, Side::sell, 0.2), 0.2 * lo, 2e-3 * 10.0);
  EXPECT_NEAR(inner_oracle(s, 0, b, Side::demand).value, lo, 2e-3 * 10.0);
}

TEST(UncertaintySet, StrongDualityOnRandomBlocks) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 0.3);
  for (int t = 0; t < 20; ++t) {
    auto b = block(2, 8, 2, rng);
    UncertaintySetSpec s;
    s.scenarios = 1;
    s.hours = 8;
    for (int h = 0; h < 8; ++h) {
      s.u_max.push_back(U(rng));
      s.u_sv.push_back(0.5 * U(rng));
    }
    s.u_clt = {4.0 * U(rng)};
    for (Side side : {Side::demand, Side::sell}) {
      double primal = inner_oracle(s, 0, b, side).value;
      double dual = dual_bound(s, 0, b, side);
      EXPECT_NEAR(primal, dual, 1e-6 * std::max(1.0, std::abs(primal))) << "trial " << t;
    }
  }
}

TEST(UncertaintySet, WorstCaseFactorsAreFeasible) {
  std::mt19937_64 rng(5);
  auto b = block(1, 12, 1, rng);
  auto s = flat_set(12, 0.2, 0.08, 0.6);
  for (Side side : {Side::demand, Side::sell}) {
    auto r = inner_oracle(s, 0, b, side);
    double sum = 0.0;
    for (int h = 0; h < 12; ++h) {
      double u = r.v[h] - b.vbar[h];
      EXPECT_GE(r.v[h], 0.0);
      EXPECT_LE(std::abs(u), 0.2 + 1e-7);
      EXPECT_LE(std::abs(u - (r.v[(h + 11) % 12] - b.vbar[(h + 11) % 12])), 0.08 + 1e-7);
      sum += u;
    }
    EXPECT_LE(std::abs(sum), 0.6 + 1e-7);
  }
  EXPECT_LE(inner_oracle(s, 0, b, Side::demand).value, nominal_credit(b) + 1e-7);
  EXPECT_LE(inner_oracle(s, 0, b, Side::sell).value, 0.2 * nominal_credit(b) + 1e-7);
}

TEST(UncertaintySet, NegativeBudgetRejected) {
  UncertaintyStatistics st;
  st.scenarios = 1;
  st.hours = 24;
  st.u_max.assign(24, 0.1);
  st.u_sv.assign(24, 0.1);
  st.sigma = {0.1};
  UncertaintyBudget g;
  g.gamma_max = -1.0;
  try {
    build_uncertainty_set(st, g, 1, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation);
  }
}

TEST(Robust, DualVariableCount) {
  auto inst = fixtures::toy_instance(2, 3, 2);
  inst.robustness = {1.0, 1.0, 1.0};
  auto rm = build_robust(inst);
  const auto& L = rm.saa.layout;
  EXPECT_EQ(rm.robust.num_vars, 2 * L.D * (5 * L.N * L.H * L.M * L.Y + 1));
  EXPECT_EQ(rm.saa.model.find_rows("ro_demand")->count, L.D * L.M);
  EXPECT_EQ(rm.saa.model.find_rows("ro_sell")->count, L.D * L.M);
}

TEST(Robust, ZeroBudgetMatchesNominal) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  inst.robustness = {0.0, 0.0, 0.0};
  double saa = solve_optimal(build_saa(inst).model).objective;
  double ro = solve_optimal(build_robust(inst).saa.model).objective;
  EXPECT_NEAR(ro, saa, 1e-6 * std::abs(saa));
}

TEST(Robust, ObjectiveMonotoneInBudget) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  double saa = solve_optimal(build_saa(inst).model).objective;
  double prev = saa;
  for (double g : {0.5, 1.0, 2.0, 4.0}) {
    inst.robustness = {g, g, g};
    double obj = solve_optimal(build_robust(inst).saa.model).objective;
    EXPECT_GE(obj, prev - 1e-7 * std::abs(prev)) << "gamma " << g;
    prev = obj;
  }
  EXPECT_GT(prev, saa * (1.0 + 1e-6));
}

TEST(Robust, RowsHoldUnderWorstCase) {
  auto inst = fixtures::toy_instance(1, 2, 2);
  inst.robustness = {1.0, 1.0, 1.0};
  auto rm = build_robust(inst);
  const auto& L = rm.saa.layout;
  auto res = solve_optimal(rm.saa.model);
  auto sol = extract_solution(inst, rm.saa, res);
  for (int d = 0; d < L.D; ++d) {
    auto blk = solar_block(inst, L, sol.plan, d);
    double worst_low = inner_oracle(rm.robust.spec, d, blk, Side::demand).value;
    double worst_sell = inner_oracle(rm.robust.spec, d, blk, Side::sell, inst.costs.sell_fraction).value;
    for (int m = 0; m < L.M; ++m) {
      // replace the dual objective by the explicit worst case: the aggregated rows must still hold
      int rd = rm.robust.demand_row + d * L.M + m, rs = rm.robust.sell_row + d * L.M + m;
      double act_d = 0.0, act_s = 0.0;
      const auto& mdl = rm.saa.model;
      for (int k = mdl.row_ptr[rd]; k < mdl.row_ptr[rd + 1]; ++k)
        if (mdl.cols[k] < rm.robust.first_var) act_d += mdl.vals[k] * res.x[mdl.cols[k]];
      for (int k = mdl.row_ptr[rs]; k < mdl.row_ptr[rs + 1]; ++k)
        if (mdl.cols[k] < rm.robust.first_var) act_s += mdl.vals[k] * res.x[mdl.cols[k]];
      EXPECT_GE(act_d + worst_low, mdl.rhs[rd] - 1e-5 * std::abs(mdl.rhs[rd]));
      EXPECT_LE(act_s - worst_sell, mdl.rhs[rs] + 1e-5 * std::max(1.0, worst_sell));
    }
  }
}

TEST(Robust, LiteralModeDropsNominalRows) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  inst.robustness = {1.0, 1.0, 1.0};
  inst.options.paper_literal_ro = true;
  auto rm = build_robust(inst);
  EXPECT_EQ(rm.saa.model.find_rows("balance"), nullptr);
  EXPECT_EQ(rm.saa.model.find_rows("sell_cap"), nullptr);
  auto res = solve(rm.saa.model);
  EXPECT_EQ(res.status, SolveStatus::optimal);
}

TEST(Robust, MissingStatisticsRejected) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  inst.statistics.reset();
  inst.robustness = {1.0, 0.0, 0.0};
  try {
    build_robust(inst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::budget_not_derived);
  }
  inst.robustness = {0.0, 0.0, 0.0};
  EXPECT_NO_THROW(build_robust(inst));
}
