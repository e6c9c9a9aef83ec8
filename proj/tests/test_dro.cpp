#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "helios/dro/kl.hpp"
#include "helios/robust/counterparts.hpp"

using namespace helios;
using namespace helios::dro;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Scalar dual min_{b > 0} b delta + b log sum P e^{c/b}, golden-section search on log b.
double scalar_dual(const std::vector<double>& c, const std::vector<double>& p, double delta) {
  double cmax = *std::max_element(c.begin(), c.end());
  auto f = [&](double lb) {
    double b = std::exp(lb), s = 0.0;
    for (size_t i = 0; i < c.size(); ++i) s += p[i] * std::exp((c[i] - cmax) / b);
    return b * delta + cmax + b * std::log(s);
  };
  double lo = -30.0, hi = 30.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int it = 0; it < 400; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = f(b);
    }
  }
  return f(0.5 * (lo + hi));
}

double saa_value(const ModelInstance& m) { return solve_optimal(m).objective; }

}  // namespace

TEST(WorstCase, ZeroRadiusIsReference) {
  auto w = worst_case_expectation({3.0, 1.0, 7.0}, {0.2, 0.5, 0.3}, 0.0);
  EXPECT_NEAR(w.value, 0.6 + 0.5 + 2.1, 1e-12);
  EXPECT_NEAR(w.q[1], 0.5, 1e-15);
}

TEST(WorstCase, EqualCostsAnyRadius) {
  for (double d : {0.0, 0.01, 1.0, 50.0}) EXPECT_NEAR(worst_case_expectation({4.0, 4.0}, {0.3, 0.7}, d).value, 4.0, 1e-12);
}

TEST(WorstCase, GridOracleOnTwoPoints) {
  const std::vector<double> p{0.8, 0.2}, c{0.0, 10.0};
  const double delta = 0.05;
  double best = -kInf;
  for (int i = 0; i <= 100000; ++i) {
    double q = i * 1e-5;
    std::vector<double> Q{1.0 - q, q};
    if (kl_divergence(Q, p) <= delta) best = std::max(best, 10.0 * q);
  }
  auto w = worst_case_expectation(c, p, delta);
  EXPECT_NEAR(w.value, best, 1e-4);
  EXPECT_LE(w.kl, delta + 1e-9);
}

TEST(WorstCase, TwoScenarioMatchesScalarDual) {
  auto w = worst_case_expectation({1.0, 2.0}, {0.5, 0.5}, 0.1);
  EXPECT_NEAR(w.value, scalar_dual({1.0, 2.0}, {0.5, 0.5}, 0.1), 1e-8);
}

TEST(WorstCase, RandomInstancesStayInBall) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    int n = 2 + t % 6;
    std::vector<double> c(n), p(n);
    for (int i = 0; i < n; ++i) {
      c[i] = 1e6 * U(rng);
      p[i] = 0.05 + U(rng);
    }
    double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= s;
    double delta = std::pow(10.0, -3.0 + 3.0 * U(rng));
    auto w = worst_case_expectation(c, p, delta);
    EXPECT_LE(w.kl, delta + 1e-9);
    EXPECT_NEAR(std::accumulate(w.q.begin(), w.q.end(), 0.0), 1.0, 1e-12);
    EXPECT_LT(rel(w.value, scalar_dual(c, p, delta)), 1e-8) << "trial " << t;
  }
}

TEST(WorstCase, LargeRadiusConcentratesOnMaximum) {
  auto w = worst_case_expectation({1.0, 5.0, 3.0}, {0.5, 0.25, 0.25}, -std::log(0.25) + 1e-3);
  EXPECT_DOUBLE_EQ(w.value, 5.0);
  EXPECT_DOUBLE_EQ(w.q[1], 1.0);
}

TEST(WorstCase, RejectsInvalidWeights) {
  EXPECT_THROW(worst_case_expectation({1.0, 2.0}, {0.5, 0.6}, 0.1), Error);
  EXPECT_THROW(worst_case_expectation({1.0, 2.0}, {0.5, 0.5}, -0.1), Error);
}

TEST(Dro, ZeroRadiusEqualsSaa) {
  auto inst = fixtures::toy_instance(1, 2, 3);
  auto sm = build_saa(inst);
  double saa = saa_value(sm.model);
  AmbiguitySpec spec;
  EXPECT_LT(rel(saa_value(build_dro(sm.model, spec).model), saa), 1e-6);
  auto cp = solve_dro_cutting_plane(sm.model, spec);
  EXPECT_EQ(cp.iterations, 1);
  EXPECT_LT(rel(cp.outcome.objective, saa), 1e-6);
}

TEST(Dro, SizeAccounting) {
  auto inst = fixtures::toy_instance(2, 3, 2);
  auto sm = build_saa(inst);
  AmbiguitySpec spec{0.1, {}};
  auto dm = build_dro(sm.model, spec);
  const auto& L = sm.layout;
  EXPECT_EQ(dm.layout.num_vars, 2 * L.M * L.Y + 2 * L.D * L.M * L.Y);
  EXPECT_EQ(static_cast<int>(dm.model.cones.size()), L.D * L.M * L.Y);
}

TEST(Dro, ConeCuttingPlaneAndBisectionAgree) {
  for (int variant = 0; variant < 3; ++variant) {
    auto inst = fixtures::toy_instance(1 + variant % 2, 1 + variant, 3);
    auto sm = build_saa(inst);
    for (double delta : {0.001, 0.01, 0.1, 1.0}) {
      AmbiguitySpec spec{delta, {}};
      auto cone = solve_optimal(build_dro(sm.model, spec).model);
      std::vector<double> x(cone.x.begin(), cone.x.begin() + sm.model.num_vars());
      double at_x = evaluate_worst_case(sm.model, spec, x);
      auto cp = solve_dro_cutting_plane(sm.model, spec);
      EXPECT_LT(rel(at_x, cone.objective), 1e-6) << variant << " " << delta;
      EXPECT_LT(rel(cp.outcome.objective, cone.objective), 1e-5) << variant << " " << delta;
      for (size_t k = 1; k < cp.lower_bounds.size(); ++k) EXPECT_GE(cp.lower_bounds[k], cp.lower_bounds[k - 1]);
    }
  }
}

TEST(Dro, ObjectiveNonDecreasingInRadius) {
  auto inst = fixtures::toy_instance(1, 2, 3);
  auto sm = build_saa(inst);
  double prev = saa_value(sm.model);
  for (double delta : {0.001, 0.01, 0.1, 1.0}) {
    double v = solve_dro_cutting_plane(sm.model, {delta, {}}).outcome.objective;
    EXPECT_GE(v, prev - 1e-7 * std::abs(prev));
    prev = v;
  }
}

TEST(Dro, UntaggedObjectiveRejected) {
  ModelInstance m;
  m.add_variable("x", 0.0, 1.0, 1.0);
  try {
    build_dro(m, {0.1, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::objective_not_separable);
  }
}

TEST(Dro, StacksOnRobustModel) {
  auto inst = fixtures::toy_instance(1, 1, 2);
  inst.robustness = {1.0, 1.0, 1.0};
  auto rm = robust::build_robust(inst);
  double ro = saa_value(rm.saa.model);
  EXPECT_LT(rel(saa_value(build_dro(rm.saa.model, {}).model), ro), 1e-6);
  double ro_dro = saa_value(build_dro(rm.saa.model, {0.1, {}}).model);
  EXPECT_GE(ro_dro, ro - 1e-7 * ro);
  // collapse chain: no uncertainty, no ambiguity
  inst.robustness = {0.0, 0.0, 0.0};
  auto flat = robust::build_robust(inst);
  EXPECT_LT(rel(saa_value(build_dro(flat.saa.model, {}).model), saa_value(build_saa(inst).model)), 1e-6);
}
