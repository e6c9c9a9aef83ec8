#pragma once

// Month-wise train/validation/test splits, a (gamma, delta) grid solved on each training set,
// and selection on mean validation cost.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "helios/core/json.hpp"
#include "helios/evaluation/metrics.hpp"
#include "helios/evaluation/validation.hpp"
#include "helios/plan/pipeline.hpp"

namespace helios::eval {

struct SplitSpec {
  int train = 20, validation = 4, test = 4;  // days per month
  int repetitions = 10;
  uint64_t seed = 1;
};

struct GridTuple {
  UncertaintyBudget gamma;
  double delta = 0.0;

  bool reference() const { return gamma.zero() && delta == 0.0; }
  std::string gamma_label() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%g,%g,%g)", gamma.gamma_max, gamma.gamma_c, gamma.gamma_clt);
    return buf;
  }
  std::string label() const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "(%g,%g,%g,%g)", gamma.gamma_max, gamma.gamma_c, gamma.gamma_clt, delta);
    return buf;
  }
};

struct HyperGrid {
  std::vector<UncertaintyBudget> gammas;
  std::vector<double> deltas;

  static HyperGrid full() {
    HyperGrid g;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) g.gammas.push_back({double(a), double(b), double(c)});
    g.deltas = {0.0, 0.001, 0.01, 0.1, 1.0};
    return g;
  }

  std::vector<GridTuple> tuples() const {
    std::vector<GridTuple> t;
    for (const auto& g : gammas)
      for (double d : deltas) t.push_back({g, d});
    return t;
  }
};

enum class SelectOn { cost, co2 };

inline SelectOn parse_select_on(const std::string& s) {
  if (s == "cost") return SelectOn::cost;
  if (s == "co2") return SelectOn::co2;
  fail(ErrorCode::validation, "unknown selection metric '" + s + "' (cost, co2)");
}

struct CrossValOptions {
  int scenarios = 10;
  PlanOptions plan;
  int threads = 1;
  SelectOn select_on = SelectOn::cost;
  // Fixed mu of the perturbation applied to validation and test days: an injected distribution shift.
  std::optional<double> validation_shift;
  // Winner chosen outside the procedure; still evaluated on test data.
  std::optional<GridTuple> override_tuple;
};

struct Split {
  std::vector<int> train, validation, test;
};

inline void check_grid(const HyperGrid& g) {
  if (g.gammas.empty() || g.deltas.empty()) fail(ErrorCode::validation, "hyperparameter grid is empty");
  for (const auto& x : g.gammas)
    if (!(x.gamma_max >= 0.0 && x.gamma_c >= 0.0 && x.gamma_clt >= 0.0))
      fail(ErrorCode::validation, "grid gammas must be >= 0");
  for (double d : g.deltas)
    if (!(d >= 0.0) || !std::isfinite(d)) fail(ErrorCode::validation, "grid deltas must be finite and >= 0");
}

// Each month's days are shuffled per repetition and cut into train / validation / test.
inline std::vector<Split> make_splits(const CapacityFactorDataset& data, int months, const SplitSpec& spec) {
  if (spec.train < 1 || spec.validation < 1 || spec.test < 0 || spec.repetitions < 1)
    fail(ErrorCode::validation, "split needs train >= 1, validation >= 1, test >= 0, repetitions >= 1");
  std::vector<std::vector<int>> by_month(months);
  for (int i = 0; i < data.day_count(); ++i) {
    int m = data.days[i].month;
    if (m < 0 || m >= months) fail(ErrorCode::validation, "day " + data.days[i].date + " has month out of range");
    by_month[m].push_back(i);
  }
  const size_t need = static_cast<size_t>(spec.train + spec.validation + spec.test);
  for (int m = 0; m < months; ++m)
    if (by_month[m].size() < need)
      fail(ErrorCode::insufficient_days, "month " + std::to_string(m + 1) + " has " + std::to_string(by_month[m].size()) +
                                             " days, split needs " + std::to_string(need));
  std::vector<Split> out(spec.repetitions);
  for (int r = 0; r < spec.repetitions; ++r) {
    std::seed_seq seq{static_cast<uint32_t>(spec.seed), static_cast<uint32_t>(spec.seed >> 32), static_cast<uint32_t>(r)};
    std::mt19937_64 rng(seq);
    for (int m = 0; m < months; ++m) {
      auto d = by_month[m];
      std::shuffle(d.begin(), d.end(), rng);
      auto it = d.begin();
      out[r].train.insert(out[r].train.end(), it, it + spec.train);
      it += spec.train;
      out[r].validation.insert(out[r].validation.end(), it, it + spec.validation);
      it += spec.validation;
      out[r].test.insert(out[r].test.end(), it, it + spec.test);
    }
  }
  return out;
}

inline CapacityFactorDataset subset(const CapacityFactorDataset& data, const std::vector<int>& days) {
  CapacityFactorDataset s;
  s.sites = data.sites;
  s.hours = data.hours;
  for (int i : days) s.days.push_back(data.days[i]);
  return s;
}

struct Improvement {
  std::vector<double> values;  // % per repetition, positive = better than the reference
  double mean = 0.0, stdev = 0.0;
  void finish() {
    mean = eval::mean(values);
    stdev = eval::stdev(values);
  }
};

struct TupleResult {
  GridTuple tuple;
  std::vector<SampleCost> validation;  // per repetition
  Improvement cost, operational, co2;
  double mean_cost = 0.0, mean_emissions = 0.0;
  int wins = 0, losses = 0;  // repetitions with strictly lower / higher total cost than the reference
  double sign_p = 1.0;
};

struct TestResult {
  std::vector<SampleCost> winner, reference;                  // held-out test days
  std::vector<SampleCost> winner_perturbed, reference_perturbed;  // perturbed test days
  std::vector<double> perturb_mu;
  Improvement cost, operational, co2;
  Improvement perturbed_cost, perturbed_operational, perturbed_co2;
};

struct EvaluationReport {
  std::vector<TupleResult> tuples;  // the reference tuple is always present
  int reference = 0;
  int selected = 0;
  bool overridden = false;
  SelectOn select_on = SelectOn::cost;
  TestResult test;
  SplitSpec splits;
  int scenarios = 0;
  std::vector<std::string> warnings;
};

inline double pct_gain(double ref, double v) { return ref == 0.0 ? 0.0 : 100.0 * (ref - v) / std::abs(ref); }

inline void fill_improvements(Improvement& cost, Improvement& op, Improvement& co2, const std::vector<SampleCost>& ref,
                              const std::vector<SampleCost>& v) {
  for (size_t r = 0; r < v.size(); ++r) {
    cost.values.push_back(pct_gain(ref[r].total(), v[r].total()));
    op.values.push_back(pct_gain(ref[r].operational, v[r].operational));
    co2.values.push_back(pct_gain(ref[r].emissions, v[r].emissions));
  }
  cost.finish();
  op.finish();
  co2.finish();
}

// Lower metric wins; near-ties (1e-9 relative) go to the lower delta, then the smaller gamma.
inline bool better(const TupleResult& a, const TupleResult& b, SelectOn on) {
  double va = on == SelectOn::cost ? a.mean_cost : a.mean_emissions;
  double vb = on == SelectOn::cost ? b.mean_cost : b.mean_emissions;
  if (std::abs(va - vb) > 1e-9 * std::max(std::abs(va), std::abs(vb))) return va < vb;
  if (a.tuple.delta != b.tuple.delta) return a.tuple.delta < b.tuple.delta;
  auto key = [](const GridTuple& t) { return std::tuple(t.gamma.gamma_max, t.gamma.gamma_c, t.gamma.gamma_clt); };
  return key(a.tuple) < key(b.tuple);
}

inline EvaluationReport cross_validate(const PlanningInstance& inst, const CapacityFactorDataset& data,
                                       const SplitSpec& spec, const HyperGrid& grid, const CrossValOptions& opt = {}) {
  check_grid(grid);
  const auto splits = make_splits(data, inst.time.months, spec);
  EvaluationReport rep;
  rep.splits = spec;
  rep.scenarios = opt.scenarios;
  rep.select_on = opt.select_on;
  std::vector<GridTuple> tuples = grid.tuples();
  auto ref_it = std::find_if(tuples.begin(), tuples.end(), [](const GridTuple& t) { return t.reference(); });
  if (ref_it == tuples.end()) {
    tuples.insert(tuples.begin(), GridTuple{});
    ref_it = tuples.begin();
  }
  rep.reference = static_cast<int>(ref_it - tuples.begin());
  int winner_extra = -1;
  if (opt.override_tuple) {
    auto it = std::find_if(tuples.begin(), tuples.end(), [&](const GridTuple& t) {
      return t.label() == opt.override_tuple->label();
    });
    if (it == tuples.end()) {
      tuples.push_back(*opt.override_tuple);
      winner_extra = static_cast<int>(tuples.size()) - 1;
    }
  }
  const int R = spec.repetitions, G = static_cast<int>(tuples.size());

  // Training scenarios per repetition, shared by every tuple.
  std::vector<PlanningInstance> trained(R, inst);
  std::vector<CapacityFactorDataset> held(R);
  std::vector<std::vector<std::string>> warn(R);
  parallel_for(R, opt.threads, [&](int r) {
    attach_scenarios(trained[r], subset(data, splits[r].train), opt.scenarios, spec.seed + r, 1, &warn[r]);
    held[r] = data;
    if (opt.validation_shift) {
      std::vector<int> out = splits[r].validation;
      out.insert(out.end(), splits[r].test.begin(), splits[r].test.end());
      auto shifted = perturb_dataset(subset(data, out), spec.seed * 7919 + r, *opt.validation_shift);
      for (size_t k = 0; k < out.size(); ++k) held[r].days[out[k]] = shifted.days[k];
    }
  });
  for (auto& w : warn)
    for (auto& s : w) rep.warnings.push_back(s);

  std::vector<InvestmentPlan> plans(static_cast<size_t>(R) * G);
  std::vector<SampleCost> val(plans.size());
  EvalOptions eo;
  eo.solver = opt.plan.solver;
  parallel_for(R * G, opt.threads, [&](int k) {
    int r = k / G, g = k % G;
    PlanningInstance pi = trained[r];
    pi.robustness = tuples[g].gamma;
    pi.delta = tuples[g].delta;
    plans[k] = solve_plan(pi, opt.plan).plan;
    val[k] = evaluate_on_days(pi, plans[k], held[r], splits[r].validation, eo);
  });

  rep.tuples.resize(G);
  for (int g = 0; g < G; ++g) {
    auto& t = rep.tuples[g];
    t.tuple = tuples[g];
    for (int r = 0; r < R; ++r) t.validation.push_back(val[static_cast<size_t>(r) * G + g]);
  }
  const auto& ref = rep.tuples[rep.reference].validation;
  for (auto& t : rep.tuples) {
    fill_improvements(t.cost, t.operational, t.co2, ref, t.validation);
    std::vector<double> c, e;
    for (int r = 0; r < R; ++r) {
      c.push_back(t.validation[r].total());
      e.push_back(t.validation[r].emissions);
      double d = ref[r].total() - t.validation[r].total();
      double tol = 1e-9 * std::abs(ref[r].total());
      if (d > tol) t.wins++;
      if (d < -tol) t.losses++;
    }
    t.mean_cost = mean(c);
    t.mean_emissions = mean(e);
    t.sign_p = sign_test_p(t.wins, t.wins + t.losses);
  }
  int best = -1;
  for (int g = 0; g < G; ++g) {
    if (g == winner_extra) continue;
    if (best < 0 || better(rep.tuples[g], rep.tuples[best], opt.select_on)) best = g;
  }
  rep.selected = best;
  if (opt.override_tuple) {
    rep.overridden = true;
    for (int g = 0; g < G; ++g)
      if (tuples[g].label() == opt.override_tuple->label()) rep.selected = g;
  }

  // Winner and reference on test days, plain and perturbed.
  if (spec.test > 0) {
    auto& T = rep.test;
    T.winner.resize(R);
    T.reference.resize(R);
    T.winner_perturbed.resize(R);
    T.reference_perturbed.resize(R);
    T.perturb_mu.resize(R);
    parallel_for(R, opt.threads, [&](int r) {
      const auto& test = splits[r].test;
      auto pert = held[r];
      auto p = perturb_dataset(subset(held[r], test), spec.seed * 104729 + r, std::nullopt, &T.perturb_mu[r]);
      for (size_t k = 0; k < test.size(); ++k) pert.days[test[k]] = p.days[k];
      const auto& wp = plans[static_cast<size_t>(r) * G + rep.selected];
      const auto& rp = plans[static_cast<size_t>(r) * G + rep.reference];
      T.winner[r] = evaluate_on_days(trained[r], wp, held[r], test, eo);
      T.reference[r] = evaluate_on_days(trained[r], rp, held[r], test, eo);
      T.winner_perturbed[r] = evaluate_on_days(trained[r], wp, pert, test, eo);
      T.reference_perturbed[r] = evaluate_on_days(trained[r], rp, pert, test, eo);
    });
    fill_improvements(T.cost, T.operational, T.co2, T.reference, T.winner);
    fill_improvements(T.perturbed_cost, T.perturbed_operational, T.perturbed_co2, T.reference_perturbed,
                      T.winner_perturbed);
  }
  return rep;
}

// Table layout: one row per gamma tuple and metric, one "mean (stdev)" column per delta.
inline void write_crossval_table(std::ostream& os, const EvaluationReport& rep) {
  std::vector<double> deltas;
  std::vector<std::string> gammas;
  for (const auto& t : rep.tuples) {
    if (std::find(deltas.begin(), deltas.end(), t.tuple.delta) == deltas.end()) deltas.push_back(t.tuple.delta);
    if (std::find(gammas.begin(), gammas.end(), t.tuple.gamma_label()) == gammas.end())
      gammas.push_back(t.tuple.gamma_label());
  }
  std::sort(deltas.begin(), deltas.end());
  os << "metric,gamma";
  for (double d : deltas) os << ",delta=" << d;
  os << '\n';
  auto cell = [](const Improvement& v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f (%.3f)", v.mean, v.stdev);
    return std::string(buf);
  };
  const std::pair<const char*, Improvement TupleResult::*> metrics[] = {{"cost_improvement_pct", &TupleResult::cost},
                                                                        {"operational_improvement_pct", &TupleResult::operational},
                                                                        {"co2_improvement_pct", &TupleResult::co2}};
  for (const auto& [name, field] : metrics)
    for (const auto& g : gammas) {
      os << name << ",\"" << g << '"';
      for (double d : deltas) {
        os << ',';
        for (const auto& t : rep.tuples)
          if (t.tuple.gamma_label() == g && t.tuple.delta == d) os << '"' << cell(t.*field) << '"';
      }
      os << '\n';
    }
}

inline json improvement_json(const Improvement& v) {
  return {{"mean", v.mean}, {"stdev", v.stdev}, {"values", v.values}};
}

inline json report_json(const EvaluationReport& rep) {
  json tuples = json::array();
  for (const auto& t : rep.tuples) {
    json val = json::array();
    for (const auto& s : t.validation)
      val.push_back({{"operational", s.operational}, {"investment", s.investment}, {"emissions_t", s.emissions}});
    tuples.push_back({{"gamma", {t.tuple.gamma.gamma_max, t.tuple.gamma.gamma_c, t.tuple.gamma.gamma_clt}},
                      {"delta", t.tuple.delta},
                      {"cost_improvement_pct", improvement_json(t.cost)},
                      {"operational_improvement_pct", improvement_json(t.operational)},
                      {"co2_improvement_pct", improvement_json(t.co2)},
                      {"mean_validation_cost", t.mean_cost},
                      {"mean_validation_emissions_t", t.mean_emissions},
                      {"wins", t.wins},
                      {"losses", t.losses},
                      {"sign_test_p", t.sign_p},
                      {"validation", val}});
  }
  const auto& T = rep.test;
  return {{"tuples", tuples},
          {"reference", rep.reference},
          {"selected", rep.selected},
          {"selected_label", rep.tuples[rep.selected].tuple.label()},
          {"overridden", rep.overridden},
          {"select_on", rep.select_on == SelectOn::cost ? "cost" : "co2"},
          {"splits",
           {{"train", rep.splits.train},
            {"validation", rep.splits.validation},
            {"test", rep.splits.test},
            {"repetitions", rep.splits.repetitions},
            {"seed", rep.splits.seed}}},
          {"scenarios", rep.scenarios},
          {"test",
           {{"cost_improvement_pct", improvement_json(T.cost)},
            {"operational_improvement_pct", improvement_json(T.operational)},
            {"co2_improvement_pct", improvement_json(T.co2)},
            {"perturbed_cost_improvement_pct", improvement_json(T.perturbed_cost)},
            {"perturbed_operational_improvement_pct", improvement_json(T.perturbed_operational)},
            {"perturbed_co2_improvement_pct", improvement_json(T.perturbed_co2)},
            {"perturb_mu", T.perturb_mu}}},
          {"warnings", rep.warnings}};
}

}  // namespace helios::eval
