#pragma once

// Run parameters shared by the CLI and the plan service, and the plan-plus-baseline solve behind both.

#include <optional>
#include <string>
#include <vector>

#include "helios/core/json.hpp"
#include "helios/core/validate.hpp"
#include "helios/plan/pipeline.hpp"

namespace helios {

struct RunParameters {
  int scenarios = 5;  // |D| for reduction; ignored when the instance already carries scenarios and no dataset
  uint64_t seed = 1;
  int length = 1;     // 2 or 3 chains days into extended scenarios
  std::optional<double> budget;  // overrides the instance budget
  UncertaintyBudget gamma;
  double delta = 0.0;
  bool paper_literal_ro = false;
  DroMethod dro_method = DroMethod::cutting_plane;
};

// Violations as (field, message) pairs; empty when valid.
inline std::vector<std::pair<std::string, std::string>> check_parameters(const RunParameters& p) {
  std::vector<std::pair<std::string, std::string>> v;
  if (p.scenarios < 1) v.emplace_back("scenarios", "must be >= 1");
  if (p.length < 1 || p.length > 3) v.emplace_back("length", "must be 1, 2 or 3");
  if (p.budget && !(*p.budget >= 0.0 && std::isfinite(*p.budget))) v.emplace_back("budget", "must be finite and >= 0");
  if (!(p.gamma.gamma_max >= 0.0)) v.emplace_back("gamma[0]", "gamma_max must be >= 0");
  if (!(p.gamma.gamma_c >= 0.0)) v.emplace_back("gamma[1]", "gamma_c must be >= 0");
  if (!(p.gamma.gamma_clt >= 0.0)) v.emplace_back("gamma[2]", "gamma_clt must be >= 0");
  if (!(p.delta >= 0.0 && std::isfinite(p.delta))) v.emplace_back("delta", "must be finite and >= 0");
  return v;
}

inline json to_json_value(const RunParameters& p) {
  json j = {{"scenarios", p.scenarios},
            {"seed", p.seed},
            {"length", p.length},
            {"gamma", {p.gamma.gamma_max, p.gamma.gamma_c, p.gamma.gamma_clt}},
            {"delta", p.delta},
            {"paper_literal_ro", p.paper_literal_ro},
            {"dro_method", to_string(p.dro_method)}};
  j["budget"] = p.budget ? json(*p.budget) : json(nullptr);
  return j;
}

// Instance with the run's scenarios, budget, gamma, delta and options applied.
inline PlanningInstance prepare_instance(const PlanningInstance& base, const CapacityFactorDataset* data,
                                         const RunParameters& p, std::vector<std::string>* warnings = nullptr) {
  auto bad = check_parameters(p);
  if (!bad.empty()) fail(ErrorCode::validation, bad.front().first + ": " + bad.front().second);
  PlanningInstance inst = base;
  if (data) {
    attach_scenarios(inst, *data, p.scenarios, p.seed, p.length, warnings);
  } else if (!inst.scenarios) {
    fail(ErrorCode::missing_scenario_set, "instance has neither capacity factors nor reduced scenarios");
  }
  if (p.budget) inst.costs.budget = *p.budget;
  inst.robustness = p.gamma;
  inst.delta = p.delta;
  inst.options.paper_literal_ro = p.paper_literal_ro;
  auto rep = validate_instance(inst);
  if (!rep.ok()) fail(ErrorCode::validation, rep.str());
  return inst;
}

struct PlanRun {
  PlanSolution solution;
  PlanSolution baseline;  // same model at budget 0
};

inline PlanRun run_plan(const PlanningInstance& inst, const PlanOptions& opt) {
  PlanRun r;
  r.solution = solve_plan(inst, opt);
  if (inst.costs.budget == 0.0) {
    r.baseline = r.solution;
  } else {
    PlanningInstance b0 = inst;
    b0.costs.budget = 0.0;
    r.baseline = solve_plan(b0, opt);
  }
  return r;
}

}  // namespace helios
