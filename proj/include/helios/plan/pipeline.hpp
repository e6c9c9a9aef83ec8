#pragma once

// One planning solve: SAA, robust or DRO depending on the instance's gamma and delta.

#include <string>

#include "helios/dro/kl.hpp"
#include "helios/robust/counterparts.hpp"
#include "helios/saa/solution.hpp"
#include "helios/scenario/extend.hpp"
#include "helios/scenario/reduction.hpp"
#include "helios/scenario/statistics.hpp"

namespace helios {

enum class DroMethod { cone, cutting_plane };

inline const char* to_string(DroMethod m) { return m == DroMethod::cone ? "cone" : "cutting-plane"; }

inline DroMethod parse_dro_method(const std::string& s) {
  if (s == "cone") return DroMethod::cone;
  if (s == "cutting-plane") return DroMethod::cutting_plane;
  fail(ErrorCode::validation, "unknown DRO method '" + s + "' (cone, cutting-plane)");
}

struct PlanOptions {
  DroMethod dro_method = DroMethod::cutting_plane;
  SolveOptions solver;
};

inline PlanSolution solve_plan(const PlanningInstance& inst, const PlanOptions& opt = {}) {
  if (!inst.scenarios) fail(ErrorCode::missing_scenario_set, "instance has no reduced scenarios");
  if (!(inst.delta >= 0.0)) fail(ErrorCode::validation, "delta must be >= 0");
  SaaModel sm = inst.robustness.zero() ? build_saa(inst) : robust::build_robust(inst).saa;
  SolveOutcome out;
  if (inst.delta > 0.0) {
    dro::AmbiguitySpec spec{inst.delta, {}};
    if (opt.dro_method == DroMethod::cone) {
      auto dm = dro::build_dro(sm.model, spec);
      out = solve_optimal(dm.model, opt.solver);
    } else {
      auto cp = dro::solve_dro_cutting_plane(sm.model, spec, opt.solver);
      out = std::move(cp.outcome);
    }
  } else {
    out = solve_optimal(sm.model, opt.solver);
  }
  return extract_solution(inst, sm, out);
}

// Reduced scenarios and deviation statistics from a capacity-factor dataset; length 2 or 3 chains days.
inline void attach_scenarios(PlanningInstance& inst, const CapacityFactorDataset& data, int k, uint64_t seed,
                             int length = 1, std::vector<std::string>* warnings = nullptr) {
  scenario::ReduceOptions ro;
  ro.months = inst.time.months;
  auto sc = scenario::reduce_scenarios(data, k, seed, ro, warnings);
  auto st = scenario::compute_uncertainty_statistics(data, sc, warnings);
  if (length > 1) {
    auto ext = scenario::extend_scenarios(sc, length);
    st = scenario::extend_statistics(st, ext);
    sc = std::move(ext);
  }
  inst.scenarios = std::move(sc);
  inst.statistics = std::move(st);
}

}  // namespace helios
