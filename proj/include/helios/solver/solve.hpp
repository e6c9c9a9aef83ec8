#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "helios/model/model_instance.hpp"
#include "helios/solver/dense_simplex.hpp"
#include "helios/solver/interior_point.hpp"

namespace helios {

enum class SolveStatus { optimal, infeasible, unbounded, limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::limit: return "limit";
  }
  return "?";
}

struct SolveOptions {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-8;
  double time_limit = kInf;
  int max_iterations = 300;
  int cone_max_iterations = 1000;  // models with exponential cones take many short steps
  std::string backend;  // empty: HELIOS_SOLVER, then "ipm"
  bool verbose = false;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::limit;
  std::vector<double> x;  // empty unless optimal
  double objective = 0.0;
  double seconds = 0.0;
  std::string solver;
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == SolveStatus::optimal; }
};

inline std::vector<std::string> available_backends() { return {"ipm", "dense-simplex"}; }

inline std::string resolve_backend(const SolveOptions& opt) {
  if (!opt.backend.empty()) return opt.backend;
  if (const char* env = std::getenv("HELIOS_SOLVER"); env && *env) return env;
  return "ipm";
}

inline SolveOutcome solve(const ModelInstance& model, const SolveOptions& opt = {}) {
  const std::string backend = resolve_backend(opt);
  const auto t0 = std::chrono::steady_clock::now();
  SolveOutcome out;
  if (backend == "ipm") {
    solver::IpmSettings s;
    s.feas_tol = opt.feasibility_tol;
    s.opt_tol = opt.optimality_tol;
    s.max_iter = model.cones.empty() ? opt.max_iterations : std::max(opt.max_iterations, opt.cone_max_iterations);
    s.time_limit = opt.time_limit;
    s.verbose = opt.verbose;
    auto r = solver::InteriorPoint(s).solve(model);
    out.solver = "helios-ipm";
    out.iterations = r.iterations;
    out.message = r.message;
    switch (r.status) {
      case solver::IpmStatus::optimal:
        out.status = SolveStatus::optimal;
        out.x = std::move(r.x);
        out.objective = r.objective;
        break;
      case solver::IpmStatus::infeasible: out.status = SolveStatus::infeasible; break;
      case solver::IpmStatus::unbounded: out.status = SolveStatus::unbounded; break;
      case solver::IpmStatus::limit: out.status = SolveStatus::limit; break;
      case solver::IpmStatus::numerical: {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s after %d iterations (pres %.2e, dres %.2e, gap %.2e)", r.message.c_str(),
                      r.iterations, r.primal_residual, r.dual_residual, r.gap);
        fail(ErrorCode::numerical_failure, buf);
      }
    }
  } else if (backend == "dense-simplex") {
    if (!model.cones.empty())
      fail(ErrorCode::backend_unavailable, "backend dense-simplex cannot handle cone constraints");
    auto r = solver::DenseSimplex().solve(model);
    out.solver = "helios-dense-simplex";
    out.iterations = r.iterations;
    switch (r.status) {
      case solver::SimplexStatus::optimal:
        out.status = SolveStatus::optimal;
        out.x = std::move(r.x);
        out.objective = r.objective;
        break;
      case solver::SimplexStatus::infeasible: out.status = SolveStatus::infeasible; break;
      case solver::SimplexStatus::unbounded: out.status = SolveStatus::unbounded; break;
      case solver::SimplexStatus::limit: out.status = SolveStatus::limit; break;
    }
  } else {
    fail(ErrorCode::backend_unavailable, "unknown solver backend '" + backend + "'");
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

// Solve and insist on optimality.
inline SolveOutcome solve_optimal(const ModelInstance& model, const SolveOptions& opt = {}) {
  auto out = solve(model, opt);
  if (!out.optimal())
    fail(ErrorCode::numerical_failure,
         model.name + ": solver returned " + to_string(out.status) + (out.message.empty() ? "" : " (" + out.message + ")"));
  return out;
}

}  // namespace helios
