// helios: command-line entry point. Exit codes: 0 success, 1 validation or input error, 2 solver failure.

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "helios/evaluation/crossval.hpp"
#include "helios/evaluation/sweep.hpp"
#include "helios/io/instance_io.hpp"
#include "helios/io/synthetic.hpp"
#include "helios/plan/report.hpp"
#include "helios/plan/run.hpp"
#include "helios/realtime/replay.hpp"
#include "helios/service/plan_service.hpp"

using namespace helios;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::string instance;
  std::string demand, capacity_factors;
  int scenarios = 5;
  uint64_t seed = 1;
  int length = 1;
  double budget = -1.0;  // < 0: keep the instance budget
  std::vector<double> gamma = {0.0, 0.0, 0.0};
  double delta = 0.0;
  bool paper_literal_ro = false;
  std::string dro_method = "cutting-plane";
  std::string out_dir = "helios-out";
  int threads = 1;
  double time_limit = 3600.0;  // per solve, seconds
};

void add_instance_opts(CLI::App* sc, Common& c) {
  sc->add_option("--instance", c.instance, "instance document (JSON)")->required();
  sc->add_option("--demand", c.demand, "demand CSV overriding the document");
  sc->add_option("--capacity-factors", c.capacity_factors, "capacity-factor CSV overriding the document");
  sc->add_option("--scenarios", c.scenarios, "number of reduced scenarios |D|")->capture_default_str();
  sc->add_option("--seed", c.seed, "seed for reduction and sampling")->capture_default_str();
  sc->add_option("--length", c.length, "days per scenario (1, 2 or 3)")->capture_default_str();
  sc->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  sc->add_option("--threads", c.threads, "worker threads")->capture_default_str();
  sc->add_option("--time-limit", c.time_limit, "per-solve time limit, seconds")->capture_default_str();
}

void add_model_opts(CLI::App* sc, Common& c) {
  sc->add_option("--budget", c.budget, "investment budget B, MAD (default: instance value)");
  sc->add_option("--gamma", c.gamma, "uncertainty budgets <max> <c> <clt>")->expected(3)->capture_default_str();
  sc->add_option("--delta", c.delta, "KL ambiguity radius")->capture_default_str();
  sc->add_flag("--paper-literal-ro", c.paper_literal_ro, "drop nominal balance and sell rows in the robust model");
  sc->add_option("--dro-method", c.dro_method, "cone or cutting-plane")->capture_default_str();
}

RunParameters run_parameters(const Common& c) {
  if (c.gamma.size() != 3) fail(ErrorCode::validation, "--gamma takes three values");
  RunParameters p;
  p.scenarios = c.scenarios;
  p.seed = c.seed;
  p.length = c.length;
  if (c.budget >= 0.0) p.budget = c.budget;
  p.gamma = {c.gamma[0], c.gamma[1], c.gamma[2]};
  p.delta = c.delta;
  p.paper_literal_ro = c.paper_literal_ro;
  p.dro_method = parse_dro_method(c.dro_method);
  return p;
}

PlanOptions plan_options(const Common& c) {
  PlanOptions po;
  po.dro_method = parse_dro_method(c.dro_method);
  po.solver.time_limit = c.time_limit;
  return po;
}

io::LoadedInstance load(const Common& c) {
  io::InstancePaths paths{c.instance, {}, {}};
  if (!c.demand.empty()) paths.demand = c.demand;
  if (!c.capacity_factors.empty()) paths.capacity_factors = c.capacity_factors;
  return io::load_instance(paths);
}

const CapacityFactorDataset& need_dataset(const io::LoadedInstance& li) {
  if (!li.dataset) fail(ErrorCode::validation, "this command needs capacity factors (--capacity-factors)");
  return *li.dataset;
}

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;
  void text(const std::string& name, const std::string& body) {
    io::write_text(dir / name, body);
    files.push_back(name);
  }
  void doc(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }
};

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Full resolved configuration (as a config file CLI11 reads back), seeds and versions.
void write_manifest(Outputs& out, const CLI::App& app, const CLI::App* sub, const std::vector<std::string>& argv,
                    double seconds, const std::vector<std::string>& warnings) {
  json m = {{"command", sub->get_name()},
            {"argv", argv},
            {"config", app.config_to_str(true, false)},
            {"started_utc", utc_now()},
            {"seconds", seconds},
            {"outputs", out.files},
            {"warnings", warnings},
            {"versions",
             {{"helios", kVersion},
              {"schema", kSchemaVersion},
              {"compiler", __VERSION__},
              {"cli11", CLI11_VERSION},
              {"nlohmann_json",
               std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                   std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"httplib", CPPHTTPLIB_VERSION},
              {"solver_backend", resolve_backend({})}}}};
  io::write_text(out.dir / "run-manifest.json", m.dump(2) + "\n");
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::numerical_failure:
    case ErrorCode::iteration_limit:
    case ErrorCode::backend_unavailable:
      return 2;
    default:
      return 1;
  }
}

void report_error(const std::string& code, const std::string& msg) {
  std::cerr << json({{"error", code}, {"message", msg}}).dump() << "\n";
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t pos = 0;
      v.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(ErrorCode::validation, std::string(what) + ": cannot parse '" + tok + "'");
    }
  }
  if (v.empty()) fail(ErrorCode::validation, std::string(what) + " is empty");
  return v;
}

std::string format_table(const std::vector<std::pair<std::string, double>>& rows) {
  std::ostringstream os;
  os.precision(10);
  for (const auto& [k, v] : rows) os << k << ": " << v << "\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"helios: solar and battery investment planning under solar uncertainty"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "configuration file (TOML or INI); command-line flags take precedence");
  app.require_subcommand(1);
  Common c;

  auto* gen = app.add_subcommand("generate", "write a synthetic instance with capacity factors");
  io::SyntheticSpec spec;
  spec.years = 5;
  std::string gen_out = "data/example";
  gen->add_option("--out-dir", gen_out, "output directory")->capture_default_str();
  gen->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
  gen->add_option("--years", spec.years, "planning years")->capture_default_str();
  gen->add_option("--first-year", spec.first_year, "first calendar year")->capture_default_str();
  gen->add_option("--days-per-month", spec.days_per_month, "capacity-factor days per month")->capture_default_str();
  gen->add_option("--budget", spec.budget, "investment budget, MAD")->capture_default_str();
  gen->add_option("--noise", spec.noise, "hourly noise scale")->capture_default_str();

  auto* red = app.add_subcommand("reduce", "reduce capacity-factor days to scenarios");
  add_instance_opts(red, c);

  auto* plan = app.add_subcommand("plan", "solve the planning model (SAA, robust or DRO)");
  add_instance_opts(plan, c);
  add_model_opts(plan, c);

  auto* rep = app.add_subcommand("replay", "hour-by-hour replay of capacity-factor days against a plan");
  add_instance_opts(rep, c);
  add_model_opts(rep, c);
  std::string plan_file;
  int replay_days = 30, replay_year = 1;
  realtime::ForecastNoiseSpec noise{0.1, 0.8};
  bool perturb = false;
  rep->add_option("--plan", plan_file, "investment plan JSON (plan-solution.json); solved when absent");
  rep->add_option("--days", replay_days, "days to replay, taken evenly from the dataset (0 = all)")->capture_default_str();
  rep->add_option("--year", replay_year, "planning year to replay (1-based)")->capture_default_str();
  rep->add_option("--noise", noise.sigma, "forecast error scale")->capture_default_str();
  rep->add_option("--ar", noise.ar, "forecast error AR(1) coefficient")->capture_default_str();
  rep->add_flag("--perturb", perturb, "perturb the replayed days (random mean shift)");

  auto* cv = app.add_subcommand("crossval", "cross-validate robustness hyperparameters");
  add_instance_opts(cv, c);
  eval::SplitSpec split;
  std::string select_on = "cost", grid_name = "full", gammas_arg, deltas_arg;
  double shift = 0.0;
  std::vector<double> override_t;
  cv->add_option("--train", split.train, "training days per month")->capture_default_str();
  cv->add_option("--validation", split.validation, "validation days per month")->capture_default_str();
  cv->add_option("--test", split.test, "test days per month")->capture_default_str();
  cv->add_option("--repetitions", split.repetitions, "repetitions")->capture_default_str();
  cv->add_option("--select-on", select_on, "selection metric: cost or co2")->capture_default_str();
  cv->add_option("--grid", grid_name, "full or small")->capture_default_str();
  cv->add_option("--gammas", gammas_arg, "gamma tuples a:b:c separated by commas (overrides --grid)");
  cv->add_option("--deltas", deltas_arg, "delta values separated by commas (overrides --grid)");
  cv->add_option("--shift", shift, "fixed perturbation mean applied to validation and test days (0 = none)");
  cv->add_option("--override", override_t, "winning tuple chosen outside the procedure <max> <c> <clt> <delta>")->expected(4);
  cv->add_option("--dro-method", c.dro_method, "cone or cutting-plane")->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "budget sweep: cost, emissions and NPV per budget");
  add_instance_opts(sw, c);
  add_model_opts(sw, c);
  std::string budgets_arg = "0,2e8,5e8,1e9,2e9,4e9,8e9,1.6e10";
  sw->add_option("--budgets", budgets_arg, "ascending budgets, comma separated")->capture_default_str();
  std::string counts_arg;
  sw->add_option("--sensitivity", counts_arg, "also re-solve with these scenario counts (k or k:length, comma separated)");

  auto* srv = app.add_subcommand("serve", "start the plan service");
  service::ServiceConfig scfg;
  std::string store_dir = "helios-store", data_dir = "data", ui_dir;
  srv->add_option("--host", scfg.host, "bind address")->capture_default_str();
  srv->add_option("--port", scfg.port, "service.port")->capture_default_str();
  srv->add_option("--max-concurrent-jobs", scfg.max_concurrent_jobs, "service.max_concurrent_jobs")->capture_default_str();
  srv->add_option("--queue-capacity", scfg.queue_capacity, "queued jobs before 503")->capture_default_str();
  srv->add_option("--store", store_dir, "result store directory")->capture_default_str();
  srv->add_option("--data-dir", data_dir, "bundled instances directory")->capture_default_str();
  srv->add_option("--ui-dir", ui_dir, "static UI build served at /ui");
  srv->add_option("--token", scfg.token, "static bearer token (or HELIOS_TOKEN)")->envname("HELIOS_TOKEN");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    report_error("UsageError", e.what());
    return 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  std::vector<std::string> args(argv, argv + argc);
  const CLI::App* sub = app.get_subcommands().front();
  std::vector<std::string> warnings;

  try {
    if (sub == gen) {
      auto data = io::generate_synthetic(spec);
      Outputs out{gen_out, {}};
      io::save_instance(out.dir, data.instance, &data.dataset, spec.first_year);
      out.files = {"instance.json", "demand.csv", "capacity_factors.csv"};
      write_manifest(out, app, sub, args, elapsed(), warnings);
      std::cout << "wrote " << (out.dir / "instance.json").string() << " (" << data.dataset.day_count()
                << " capacity-factor days)\n";
      return 0;
    }
    if (sub == srv) {
      scfg.store_dir = store_dir;
      scfg.data_dir = data_dir;
      scfg.ui_dir = ui_dir;
      service::PlanService svc(scfg);
      static service::PlanService* active = &svc;
      std::signal(SIGINT, [](int) { active->http().stop(); });
      std::signal(SIGTERM, [](int) { active->http().stop(); });
      std::cerr << "plan service listening on " << scfg.host << ":" << scfg.port << "\n";
      if (!svc.listen()) fail(ErrorCode::validation, "cannot bind " + scfg.host + ":" + std::to_string(scfg.port));
      return 0;
    }

    auto li = load(c);
    warnings = li.warnings;
    Outputs out{c.out_dir, {}};

    if (sub == red) {
      const auto& data = need_dataset(li);
      PlanningInstance inst = li.instance;
      attach_scenarios(inst, data, c.scenarios, c.seed, c.length, &warnings);
      out.doc("scenarios.json", {{"scenarios", *inst.scenarios}, {"statistics", *inst.statistics}});
      std::ostringstream prof, wts;
      io::write_scenario_profiles(prof, *inst.scenarios);
      io::write_scenario_weights(wts, *inst.scenarios);
      out.text("scenario_profiles.csv", prof.str());
      out.text("scenario_weights.csv", wts.str());
      std::cout << "reduced " << data.day_count() << " days to " << inst.scenarios->scenarios << " scenarios\n";
    } else if (sub == plan) {
      auto params = run_parameters(c);
      auto inst = prepare_instance(li.instance, li.dataset ? &*li.dataset : nullptr, params, &warnings);
      auto run = run_plan(inst, plan_options(c));
      json summary = plan_summary(inst, run.solution, run.baseline);
      summary["parameters"] = to_json_value(params);
      out.doc("plan.json", summary);
      out.doc("plan-solution.json", {{"plan", run.solution.plan}, {"objective", run.solution.objective}});
      std::ostringstream inv;
      write_investment_csv(inv, inst, run.solution.plan);
      out.text("investment.csv", inv.str());
      double b = 0.0, z = 0.0;
      for (double v : run.solution.plan.battery) b += v;
      for (double v : run.solution.plan.solar) z += v;
      std::cout << format_table({{"objective", run.solution.objective},
                                 {"npv", summary["npv"]["npv"].get<double>()},
                                 {"investment_discounted", summary["npv"]["investment"].get<double>()},
                                 {"battery_kwh", b},
                                 {"solar_kw", z}});
    } else if (sub == rep) {
      const auto& data = need_dataset(li);
      auto params = run_parameters(c);
      auto inst = prepare_instance(li.instance, &data, params, &warnings);
      InvestmentPlan ip;
      if (!plan_file.empty()) {
        auto j = io::parse_json(io::read_text(plan_file), plan_file);
        ip = decode<InvestmentPlan>(j.contains("plan") ? j["plan"] : j, plan_file);
      } else {
        ip = solve_plan(inst, plan_options(c)).plan;
      }
      CapacityFactorDataset days = data;
      if (replay_days > 0 && replay_days < data.day_count()) {
        days.days.clear();
        for (int k = 0; k < replay_days; ++k)
          days.days.push_back(data.days[static_cast<size_t>(k) * data.day_count() / replay_days]);
      }
      if (perturb) days = eval::perturb_dataset(days, c.seed);
      realtime::ReplayOptions ro;
      ro.year = replay_year - 1;
      ro.noise = noise;
      ro.seed = c.seed;
      ro.threads = c.threads;
      ro.solver.time_limit = c.time_limit;
      auto r = realtime::replay(inst, ip, days, ro);
      std::ostringstream sum, acts, dcsv;
      realtime::write_summary(sum, r);
      realtime::write_actions_csv(acts, inst, r);
      dcsv << "date,month,cost,rent,onee_kwh,nareva_kwh,sales_kwh,solar_kwh,emissions_kg,penalty,feasible\n";
      dcsv.precision(12);
      for (const auto& d : r.days)
        dcsv << d.date << ',' << d.month + 1 << ',' << d.cost << ',' << d.rent << ',' << d.onee_kwh << ','
             << d.nareva_kwh << ',' << d.sales_kwh << ',' << d.solar_kwh << ',' << d.emissions << ',' << d.penalty
             << ',' << (d.feasible ? 1 : 0) << '\n';
      out.text("replay_summary.txt", sum.str());
      out.text("replay_actions.csv", acts.str());
      out.text("replay_days.csv", dcsv.str());
      std::cout << sum.str();
    } else if (sub == cv) {
      const auto& data = need_dataset(li);
      eval::HyperGrid grid = eval::HyperGrid::full();
      if (grid_name == "small") {
        grid.gammas = {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}, {1, 1, 1}};
        grid.deltas = {0.0, 0.01, 0.1};
      } else if (grid_name != "full") {
        fail(ErrorCode::validation, "--grid must be full or small");
      }
      if (!gammas_arg.empty()) {
        grid.gammas.clear();
        std::stringstream ss(gammas_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          auto v = parse_list(std::string(tok).replace(tok.find(':'), 1, ",").replace(tok.rfind(':'), 1, ","), "--gammas");
          if (v.size() != 3) fail(ErrorCode::validation, "--gammas entries are a:b:c");
          grid.gammas.push_back({v[0], v[1], v[2]});
        }
      }
      if (!deltas_arg.empty()) grid.deltas = parse_list(deltas_arg, "--deltas");
      split.seed = c.seed;
      eval::CrossValOptions co;
      co.scenarios = c.scenarios;
      co.plan = plan_options(c);
      co.threads = c.threads;
      co.select_on = eval::parse_select_on(select_on);
      if (shift != 0.0) co.validation_shift = shift;
      if (!override_t.empty())
        co.override_tuple = eval::GridTuple{{override_t[0], override_t[1], override_t[2]}, override_t[3]};
      auto r = eval::cross_validate(li.instance, data, split, grid, co);
      for (const auto& w : r.warnings) warnings.push_back(w);
      std::ostringstream table;
      eval::write_crossval_table(table, r);
      out.text("crossval_table.csv", table.str());
      out.doc("crossval.json", eval::report_json(r));
      std::cout << table.str() << "selected " << r.tuples[r.selected].tuple.label() << "\n";
    } else if (sub == sw) {
      auto params = run_parameters(c);
      auto inst = prepare_instance(li.instance, li.dataset ? &*li.dataset : nullptr, params, &warnings);
      eval::SweepOptions so;
      so.plan = plan_options(c);
      so.threads = c.threads;
      auto r = eval::budget_sweep(inst, parse_list(budgets_arg, "--budgets"), so);
      for (const auto& w : r.warnings) warnings.push_back(w);
      std::ostringstream csv;
      eval::write_sweep_csv(csv, r);
      out.text("sweep.csv", csv.str());
      out.doc("sweep.json", service::PlanService::sweep_payload(r));
      std::cout << csv.str();
      if (!counts_arg.empty()) {
        const auto& data = need_dataset(li);
        std::vector<eval::ScenarioCount> counts;
        std::stringstream ss(counts_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          auto colon = tok.find(':');
          eval::ScenarioCount sc;
          sc.k = std::stoi(tok.substr(0, colon));
          if (colon != std::string::npos) sc.length = std::stoi(tok.substr(colon + 1));
          counts.push_back(sc);
        }
        auto sens = eval::sensitivity_scenarios(inst, data, counts, c.seed, so);
        std::ostringstream st;
        st << "k,length,scenarios,objective,investment,operational,emissions_t,battery_kwh,solar_kw\n";
        st.precision(12);
        for (const auto& row : sens.rows)
          st << row.count.k << ',' << row.count.length << ',' << row.scenarios << ',' << row.objective << ','
             << row.investment << ',' << row.operational << ',' << row.emissions << ',' << row.battery_kwh << ','
             << row.solar_kw << '\n';
        st << "# spread objective " << sens.objective_spread << " investment " << sens.investment_spread << " operational " << sens.operational_spread
           << " emissions " << sens.emissions_spread << "\n";
        out.text("sensitivity.csv", st.str());
        std::cout << st.str();
      }
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    write_manifest(out, app, sub, args, elapsed(), warnings);
    return 0;
  } catch (const Error& e) {
    report_error(std::string(to_string(e.code())), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return 1;
  }
}
