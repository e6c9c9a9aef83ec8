#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>

#include "fixtures.hpp"
#include "helios/core/json.hpp"
#include "helios/io/instance_io.hpp"

using namespace helios;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out, err;
};

fs::path workdir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("helios_cli_" + std::to_string(getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Outcome cli(const fs::path& dir, const std::string& args, const std::string& env = "") {
  const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" + HELIOS_CLI + "' " + args + " > out.txt 2> err.txt";
  Outcome r;
  int st = std::system(cmd.c_str());
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.out = io::read_text(dir / "out.txt");
  r.err = io::read_text(dir / "err.txt");
  return r;
}

json error_line(const Outcome& r) {
  auto nl = r.err.rfind('\n', r.err.size() - 2);
  return json::parse(r.err.substr(nl == std::string::npos ? 0 : nl + 1));
}

// Toy instance with scenarios inline; optionally bell-shaped capacity factors for site A.
fs::path write_toy(const fs::path& dir, bool with_factors = false) {
  json doc = fixtures::toy_instance();
  if (with_factors) {
    CapacityFactorDataset ds;
    ds.sites = {"A"};
    for (int i = 0; i < 8; ++i) {
      CapacityFactorDay d{"2024-01-" + std::to_string(10 + i), 0, std::vector<double>(24, 0.0)};
      for (int h = 6; h < 19; ++h) d.values[h] = (0.5 + 0.05 * i) * std::sin(M_PI * (h - 6) / 12.0);
      ds.days.push_back(d);
    }
    doc["capacity_factors"] = ds;
  }
  io::write_text(dir / "toy.json", doc.dump());
  return dir / "toy.json";
}

json read_json(const fs::path& p) { return json::parse(io::read_text(p)); }

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  auto dir = workdir("help");
  EXPECT_EQ(cli(dir, "--help").code, 0);
  EXPECT_EQ(cli(dir, "plan --help").code, 0);
  Outcome none = cli(dir, "");
  EXPECT_EQ(none.code, 1);
  Outcome bad = cli(dir, "plan --instance x.json --frobnicate");
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(error_line(bad)["error"], "UsageError");
  EXPECT_EQ(cli(dir, "plan --instance x.json --gamma 1 2").code, 1);
}

TEST(Cli, PlanWritesOutputsAndManifest) {
  auto dir = workdir("plan");
  write_toy(dir);
  Outcome r = cli(dir, "plan --instance toy.json --budget 1e5 --out-dir out");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"plan.json", "plan-solution.json", "investment.csv", "run-manifest.json"})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  auto plan = read_json(dir / "out/plan.json");
  EXPECT_EQ(plan["parameters"]["budget"], 1e5);
  EXPECT_GT(plan["npv"]["investment"].get<double>(), 0.0);
  auto m = read_json(dir / "out/run-manifest.json");
  EXPECT_EQ(m["command"], "plan");
  EXPECT_NE(m["config"].get<std::string>().find("budget"), std::string::npos);
  EXPECT_EQ(m["outputs"].size(), 3u);
  EXPECT_EQ(m["versions"]["schema"], kSchemaVersion);
  EXPECT_EQ(io::read_text(dir / "out/investment.csv").substr(0, 31), "site,year,battery_kwh,solar_kw\n");
}

TEST(Cli, ZeroBudgetPlanHasZeroNpv) {
  auto dir = workdir("zero");
  write_toy(dir);
  Outcome r = cli(dir, "plan --instance toy.json --budget 0 --out-dir out");
  ASSERT_EQ(r.code, 0) << r.err;
  auto plan = read_json(dir / "out/plan.json");
  EXPECT_NEAR(plan["npv"]["npv"].get<double>(), 0.0, 1e-6);
  EXPECT_NEAR(plan["npv"]["investment"].get<double>(), 0.0, 1e-6);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  auto dir = workdir("config");
  write_toy(dir);
  io::write_text(dir / "run.toml", "[plan]\ninstance = \"toy.json\"\nbudget = 0\ndelta = 0.01\nout-dir = \"cfg\"\n");
  Outcome r = cli(dir, "--config run.toml plan --budget 5e4");
  ASSERT_EQ(r.code, 0) << r.err;
  auto plan = read_json(dir / "cfg/plan.json");
  EXPECT_EQ(plan["parameters"]["budget"], 5e4);
  EXPECT_EQ(plan["parameters"]["delta"], 0.01);
}

TEST(Cli, ErrorsAreJsonWithExitCodes) {
  auto dir = workdir("errors");
  write_toy(dir);
  Outcome neg = cli(dir, "plan --instance toy.json --gamma -1 0 0");
  EXPECT_EQ(neg.code, 1);
  EXPECT_EQ(error_line(neg)["error"], "ValidationError");

  Outcome missing = cli(dir, "plan --instance nope.json");
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(error_line(missing)["error"], "ParseError");

  io::write_text(dir / "bad.json", "{\n  \"schema_version\": 1,\n  oops\n}\n");
  Outcome syntax = cli(dir, "plan --instance bad.json");
  EXPECT_EQ(syntax.code, 1);
  EXPECT_NE(error_line(syntax)["message"].get<std::string>().find("bad.json:3"), std::string::npos);

  Outcome backend = cli(dir, "plan --instance toy.json", "HELIOS_SOLVER=nosuch");
  EXPECT_EQ(backend.code, 2);
  EXPECT_EQ(error_line(backend)["error"], "BackendUnavailable");

  Outcome nodata = cli(dir, "reduce --instance toy.json");
  EXPECT_EQ(nodata.code, 1);
}

TEST(Cli, SweepAndCrossValidation) {
  auto dir = workdir("sweep");
  write_toy(dir, true);
  Outcome s = cli(dir, "sweep --instance toy.json --scenarios 2 --budgets 0,5e4,1e5 --out-dir sw");
  ASSERT_EQ(s.code, 0) << s.err;
  auto csv = io::read_text(dir / "sw/sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(read_json(dir / "sw/sweep.json")["csv"], csv);
  EXPECT_EQ(cli(dir, "sweep --instance toy.json --budgets 0,x").code, 1);

  Outcome c = cli(dir,
              "crossval --instance toy.json --scenarios 2 --train 4 --validation 2 --test 2 --repetitions 2 "
              "--gammas 0:0:0,1:0:0 --deltas 0,0.1 --out-dir cv");
  ASSERT_EQ(c.code, 0) << c.err;
  auto rep = read_json(dir / "cv/crossval.json");
  EXPECT_EQ(rep["tuples"].size(), 4u);
  EXPECT_TRUE(fs::exists(dir / "cv/crossval_table.csv"));
  Outcome few = cli(dir, "crossval --instance toy.json --train 7 --validation 2 --test 2 --repetitions 1 --out-dir cv2");
  EXPECT_EQ(few.code, 1);
  EXPECT_EQ(error_line(few)["error"], "InsufficientDays");
}

TEST(Cli, ReduceAndReplay) {
  auto dir = workdir("replay");
  write_toy(dir, true);
  Outcome r = cli(dir, "reduce --instance toy.json --scenarios 3 --out-dir red");
  ASSERT_EQ(r.code, 0) << r.err;
  auto sc = read_json(dir / "red/scenarios.json");
  EXPECT_EQ(sc["scenarios"]["scenarios"], 3);
  EXPECT_TRUE(fs::exists(dir / "red/scenario_weights.csv"));

  ASSERT_EQ(cli(dir, "plan --instance toy.json --scenarios 2 --out-dir p").code, 0);
  Outcome rp = cli(dir, "replay --instance toy.json --scenarios 2 --plan p/plan-solution.json --days 3 --out-dir rp");
  ASSERT_EQ(rp.code, 0) << rp.err;
  auto days = io::read_text(dir / "rp/replay_days.csv");
  EXPECT_EQ(std::count(days.begin(), days.end(), '\n'), 4);
  auto acts = io::read_text(dir / "rp/replay_actions.csv");
  EXPECT_EQ(acts.rfind("day,hour,site,action,value\n", 0), 0u);
}

TEST(Cli, GenerateIsDeterministic) {
  auto dir = workdir("gen");
  ASSERT_EQ(cli(dir, "generate --out-dir a --years 2 --days-per-month 3 --seed 4").code, 0);
  ASSERT_EQ(cli(dir, "generate --out-dir b --years 2 --days-per-month 3 --seed 4").code, 0);
  for (const char* f : {"instance.json", "demand.csv", "capacity_factors.csv"})
    EXPECT_EQ(io::read_text(dir / "a" / f), io::read_text(dir / "b" / f)) << f;
  auto li = io::load_instance(dir / "a/instance.json");
  EXPECT_EQ(li.instance.years(), 2);
  EXPECT_EQ(li.dataset->day_count(), 36);
}
