#include <gtest/gtest.h>
#include <unistd.h>

#include <chrono>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "helios/plan/run.hpp"
#include "helios/service/plan_service.hpp"

using namespace helios;
using helios::service::PlanService;
using helios::service::ServiceConfig;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("helios_svc_" + std::to_string(getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

ServiceConfig config(const std::string& name) {
  ServiceConfig c;
  c.port = 0;
  c.store_dir = scratch(name);
  c.data_dir = "";
  return c;
}

struct Reply {
  int status = 0;
  json body;
};

class Api {
 public:
  explicit Api(int port, std::string token = "") : cli_("127.0.0.1", port), token_(std::move(token)) {
    cli_.set_read_timeout(120, 0);
  }
  Reply get(const std::string& path) { return wrap(cli_.Get(path, headers())); }
  Reply post(const std::string& path, const json& body, const std::string& idem = "") {
    auto h = headers();
    if (!idem.empty()) h.emplace("Idempotency-Key", idem);
    return wrap(cli_.Post(path, h, body.dump(), "application/json"));
  }
  Reply post_raw(const std::string& path, const std::string& body) {
    return wrap(cli_.Post(path, headers(), body, "application/json"));
  }

  // Polls a job until it leaves queued/running.
  Reply wait(const std::string& path, double seconds = 300.0) {
    auto t0 = std::chrono::steady_clock::now();
    for (;;) {
      Reply r = get(path);
      if (r.status != 200) return r;
      std::string s = r.body["status"];
      if (s == "done" || s == "failed") return r;
      if (std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > seconds) return r;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }

 private:
  httplib::Headers headers() const {
    httplib::Headers h;
    if (!token_.empty()) h.emplace("Authorization", "Bearer " + token_);
    return h;
  }
  static Reply wrap(const httplib::Result& r) {
    Reply out;
    if (!r) return out;
    out.status = r->status;
    out.body = r->body.empty() ? json() : json::parse(r->body, nullptr, false);
    return out;
  }
  httplib::Client cli_;
  std::string token_;
};

json toy_document(double budget = 2.0e5) {
  auto inst = fixtures::toy_instance();
  inst.costs.budget = budget;
  return json(inst);
}

std::string upload(Api& api, const json& doc = toy_document()) {
  Reply r = api.post("/v1/instances", doc);
  EXPECT_TRUE(r.status == 201 || r.status == 200) << r.body.dump();
  return r.body["id"];
}

}  // namespace

TEST(PlanService, HealthAndInstanceUpload) {
  PlanService svc(config("upload"));
  Api api(svc.start());
  EXPECT_EQ(api.get("/v1/health").body["status"], "ok");

  Reply first = api.post("/v1/instances", toy_document());
  ASSERT_EQ(first.status, 201) << first.body.dump();
  Reply again = api.post("/v1/instances", toy_document());
  EXPECT_EQ(again.status, 200);
  EXPECT_EQ(first.body["id"], again.body["id"]);

  Reply list = api.get("/v1/instances");
  ASSERT_EQ(list.status, 200);
  ASSERT_EQ(list.body["instances"].size(), 1u);
  EXPECT_EQ(list.body["instances"][0]["id"], first.body["id"]);
  EXPECT_EQ(list.body["instances"][0]["sites"], 2);
  EXPECT_TRUE(list.body["instances"][0]["has_scenarios"].get<bool>());
}

TEST(PlanService, UploadErrors) {
  PlanService svc(config("upload_err"));
  Api api(svc.start());
  EXPECT_EQ(api.post_raw("/v1/instances", "{not json").status, 400);

  json doc = toy_document();
  doc["demand"] = {{"file", "/etc/passwd"}};
  Reply r = api.post("/v1/instances", doc);
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["field"], "demand");

  doc = toy_document();
  doc["network"]["arcs"][0]["efficiency"] = 1.5;
  r = api.post("/v1/instances", doc);
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"], "ValidationError");
}

TEST(PlanService, InvalidParametersNameTheField) {
  auto cfg = config("params");
  cfg.autostart_workers = false;
  PlanService svc(cfg);
  Api api(svc.start());
  std::string id = upload(api);

  struct Case {
    json body;
    std::string field;
  };
  std::vector<Case> cases = {
      {{{"instance", id}, {"gamma", {-1.0, 0.0, 0.0}}}, "gamma[0]"},
      {{{"instance", id}, {"gamma", {0.0, 0.0, -0.5}}}, "gamma[2]"},
      {{{"instance", id}, {"gamma", {0.0, 0.0}}}, "gamma"},
      {{{"instance", id}, {"delta", -0.1}}, "delta"},
      {{{"instance", id}, {"budget", -5.0}}, "budget"},
      {{{"instance", id}, {"scenarios", 0}}, "scenarios"},
      {{{"instance", id}, {"length", 4}}, "length"},
      {{{"instance", id}, {"dro_method", "magic"}}, "dro_method"},
      {{{"instance", id}, {"gama", {1, 1, 1}}}, "gama"},
      {{{"instance", "nope"}}, "instance"},
      {json::object(), "instance"},
  };
  for (const auto& c : cases) {
    Reply r = api.post("/v1/plans", c.body);
    EXPECT_EQ(r.status, 400) << c.body.dump();
    EXPECT_EQ(r.body.value("field", ""), c.field) << r.body.dump();
  }
  Reply r = api.post("/v1/sweeps", {{"instance", id}, {"budgets", {0.0, 2.0, 1.0}}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["field"], "budgets[2]");
  r = api.post("/v1/sweeps", {{"instance", id}});
  EXPECT_EQ(r.body["field"], "budgets");
}

TEST(PlanService, PlanLifecycleAndDispatch) {
  PlanService svc(config("plan"));
  Api api(svc.start());
  std::string inst = upload(api);

  Reply sub = api.post("/v1/plans", {{"instance", inst}, {"budget", 2.0e5}});
  ASSERT_EQ(sub.status, 202) << sub.body.dump();
  const std::string id = sub.body["id"];
  Reply done = api.wait("/v1/plans/" + id);
  ASSERT_EQ(done.body["status"], "done") << done.body.dump();
  const json& res = done.body["result"];
  EXPECT_EQ(res["dimensions"]["hours"], 24);
  EXPECT_GT(res["npv"]["npv"].get<double>(), 0.0);
  EXPECT_EQ(done.body["progress"]["done"], 1);

  // Same numbers as a local solve of the same request.
  auto p = RunParameters{};
  p.budget = 2.0e5;
  auto local = run_plan(prepare_instance(fixtures::toy_instance(), nullptr, p), {});
  EXPECT_NEAR(res["objective"].get<double>(), local.solution.objective, 1e-9 * std::abs(local.solution.objective));

  Reply slice = api.get("/v1/plans/" + id + "/dispatch?scenario=1&month=1");
  ASSERT_EQ(slice.status, 200) << slice.body.dump();
  ASSERT_EQ(slice.body["rows"].size(), 24u);
  EXPECT_EQ(slice.body["total_rows"], 24);
  for (const auto& row : slice.body["rows"])
    for (const auto& s : row["sites"]) EXPECT_GE(s["balance_residual"].get<double>(), -1e-5) << row.dump();

  Reply page = api.get("/v1/plans/" + id + "/dispatch?scenario=0&month=1&page=3&page_size=10");
  ASSERT_EQ(page.status, 200);
  ASSERT_EQ(page.body["rows"].size(), 4u);
  EXPECT_EQ(page.body["rows"][0]["hour"], 21);

  for (const auto& [q, field] : std::vector<std::pair<std::string, std::string>>{
           {"scenario=2&month=1", "scenario"}, {"scenario=0&month=0", "month"}, {"month=1", "scenario"},
           {"scenario=0&month=1&year=2", "year"}, {"scenario=x&month=1", "scenario"}}) {
    Reply bad = api.get("/v1/plans/" + id + "/dispatch?" + q);
    EXPECT_EQ(bad.status, 400) << q;
    EXPECT_EQ(bad.body["field"], field) << q;
  }
}

TEST(PlanService, ZeroBudgetPlanHasZeroNpv) {
  PlanService svc(config("zero"));
  Api api(svc.start());
  std::string inst = upload(api);
  Reply sub = api.post("/v1/plans", {{"instance", inst}, {"budget", 0.0}});
  ASSERT_EQ(sub.status, 202);
  Reply done = api.wait("/v1/plans/" + sub.body["id"].get<std::string>());
  ASSERT_EQ(done.body["status"], "done");
  EXPECT_NEAR(done.body["result"]["npv"]["npv"].get<double>(), 0.0, 1e-6);
  EXPECT_NEAR(done.body["result"]["emissions"]["reduction"].get<double>(), 0.0, 1e-9);
}

TEST(PlanService, UnknownIdsAre404) {
  PlanService svc(config("404"));
  Api api(svc.start());
  EXPECT_EQ(api.get("/v1/plans/doesnotexist").status, 404);
  EXPECT_EQ(api.get("/v1/sweeps/doesnotexist").status, 404);
  EXPECT_EQ(api.get("/v1/plans/doesnotexist/dispatch?scenario=0&month=1").status, 404);

  std::string inst = upload(api);
  Reply sub = api.post("/v1/plans", {{"instance", inst}});
  ASSERT_EQ(sub.status, 202);
  EXPECT_EQ(api.get("/v1/sweeps/" + sub.body["id"].get<std::string>()).status, 404);
}

TEST(PlanService, IdempotentSubmission) {
  auto cfg = config("idem");
  cfg.autostart_workers = false;
  PlanService svc(cfg);
  Api api(svc.start());
  std::string inst = upload(api);

  json body = {{"instance", inst}, {"budget", 1.0e5}};
  Reply a = api.post("/v1/plans", body, "key-1");
  Reply b = api.post("/v1/plans", body, "key-1");
  ASSERT_EQ(a.status, 202);
  EXPECT_EQ(b.status, 202);
  EXPECT_EQ(a.body["id"], b.body["id"]);
  EXPECT_FALSE(a.body["cache_hit"].get<bool>());
  EXPECT_TRUE(b.body["cache_hit"].get<bool>());

  // Defaults spelled out hash to the same job.
  json spelled = body;
  spelled["gamma"] = {0.0, 0.0, 0.0};
  spelled["seed"] = 1;
  EXPECT_EQ(api.post("/v1/plans", spelled).body["id"], a.body["id"]);

  json other = {{"instance", inst}, {"budget", 3.0e5}};
  Reply c = api.post("/v1/plans", other, "key-1");
  EXPECT_EQ(c.status, 409);
  EXPECT_EQ(c.body["error"], "Conflict");

  // The idempotency key may also travel in the body.
  json with_key = other;
  with_key["idempotency_key"] = "key-2";
  Reply d = api.post("/v1/plans", with_key);
  EXPECT_EQ(d.status, 202);
  EXPECT_NE(d.body["id"], a.body["id"]);

  // Dispatch is not available until the plan is done.
  EXPECT_EQ(api.get("/v1/plans/" + a.body["id"].get<std::string>() + "/dispatch?scenario=0&month=1").status, 409);
  EXPECT_EQ(api.get("/v1/plans/" + a.body["id"].get<std::string>()).body["status"], "queued");
}

TEST(PlanService, FullQueueReturns503) {
  auto cfg = config("queue");
  cfg.autostart_workers = false;
  cfg.queue_capacity = 2;
  PlanService svc(cfg);
  Api api(svc.start());
  std::string inst = upload(api);
  EXPECT_EQ(api.post("/v1/plans", {{"instance", inst}, {"budget", 1.0}}).status, 202);
  EXPECT_EQ(api.post("/v1/plans", {{"instance", inst}, {"budget", 2.0}}).status, 202);
  Reply full = api.post("/v1/plans", {{"instance", inst}, {"budget", 3.0}});
  EXPECT_EQ(full.status, 503);
  EXPECT_EQ(full.body["error"], "QueueFull");
  // A resubmission of a queued job is not a new job.
  EXPECT_EQ(api.post("/v1/plans", {{"instance", inst}, {"budget", 1.0}}).status, 202);
}

TEST(PlanService, ConcurrencyIsBounded) {
  auto cfg = config("bounded");
  cfg.autostart_workers = false;
  cfg.max_concurrent_jobs = 2;
  PlanService svc(cfg);
  Api api(svc.start());
  std::string inst = upload(api);
  std::vector<std::string> ids;
  for (int i = 0; i < 5; ++i) {
    Reply r = api.post("/v1/plans", {{"instance", inst}, {"budget", 1.0e4 * (i + 1)}});
    ASSERT_EQ(r.status, 202);
    ids.push_back(r.body["id"]);
  }
  svc.start_workers();
  for (const auto& id : ids) EXPECT_EQ(api.wait("/v1/plans/" + id).body["status"], "done");
  EXPECT_GE(svc.peak_running(), 1);
  EXPECT_LE(svc.peak_running(), 2);
}

TEST(PlanService, SweepMatchesLocalCsv) {
  PlanService svc(config("sweep"));
  Api api(svc.start());
  std::string inst = upload(api);
  std::vector<double> budgets = {0.0, 1.0e5, 2.0e5};
  Reply sub = api.post("/v1/sweeps", {{"instance", inst}, {"budgets", budgets}});
  ASSERT_EQ(sub.status, 202);
  Reply done = api.wait("/v1/sweeps/" + sub.body["id"].get<std::string>());
  ASSERT_EQ(done.body["status"], "done") << done.body.dump();
  EXPECT_EQ(done.body["progress"]["done"], 3);
  EXPECT_EQ(done.body["progress"]["total"], 3);

  auto prepared = prepare_instance(fixtures::toy_instance(), nullptr, RunParameters{});
  auto rep = eval::budget_sweep(prepared, budgets, {});
  std::ostringstream csv;
  eval::write_sweep_csv(csv, rep);
  EXPECT_EQ(done.body["result"]["csv"], csv.str());
  EXPECT_NEAR(done.body["result"]["curves"]["npv"][0].get<double>(), 0.0, 1e-6);
  EXPECT_EQ(done.body["result"]["curves"]["budget"].size(), 3u);
}

TEST(PlanService, JobsSurviveRestart) {
  auto cfg = config("restart");
  std::string queued, finished;
  {
    PlanService svc(cfg);
    Api api(svc.start());
    std::string inst = upload(api);
    Reply a = api.post("/v1/plans", {{"instance", inst}, {"budget", 5.0e4}});
    finished = a.body["id"];
    ASSERT_EQ(api.wait("/v1/plans/" + finished).body["status"], "done");
  }
  {
    auto paused = cfg;
    paused.autostart_workers = false;
    PlanService svc(paused);
    Api api(svc.start());
    std::string inst = api.get("/v1/instances").body["instances"][0]["id"];
    Reply b = api.post("/v1/plans", {{"instance", inst}, {"budget", 7.0e4}});
    ASSERT_EQ(b.status, 202);
    queued = b.body["id"];
    Reply again = api.get("/v1/plans/" + finished);
    EXPECT_EQ(again.body["status"], "done");
    EXPECT_TRUE(again.body.contains("result"));
  }
  PlanService svc(cfg);
  Api api(svc.start());
  EXPECT_EQ(api.wait("/v1/plans/" + queued).body["status"], "done");
  Reply cached = api.post("/v1/plans", {{"instance", api.get("/v1/instances").body["instances"][0]["id"]}, {"budget", 5.0e4}});
  EXPECT_EQ(cached.status, 200);
  EXPECT_TRUE(cached.body["cache_hit"].get<bool>());
  EXPECT_EQ(cached.body["id"], finished);
}

TEST(PlanService, BearerToken) {
  auto cfg = config("token");
  cfg.token = "s3cret";
  PlanService svc(cfg);
  int port = svc.start();
  Api anon(port), wrong(port, "nope"), ok(port, "s3cret");
  EXPECT_EQ(anon.get("/v1/health").status, 401);
  EXPECT_EQ(wrong.get("/v1/instances").status, 401);
  EXPECT_EQ(ok.get("/v1/health").status, 200);
}

TEST(PlanService, BundledInstancesAreListed) {
  auto cfg = config("bundled");
  cfg.data_dir = HELIOS_DATA_DIR;
  cfg.autostart_workers = false;
  PlanService svc(cfg);
  Api api(svc.start());
  Reply list = api.get("/v1/instances");
  ASSERT_EQ(list.status, 200);
  bool found = false;
  for (const auto& i : list.body["instances"])
    if (i["id"] == "example") {
      found = true;
      EXPECT_EQ(i["source"], "bundled");
      EXPECT_GT(i["capacity_factor_days"].get<int>(), 0);
    }
  EXPECT_TRUE(found);
}
