#pragma once

// HTTP facade over plan and sweep runs: a bounded job queue, a fixed pool of solver workers and a
// file-backed result store. Job ids are content hashes of (kind, normalized request, instance), so an
// identical request is a cache hit.

#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "helios/evaluation/sweep.hpp"
#include "helios/plan/report.hpp"
#include "helios/plan/run.hpp"
#include "helios/service/store.hpp"

namespace helios::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  int max_concurrent_jobs = 2;
  int queue_capacity = 32;  // queued (not yet running) jobs before 503
  fs::path store_dir = "helios-store";
  fs::path data_dir;        // bundled instances: <data_dir>/<name>/instance.json, id = <name>
  std::string token;        // static bearer token; empty disables auth
  fs::path ui_dir;          // static files served at /ui when set
  bool autostart_workers = true;
  SolveOptions solver;
};

// 400 with the offending field.
struct RequestError : std::runtime_error {
  std::string field;
  RequestError(std::string f, const std::string& msg) : std::runtime_error(msg), field(std::move(f)) {}
};

namespace svc_detail {

inline const json& need(const json& body, const char* key) {
  if (!body.contains(key)) throw RequestError(key, std::string(key) + " is required");
  return body.at(key);
}

inline double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw RequestError(field, field + " must be a number");
  return v.get<double>();
}

inline int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw RequestError(field, field + " must be an integer");
  return v.get<int>();
}

}  // namespace svc_detail

struct JobRequest {
  std::string kind;  // "plan" or "sweep"
  std::string instance;
  RunParameters params;
  std::vector<double> budgets;  // sweeps
  std::string idempotency_key;

  json normalized() const {
    json j = {{"kind", kind}, {"instance", instance}, {"parameters", to_json_value(params)}};
    if (kind == "sweep") j["budgets"] = budgets;
    return j;
  }
};

// Strict schema: unknown fields and out-of-range values are rejected with the field name.
inline JobRequest parse_job_request(const json& body, const std::string& kind) {
  using namespace svc_detail;
  if (!body.is_object()) throw RequestError("", "request body must be a JSON object");
  static const std::vector<std::string> plan_fields = {"instance", "scenarios",        "seed",       "length",
                                                       "budget",   "gamma",            "delta",      "dro_method",
                                                       "paper_literal_ro", "idempotency_key"};
  for (const auto& [k, v] : body.items()) {
    bool known = std::find(plan_fields.begin(), plan_fields.end(), k) != plan_fields.end() ||
                 (kind == "sweep" && k == "budgets");
    if (!known) throw RequestError(k, "unknown field " + k);
  }
  JobRequest r;
  r.kind = kind;
  const json& inst = need(body, "instance");
  if (!inst.is_string() || !FileStore::valid_key(inst.get<std::string>()))
    throw RequestError("instance", "instance must be an instance id");
  r.instance = inst.get<std::string>();
  auto& p = r.params;
  if (body.contains("scenarios")) p.scenarios = integer(body["scenarios"], "scenarios");
  if (body.contains("seed")) {
    if (!body["seed"].is_number_unsigned()) throw RequestError("seed", "seed must be a nonnegative integer");
    p.seed = body["seed"].get<uint64_t>();
  }
  if (body.contains("length")) p.length = integer(body["length"], "length");
  if (body.contains("budget") && !body["budget"].is_null()) p.budget = number(body["budget"], "budget");
  if (body.contains("gamma")) {
    const json& g = body["gamma"];
    if (!g.is_array() || g.size() != 3) throw RequestError("gamma", "gamma must be [gamma_max, gamma_c, gamma_clt]");
    p.gamma.gamma_max = number(g[0], "gamma[0]");
    p.gamma.gamma_c = number(g[1], "gamma[1]");
    p.gamma.gamma_clt = number(g[2], "gamma[2]");
  }
  if (body.contains("delta")) p.delta = number(body["delta"], "delta");
  if (body.contains("paper_literal_ro")) {
    if (!body["paper_literal_ro"].is_boolean()) throw RequestError("paper_literal_ro", "paper_literal_ro must be a boolean");
    p.paper_literal_ro = body["paper_literal_ro"].get<bool>();
  }
  if (body.contains("dro_method")) {
    if (!body["dro_method"].is_string()) throw RequestError("dro_method", "dro_method must be a string");
    try {
      p.dro_method = parse_dro_method(body["dro_method"].get<std::string>());
    } catch (const Error& e) {
      throw RequestError("dro_method", e.what());
    }
  }
  if (body.contains("idempotency_key")) {
    if (!body["idempotency_key"].is_string()) throw RequestError("idempotency_key", "idempotency_key must be a string");
    r.idempotency_key = body["idempotency_key"].get<std::string>();
  }
  for (const auto& [field, msg] : check_parameters(p)) throw RequestError(field, field + " " + msg);
  if (kind == "sweep") {
    const json& b = need(body, "budgets");
    if (!b.is_array() || b.empty() || b.size() > 64) throw RequestError("budgets", "budgets must be a list of 1 to 64 numbers");
    for (size_t i = 0; i < b.size(); ++i) {
      std::string f = "budgets[" + std::to_string(i) + "]";
      double v = number(b[i], f);
      if (!(v >= 0.0) || !std::isfinite(v)) throw RequestError(f, f + " must be finite and >= 0");
      if (i > 0 && v < r.budgets.back()) throw RequestError(f, "budgets must be sorted ascending");
      r.budgets.push_back(v);
    }
  }
  return r;
}

struct StoredInstance {
  std::string id, source;
  std::string hash;  // of instance plus capacity factors
  PlanningInstance instance;
  std::optional<CapacityFactorDataset> dataset;
};

class PlanService {
 public:
  explicit PlanService(ServiceConfig cfg) : cfg_(std::move(cfg)), store_(cfg_.store_dir) {
    if (cfg_.max_concurrent_jobs < 1) fail(ErrorCode::validation, "service.max_concurrent_jobs must be >= 1");
    if (cfg_.queue_capacity < 1) fail(ErrorCode::validation, "service.queue_capacity must be >= 1");
    load_bundled();
    recover_jobs();
    routes();
    if (cfg_.autostart_workers) start_workers();
  }

  ~PlanService() { stop(); }

  void start_workers() {
    std::lock_guard lk(mu_);
    if (!workers_.empty()) return;
    for (int i = 0; i < cfg_.max_concurrent_jobs; ++i) workers_.emplace_back([this] { worker(); });
  }

  // Binds and serves until stop(). Returns false if the port cannot be bound.
  bool listen() {
    if (cfg_.port == 0) {
      port_ = http_.bind_to_any_port(cfg_.host);
      if (port_ < 0) return false;
    } else {
      if (!http_.bind_to_port(cfg_.host, cfg_.port)) return false;
      port_ = cfg_.port;
    }
    return http_.listen_after_bind();
  }

  // Serves on a background thread; returns the bound port or -1.
  int start() {
    server_thread_ = std::thread([this] { listen(); });
    for (int i = 0; i < 500 && !http_.is_running() && server_thread_.joinable(); ++i)
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    return http_.is_running() ? port_.load() : -1;
  }

  void stop() {
    {
      std::lock_guard lk(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    if (http_.is_running()) http_.stop();
    if (server_thread_.joinable()) server_thread_.join();
    for (auto& t : workers_)
      if (t.joinable()) t.join();
    workers_.clear();
  }

  int port() const { return port_; }
  int peak_running() const { return peak_running_; }
  httplib::Server& http() { return http_; }

 private:
  struct JobState {
    std::string kind, status;  // queued, running, done, failed
    int done = 0, total = 1;
  };

  // ---------- instances ----------

  static json document(const StoredInstance& si) {
    json doc = {{"instance", si.instance}};
    doc["capacity_factors"] = si.dataset ? json(*si.dataset) : json(nullptr);
    return doc;
  }

  void load_bundled() {
    std::error_code ec;
    if (cfg_.data_dir.empty() || !fs::is_directory(cfg_.data_dir, ec)) return;
    for (const auto& e : fs::directory_iterator(cfg_.data_dir)) {
      fs::path doc = e.path() / "instance.json";
      std::string id = e.path().filename().string();
      if (!fs::exists(doc, ec) || !FileStore::valid_key(id)) continue;
      auto li = io::load_instance(doc);
      auto si = std::make_shared<StoredInstance>();
      si->id = id;
      si->source = "bundled";
      si->instance = std::move(li.instance);
      si->dataset = std::move(li.dataset);
      si->hash = content_hash(document(*si));
      instances_[id] = si;
    }
  }

  std::shared_ptr<const StoredInstance> find_instance(const std::string& id) {
    std::lock_guard lk(inst_mu_);
    if (auto it = instances_.find(id); it != instances_.end()) return it->second;
    auto doc = store_.get("instances", id);
    if (!doc) return nullptr;
    auto si = std::make_shared<StoredInstance>();
    si->id = id;
    si->source = "upload";
    si->instance = decode<PlanningInstance>((*doc)["instance"], "stored instance " + id);
    if (!(*doc)["capacity_factors"].is_null())
      si->dataset = decode<CapacityFactorDataset>((*doc)["capacity_factors"], "stored instance " + id);
    si->hash = content_hash(*doc);
    instances_[id] = si;
    return si;
  }

  // ---------- jobs ----------

  void recover_jobs() {
    for (const auto& id : store_.keys("jobs")) {
      auto rec = store_.get("jobs", id);
      if (!rec) continue;
      JobState st;
      st.kind = (*rec)["kind"];
      st.status = (*rec)["status"];
      st.total = rec->value("total", 1);
      if (st.status == "queued" || st.status == "running") {
        st.status = "queued";
        pending_.push_back(id);
        (*rec)["status"] = "queued";
        store_.put("jobs", id, *rec);
      } else {
        st.done = st.total;
      }
      jobs_[id] = st;
    }
  }

  void set_status(const std::string& id, const std::string& status, const std::string& error = "") {
    auto rec = store_.get("jobs", id);
    if (!rec) return;
    (*rec)["status"] = status;
    if (!error.empty()) (*rec)["error"] = error;
    store_.put("jobs", id, *rec);
    std::lock_guard lk(mu_);
    jobs_[id].status = status;
  }

  void worker() {
    for (;;) {
      std::string id;
      {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return stopping_ || !pending_.empty(); });
        if (stopping_) return;
        id = pending_.front();
        pending_.pop_front();
        jobs_[id].status = "running";
        peak_running_ = std::max(peak_running_.load(), ++running_);
      }
      set_status(id, "running");
      try {
        run_job(id);
        set_status(id, "done");
      } catch (const Error& e) {
        set_status(id, "failed", e.what());
      } catch (const std::exception& e) {
        set_status(id, "failed", e.what());
      }
      std::lock_guard lk(mu_);
      --running_;
    }
  }

  void run_job(const std::string& id) {
    auto rec = store_.get("jobs", id);
    const json& req = (*rec)["request"];
    auto si = find_instance(req["instance"]);
    if (!si) fail(ErrorCode::not_found, "instance " + req["instance"].get<std::string>() + " no longer exists");
    RunParameters p = parse_job_request(denormalize(req), req["kind"]).params;
    std::vector<std::string> warnings;
    auto inst = prepare_instance(si->instance, si->dataset ? &*si->dataset : nullptr, p, &warnings);
    PlanOptions po;
    po.dro_method = p.dro_method;
    po.solver = cfg_.solver;
    json result;
    if (req["kind"] == "plan") {
      auto run = run_plan(inst, po);
      result = {{"summary", plan_summary(inst, run.solution, run.baseline)},
                {"prepared_instance", inst},
                {"plan", run.solution.plan},
                {"dispatch", run.solution.dispatch},
                {"objective", run.solution.objective}};
      progress(id, 1, 1);
    } else {
      eval::SweepOptions so;
      so.plan = po;
      so.progress = [this, &id](int done, int total) { progress(id, done, total); };
      auto rep = eval::budget_sweep(inst, req["budgets"].get<std::vector<double>>(), so);
      result = sweep_payload(rep);
    }
    result["warnings"] = warnings;
    store_.put("results", id, result);
  }

  void progress(const std::string& id, int done, int total) {
    std::lock_guard lk(mu_);
    jobs_[id].done = done;
    jobs_[id].total = total;
  }

  static json denormalize(const json& norm) {
    json b = norm["parameters"];
    b["instance"] = norm["instance"];
    if (b["budget"].is_null()) b.erase("budget");
    if (norm.contains("budgets")) b["budgets"] = norm["budgets"];
    return b;
  }

 public:
  // Curves carry the same numbers as the sweep CSV, which is included verbatim.
  static json sweep_payload(const eval::SweepReport& rep) {
    json pts = json::array();
    json curves = {{"budget", json::array()},     {"status", json::array()},      {"objective", json::array()},
                   {"operational", json::array()}, {"investment", json::array()},   {"npv", json::array()},
                   {"emissions_t", json::array()}, {"reduction", json::array()},    {"battery_kwh", json::array()},
                   {"solar_kw", json::array()}};
    for (const auto& p : rep.points) {
      curves["budget"].push_back(p.budget);
      curves["status"].push_back(p.ok ? "ok" : "failed");
      auto val = [&](double v) { return p.ok ? json(v) : json(nullptr); };
      curves["objective"].push_back(val(p.objective));
      curves["operational"].push_back(val(p.operational));
      curves["investment"].push_back(val(p.investment));
      curves["npv"].push_back(val(p.npv));
      curves["emissions_t"].push_back(val(p.emissions));
      curves["reduction"].push_back(val(p.reduction));
      curves["battery_kwh"].push_back(val(p.battery_kwh));
      curves["solar_kw"].push_back(val(p.solar_kw));
      json pt = {{"budget", p.budget}, {"ok", p.ok}, {"battery_by_year", p.battery_by_year}, {"solar_by_year", p.solar_by_year}};
      if (!p.ok) pt["error"] = p.error;
      pts.push_back(pt);
    }
    std::ostringstream csv;
    eval::write_sweep_csv(csv, rep);
    return {{"curves", curves},
            {"points", pts},
            {"baseline_operational", rep.baseline_operational},
            {"baseline_emissions_t", rep.baseline_emissions},
            {"shape",
             {{"operational_nonincreasing", rep.shape.operational_nonincreasing},
              {"objective_nonincreasing", rep.shape.objective_nonincreasing},
              {"diminishing_reduction", rep.shape.diminishing_reduction},
              {"interior_npv_max", rep.shape.interior_npv_max},
              {"npv_argmax", rep.shape.npv_argmax}}},
            {"sweep_warnings", rep.warnings},
            {"csv", csv.str()}};
  }

 private:
  // ---------- HTTP ----------

  static void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& code, const std::string& msg,
                         const std::string& field = "") {
    json b = {{"error", code}, {"message", msg}};
    if (!field.empty()) b["field"] = field;
    send(res, status, b);
  }

  json job_view(const std::string& id, const JobState& st) {
    auto rec = store_.get("jobs", id);
    json v = {{"id", id},
              {"kind", st.kind},
              {"status", st.status},
              {"progress", {{"done", st.done}, {"total", st.total}}},
              {"request", (*rec)["request"]}};
    if (rec->contains("error")) v["error"] = (*rec)["error"];
    if (st.status == "done") {
      auto result = result_of(id);
      if (st.kind == "plan") {
        v["result"] = (*result)["summary"];
        v["result"]["warnings"] = (*result)["warnings"];
      } else {
        v["result"] = *result;
      }
    }
    return v;
  }

  std::shared_ptr<const json> result_of(const std::string& id) {
    std::lock_guard lk(cache_mu_);
    if (auto it = results_.find(id); it != results_.end()) return it->second;
    auto doc = store_.get("results", id);
    if (!doc) fail(ErrorCode::not_found, "result " + id + " missing from the store");
    if (results_.size() >= 8) results_.clear();
    auto p = std::make_shared<const json>(std::move(*doc));
    results_[id] = p;
    return p;
  }

  void submit(const httplib::Request& rq, httplib::Response& res, const std::string& kind) {
    json body;
    try {
      body = json::parse(rq.body);
    } catch (const json::parse_error& e) {
      return send_error(res, 400, "ParseError", e.what());
    }
    JobRequest jr;
    try {
      jr = parse_job_request(body, kind);
    } catch (const RequestError& e) {
      return send_error(res, 400, "ValidationError", e.what(), e.field);
    }
    if (rq.has_header("Idempotency-Key")) jr.idempotency_key = rq.get_header_value("Idempotency-Key");
    auto si = find_instance(jr.instance);
    if (!si) return send_error(res, 400, "ValidationError", "unknown instance " + jr.instance, "instance");
    json norm = jr.normalized();
    json keyed = {{"request", norm}, {"instance_hash", si->hash}};
    const std::string id = content_hash(keyed).substr(0, 32);

    std::unique_lock lk(mu_);
    if (!jr.idempotency_key.empty()) {
      std::string ik = sha256_hex(jr.idempotency_key).substr(0, 32);
      if (auto prev = store_.get("idempotency", ik)) {
        if ((*prev)["job"] != id)
          return send_error(res, 409, "Conflict", "idempotency key already used for a different request", "idempotency_key");
      } else {
        store_.put("idempotency", ik, {{"job", id}});
      }
    }
    if (auto it = jobs_.find(id); it != jobs_.end()) {
      const bool done = it->second.status == "done" || it->second.status == "failed";
      return send(res, done ? 200 : 202, {{"id", id}, {"status", it->second.status}, {"cache_hit", true}});
    }
    if (static_cast<int>(pending_.size()) >= cfg_.queue_capacity)
      return send_error(res, 503, "QueueFull", "job queue is full; retry later");
    int total = kind == "sweep" ? static_cast<int>(jr.budgets.size()) : 1;
    store_.put("jobs", id, {{"id", id}, {"kind", kind}, {"status", "queued"}, {"request", norm}, {"total", total}});
    jobs_[id] = JobState{kind, "queued", 0, total};
    pending_.push_back(id);
    lk.unlock();
    cv_.notify_one();
    send(res, 202, {{"id", id}, {"status", "queued"}, {"cache_hit", false}});
  }

  void get_job(const httplib::Request& rq, httplib::Response& res, const std::string& kind) {
    const std::string id = rq.matches[1];
    JobState st;
    {
      std::lock_guard lk(mu_);
      auto it = jobs_.find(id);
      if (it == jobs_.end() || it->second.kind != kind) return send_error(res, 404, "NotFound", "unknown " + kind + " " + id);
      st = it->second;
    }
    send(res, 200, job_view(id, st));
  }

  void get_dispatch(const httplib::Request& rq, httplib::Response& res) {
    const std::string id = rq.matches[1];
    {
      std::lock_guard lk(mu_);
      auto it = jobs_.find(id);
      if (it == jobs_.end() || it->second.kind != "plan") return send_error(res, 404, "NotFound", "unknown plan " + id);
      if (it->second.status != "done")
        return send_error(res, 409, "NotReady", "plan " + id + " is " + it->second.status);
    }
    auto result = result_of(id);
    const json& prepared = (*result)["prepared_instance"];
    const auto& dims = (*result)["summary"]["dimensions"];
    auto param = [&](const char* name, int lo, int hi, std::optional<int> dflt) {
      if (!rq.has_param(name)) {
        if (dflt) return *dflt;
        throw RequestError(name, std::string(name) + " is required");
      }
      int v = 0;
      std::string s = rq.get_param_value(name);
      if (!io::csv_detail::parse_num(std::string_view(s), v) || v < lo || v > hi)
        throw RequestError(name, std::string(name) + " must be an integer in " + std::to_string(lo) + ".." + std::to_string(hi));
      return v;
    };
    int d, m, y, page, size;
    try {
      d = param("scenario", 0, dims["scenarios"].get<int>() - 1, std::nullopt);
      m = param("month", 1, dims["months"].get<int>(), std::nullopt);
      y = param("year", 1, dims["years"].get<int>(), 1);
      page = param("page", 1, 1 << 20, 1);
      size = param("page_size", 1, 10000, dims["hours"].get<int>());
    } catch (const RequestError& e) {
      return send_error(res, 400, "ValidationError", e.what(), e.field);
    }
    PlanSolution sol;
    sol.plan = (*result)["plan"].get<InvestmentPlan>();
    sol.dispatch = (*result)["dispatch"].get<DispatchSchedule>();
    auto inst = prepared.get<PlanningInstance>();
    json slice = dispatch_slice(inst, sol, d, m - 1, y - 1);
    json rows = slice["rows"];
    const int total = static_cast<int>(rows.size());
    json page_rows = json::array();
    for (int i = (page - 1) * size; i < std::min(total, page * size); ++i) page_rows.push_back(rows[i]);
    slice["rows"] = page_rows;
    slice["page"] = page;
    slice["page_size"] = size;
    slice["total_rows"] = total;
    send(res, 200, slice);
  }

  void post_instance(const httplib::Request& rq, httplib::Response& res) {
    json body;
    try {
      body = json::parse(rq.body);
    } catch (const json::parse_error& e) {
      return send_error(res, 400, "ParseError", e.what());
    }
    io::LoadedInstance li;
    try {
      // Uploads are self-contained: file references are not resolved.
      if ((body.contains("demand") && body["demand"].contains("file")) ||
          (body.contains("capacity_factors") && body["capacity_factors"].contains("file")))
        throw RequestError("demand", "uploads must inline demand and capacity factors");
      li = io::load_instance_document(body, fs::path(), "upload");
    } catch (const RequestError& e) {
      return send_error(res, 400, "ValidationError", e.what(), e.field);
    } catch (const Error& e) {
      return send_error(res, 400, std::string(to_string(e.code())), e.what());
    }
    json doc = {{"instance", li.instance}};
    doc["capacity_factors"] = li.dataset ? json(*li.dataset) : json(nullptr);
    const std::string id = content_hash(doc).substr(0, 32);
    bool existed = false;
    {
      std::lock_guard lk(inst_mu_);
      existed = instances_.count(id) || store_.contains("instances", id);
      if (!existed) store_.put("instances", id, doc);
    }
    send(res, existed ? 200 : 201, {{"id", id}, {"name", li.instance.name}, {"warnings", li.warnings}});
  }

  void list_instances(httplib::Response& res) {
    std::vector<std::string> ids = store_.keys("instances");
    {
      std::lock_guard lk(inst_mu_);
      for (const auto& [id, si] : instances_)
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    json out = json::array();
    for (const auto& id : ids) {
      auto si = find_instance(id);
      if (!si) continue;
      out.push_back({{"id", id},
                     {"name", si->instance.name},
                     {"source", si->source},
                     {"sites", si->instance.sites()},
                     {"years", si->instance.years()},
                     {"budget", si->instance.costs.budget},
                     {"capacity_factor_days", si->dataset ? si->dataset->day_count() : 0},
                     {"has_scenarios", si->instance.scenarios.has_value()}});
    }
    send(res, 200, {{"instances", out}});
  }

  void routes() {
    auto& s = http_;
    s.set_pre_routing_handler([this](const httplib::Request& rq, httplib::Response& res) {
      if (cfg_.token.empty() || rq.path.rfind("/v1/", 0) != 0) return httplib::Server::HandlerResponse::Unhandled;
      if (rq.get_header_value("Authorization") == "Bearer " + cfg_.token) return httplib::Server::HandlerResponse::Unhandled;
      send_error(res, 401, "Unauthorized", "missing or wrong bearer token");
      return httplib::Server::HandlerResponse::Handled;
    });
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const Error& e) {
        send_error(res, e.code() == ErrorCode::not_found ? 404 : 500, std::string(to_string(e.code())), e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
      }
    });
    s.Post("/v1/plans", [this](const httplib::Request& rq, httplib::Response& res) { submit(rq, res, "plan"); });
    s.Post("/v1/sweeps", [this](const httplib::Request& rq, httplib::Response& res) { submit(rq, res, "sweep"); });
    s.Get(R"(/v1/plans/([A-Za-z0-9_-]+))",
          [this](const httplib::Request& rq, httplib::Response& res) { get_job(rq, res, "plan"); });
    s.Get(R"(/v1/sweeps/([A-Za-z0-9_-]+))",
          [this](const httplib::Request& rq, httplib::Response& res) { get_job(rq, res, "sweep"); });
    s.Get(R"(/v1/plans/([A-Za-z0-9_-]+)/dispatch)",
          [this](const httplib::Request& rq, httplib::Response& res) { get_dispatch(rq, res); });
    s.Get("/v1/instances", [this](const httplib::Request&, httplib::Response& res) { list_instances(res); });
    s.Post("/v1/instances", [this](const httplib::Request& rq, httplib::Response& res) { post_instance(rq, res); });
    s.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lk(mu_);
      send(res, 200,
           {{"status", "ok"},
            {"queued", pending_.size()},
            {"running", running_},
            {"max_concurrent_jobs", cfg_.max_concurrent_jobs},
            {"queue_capacity", cfg_.queue_capacity}});
    });
    std::error_code ec;
    if (!cfg_.ui_dir.empty() && fs::is_directory(cfg_.ui_dir, ec)) s.set_mount_point("/ui", cfg_.ui_dir.string());
  }

  ServiceConfig cfg_;
  FileStore store_;
  httplib::Server http_;
  std::thread server_thread_;
  std::atomic<int> port_{-1};

  std::mutex mu_;  // jobs_, pending_, running_, stopping_
  std::condition_variable cv_;
  std::map<std::string, JobState> jobs_;
  std::deque<std::string> pending_;
  int running_ = 0;
  std::atomic<int> peak_running_{0};
  bool stopping_ = false;
  std::vector<std::thread> workers_;

  std::mutex inst_mu_;
  std::map<std::string, std::shared_ptr<const StoredInstance>> instances_;
  std::mutex cache_mu_;
  std::map<std::string, std::shared_ptr<const json>> results_;
};

}  // namespace helios::service
