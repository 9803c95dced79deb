// SPDX-License-Identifier: Apache-2.0

#include "nrp/service.hpp"

#include <httplib.h>

#include <charconv>
#include <stdexcept>

#include "nrp/encoder.hpp"
#include "nrp/io.hpp"
#include "nrp/staffing.hpp"

namespace nrp {

using nlohmann::json;

void parse_listen_address(const std::string& text, ServiceConfig& config) {
  const auto colon = text.rfind(':');
  std::string host = config.host;
  std::string port = text;
  if (colon != std::string::npos) {
    if (colon > 0) host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  int value = -1;
  auto res = std::from_chars(port.data(), port.data() + port.size(), value);
  if (port.empty() || res.ec != std::errc() || res.ptr != port.data() + port.size() || value < 0 ||
      value > 65535) {
    throw std::invalid_argument("bad listen address '" + text + "'");
  }
  config.host = host;
  config.port = value;
}

const char* to_string(JobState state) {
  switch (state) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
  }
  return "unknown";
}

namespace {

ServiceResponse error(int status, const std::string& code, const std::string& message,
                      const std::vector<Issue>& issues = {}) {
  json locations = json::array();
  json details = json::array();
  for (const Issue& i : issues) {
    locations.push_back(i.location);
    details.push_back({{"code", i.code}, {"message", i.message}, {"location", i.location}});
  }
  json body = {{"code", code}, {"message", message}, {"locations", locations}};
  if (!details.empty()) body["issues"] = details;
  return {status, body};
}

json views_json(const RosterInstance& inst, const Roster& r) {
  json by_nurse = json::array();
  for (int i = 0; i < inst.num_nurses(); ++i) {
    json days = json::array();
    for (int t = 0; t < inst.num_days(); ++t) {
      const auto s = r.shift_on(i, t);
      days.push_back({{"day", inst.horizon.day_labels[t]},
                      {"assignment", day_marker(inst, r, i, t)},
                      {"hours", s ? inst.shifts[*s].duration_hours : 0.0}});
    }
    by_nurse.push_back({{"nurse", inst.nurses[i].id}, {"name", inst.nurses[i].name}, {"days", days}});
  }
  json by_day = json::array();
  for (int t = 0; t < inst.num_days(); ++t) {
    json shifts = json::array();
    for (int s = 0; s < inst.num_shifts(); ++s) {
      json nurses = json::array();
      for (int i = 0; i < inst.num_nurses(); ++i) {
        if (r.x(i, s, t)) nurses.push_back(inst.nurses[i].id);
      }
      shifts.push_back({{"shift", inst.shifts[s].id}, {"nurses", nurses}, {"slack", r.j(s, t)}});
    }
    by_day.push_back({{"day", inst.horizon.day_labels[t]}, {"shifts", shifts}});
  }
  return {{"by_nurse", by_nurse}, {"by_day", by_day}};
}

json parse_body(const std::string& body) {
  if (body.empty()) throw std::invalid_argument("empty request body");
  return json::parse(body);  // json::parse_error on malformed input
}

}  // namespace

PlannerCore::PlannerCore(ServiceConfig config) : config_(std::move(config)) {
  worker_ = std::thread([this] { worker_loop(); });
}

PlannerCore::~PlannerCore() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

const PlannerCore::Session* PlannerCore::find_session(const std::string& id) const {
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : &it->second;
}

ServiceResponse PlannerCore::create_session(const std::string& body) {
  json payload;
  try {
    payload = parse_body(body);
  } catch (const std::exception& e) {
    return error(400, "malformed-body", e.what());
  }
  if (!payload.is_object()) return error(400, "malformed-body", "expected a JSON object");
  LoadedInstance loaded;
  try {
    loaded = instance_from_json(payload);
  } catch (const ParseError& e) {
    return error(422, "invalid-instance", e.what(), e.issues());
  } catch (const InvalidInstance& e) {
    return error(422, "invalid-instance", e.what(), e.report().errors);
  }
  std::lock_guard<std::mutex> lock(mu_);
  Session s;
  s.id = "s" + std::to_string(next_session_++);
  s.instance = std::move(loaded.instance);
  json warnings = json::array();
  for (const Issue& w : loaded.warnings) {
    warnings.push_back({{"code", w.code}, {"message", w.message}, {"location", w.location}});
  }
  const std::string id = s.id;
  sessions_.emplace(id, std::move(s));
  return {201, {{"id", id}, {"warnings", warnings}}};
}

ServiceResponse PlannerCore::submit_job(const std::string& session_id, const std::string& body) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!find_session(session_id)) return error(404, "unknown-session", "no session '" + session_id + "'");
  }
  json req;
  try {
    req = parse_body(body);
  } catch (const std::exception& e) {
    return error(400, "malformed-body", e.what());
  }
  if (!req.is_object() || !req.contains("kind") || !req.at("kind").is_string()) {
    return error(400, "malformed-body", "expected {\"kind\": \"solve\" | \"staff-plan\", \"params\": {...}}");
  }
  const std::string kind = req.at("kind").get<std::string>();
  if (kind != "solve" && kind != "staff-plan") {
    return error(400, "unknown-kind", "kind must be 'solve' or 'staff-plan'");
  }
  RunParams params;
  try {
    params = params_from_json(req.contains("params") ? req.at("params") : json());
  } catch (const std::exception& e) {
    return error(400, "bad-params", e.what());
  }
  if (!params.time_limit_seconds) params.time_limit_seconds = config_.time_limit_seconds;

  std::lock_guard<std::mutex> lock(mu_);
  Session& session = sessions_.at(session_id);
  try {
    apply_params(session.instance, params);
  } catch (const InvalidInstance& e) {
    return error(422, "invalid-params", e.what(), e.report().errors);
  }
  const std::string key = kind + " " + params_to_json(params).dump();
  if (auto it = session.cache.find(key); it != session.cache.end()) {
    ++cache_hits_;
    const Job& job = jobs_.at(it->second);
    return {200, {{"id", job.id}, {"status", to_string(job.state)}, {"cached", true}}};
  }
  Job job;
  job.id = "j" + std::to_string(next_job_++);
  job.session = session_id;
  job.kind = kind;
  job.params = params;
  const std::string id = job.id;
  jobs_.emplace(id, std::move(job));
  session.cache.emplace(key, id);
  queue_.push_back(id);
  cv_.notify_all();
  return {202, {{"id", id}, {"status", "queued"}, {"cached", false}}};
}

void PlannerCore::worker_loop() {
  std::unique_lock<std::mutex> lock(mu_);
  while (true) {
    cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
    if (stopping_) return;
    const std::string id = queue_.front();
    queue_.pop_front();
    busy_ = true;
    jobs_.at(id).state = JobState::Running;
    lock.unlock();
    run_job(id);
    lock.lock();
    busy_ = false;
    ++jobs_run_;
    idle_cv_.notify_all();
  }
}

void PlannerCore::run_job(const std::string& job_id) {
  RosterInstance instance;
  std::string kind;
  RunParams params;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const Job& job = jobs_.at(job_id);
    instance = sessions_.at(job.session).instance;
    kind = job.kind;
    params = job.params;
  }

  json result;
  std::string reason;
  std::optional<KpiReport> kpis;
  try {
    if (kind == "solve") {
      const RosterInstance inst = apply_params(instance, params);
      const SolveOutcome o = run_solve(instance, params);
      result = solve_document(inst, o);
      if (o.roster) {
        result["views"] = views_json(inst, *o.roster);
        kpis = o.kpis;
      } else {
        reason = std::string("solver returned ") + to_string(o.milp.status) + " without a roster";
      }
    } else {
      const RosterInstance inst = apply_params(instance, params);
      const HiringPlan plan = plan_hiring(inst, hiring_options_for(params));
      result = staff_plan_document(plan);
      if (plan.final_roster) {
        const KpiReport final_kpis = compute_kpis(plan.final_instance, *plan.final_roster);
        result["kpis"] = to_json(final_kpis);
        result["understaffing"] = to_json(detect_understaffing(plan.final_instance, *plan.final_roster));
        result["views"] = views_json(plan.final_instance, *plan.final_roster);
        kpis = final_kpis;
      } else {
        reason = "hiring loop stopped before the first roster: " + plan.detail;
      }
    }
  } catch (const std::exception& e) {
    reason = e.what();
  }

  std::lock_guard<std::mutex> lock(mu_);
  Job& job = jobs_.at(job_id);
  Session& session = sessions_.at(job.session);
  if (!kpis) {
    job.state = JobState::Failed;
    job.reason = reason;
    return;
  }
  if (!session.baseline) {
    session.baseline = kpis;
    session.baseline_job = job_id;
  }
  result["baseline_job"] = session.baseline_job;
  result["kpi_delta"] = to_json(kpi_delta(*session.baseline, *kpis));
  job.result = std::move(result);
  job.state = JobState::Done;
  session.latest_job = job_id;
  if (config_.spool_dir) {
    try {
      std::filesystem::create_directories(*config_.spool_dir);
      write_file_atomic(*config_.spool_dir / (job_id + ".json"), dump_document(job_document(job)));
    } catch (const std::exception&) {
      // Spooling is best effort; the in-memory result stays authoritative.
    }
  }
}

json PlannerCore::job_document(const Job& job) const {
  json doc = {{"id", job.id},
              {"session", job.session},
              {"kind", job.kind},
              {"params", params_to_json(job.params)},
              {"status", to_string(job.state)}};
  if (job.state == JobState::Done) doc["result"] = job.result;
  if (job.state == JobState::Failed) doc["reason"] = job.reason;
  return doc;
}

ServiceResponse PlannerCore::get_job(const std::string& job_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return error(404, "unknown-job", "no job '" + job_id + "'");
  return {200, job_document(it->second)};
}

ServiceResponse PlannerCore::get_roster(const std::string& session_id, const std::string& view) const {
  std::lock_guard<std::mutex> lock(mu_);
  const Session* s = find_session(session_id);
  if (!s) return error(404, "unknown-session", "no session '" + session_id + "'");
  if (s->latest_job.empty()) return error(404, "no-roster", "no completed job in this session yet");
  const json& views = jobs_.at(s->latest_job).result.at("views");
  if (view.empty()) return {200, {{"job", s->latest_job}, {"by_nurse", views.at("by_nurse")}, {"by_day", views.at("by_day")}}};
  const auto colon = view.find(':');
  const std::string kind = view.substr(0, colon);
  const std::string key = colon == std::string::npos ? "" : view.substr(colon + 1);
  if (kind == "nurse") {
    for (const json& n : views.at("by_nurse")) {
      if (n.at("nurse") == key) return {200, {{"job", s->latest_job}, {"view", "nurse"}, {"nurse", n}}};
    }
    return error(404, "unknown-nurse", "no nurse '" + key + "' in the roster");
  }
  if (kind == "day") {
    for (const json& d : views.at("by_day")) {
      if (d.at("day") == key) return {200, {{"job", s->latest_job}, {"view", "day"}, {"day", d}}};
    }
    return error(404, "unknown-day", "no day '" + key + "' in the roster");
  }
  return error(400, "bad-view", "view must be nurse:<id> or day:<label>");
}

ServiceResponse PlannerCore::get_kpis(const std::string& session_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  const Session* s = find_session(session_id);
  if (!s) return error(404, "unknown-session", "no session '" + session_id + "'");
  if (s->latest_job.empty()) return error(404, "no-roster", "no completed job in this session yet");
  const json& r = jobs_.at(s->latest_job).result;
  return {200,
          {{"job", s->latest_job},
           {"baseline_job", s->baseline_job},
           {"kpis", r.at("kpis")},
           {"baseline", to_json(*s->baseline)},
           {"kpi_delta", r.at("kpi_delta")}}};
}

long PlannerCore::cache_hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_hits_;
}

long PlannerCore::jobs_run() const {
  std::lock_guard<std::mutex> lock(mu_);
  return jobs_run_;
}

void PlannerCore::wait_idle() {
  std::unique_lock<std::mutex> lock(mu_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && !busy_; });
}

// ---------------------------------------------------------------------------

PlannerServer::PlannerServer(ServiceConfig config)
    : config_(config), core_(config), http_(std::make_unique<httplib::Server>()) {
  auto reply = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  http_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  http_->Post("/api/sessions", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, core_.create_session(req.body));
  });
  http_->Post(R"(/api/sessions/([^/]+)/jobs)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, core_.submit_job(req.matches[1], req.body));
  });
  http_->Get(R"(/api/jobs/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, core_.get_job(req.matches[1]));
  });
  http_->Get(R"(/api/sessions/([^/]+)/roster)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, core_.get_roster(req.matches[1], req.has_param("view") ? req.get_param_value("view") : ""));
  });
  http_->Get(R"(/api/sessions/([^/]+)/kpis)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, core_.get_kpis(req.matches[1]));
  });
  http_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  http_->set_error_handler([reply](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) reply(res, error(404, "not-found", "no such endpoint"));
  });
  http_->set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    reply(res, error(500, "internal", what));
  });
}

PlannerServer::~PlannerServer() { stop(); }

int PlannerServer::bind() {
  if (config_.port == 0) return http_->bind_to_any_port(config_.host);
  if (!http_->bind_to_port(config_.host, config_.port)) {
    throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  return config_.port;
}

void PlannerServer::serve() { http_->listen_after_bind(); }

void PlannerServer::stop() {
  if (http_) http_->stop();
}

}  // namespace nrp
