// SPDX-License-Identifier: Apache-2.0
//
// HTTP/JSON planning service.
//
// PlannerCore holds sessions, jobs and the solver worker and answers
// transport-free requests; PlannerServer maps the HTTP routes onto it.
//
//   POST /api/sessions                     instance payload -> 201 {id}
//   POST /api/sessions/{id}/jobs           {kind, params}   -> 202 {id, status}
//   GET  /api/jobs/{id}                    status and, when done, results
//   GET  /api/sessions/{id}/roster?view=nurse:{nid}|day:{label}
//   GET  /api/sessions/{id}/kpis
//
// Errors are {code, message, locations[]}.

#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "nrp/kpi.hpp"
#include "nrp/model.hpp"
#include "nrp/pipeline.hpp"

namespace httplib {
class Server;
}

namespace nrp {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  double time_limit_seconds = kDefaultTimeLimitSeconds;
  std::optional<std::filesystem::path> spool_dir;  // per-job result documents
};

// "host:port", ":port" or "port". Throws std::invalid_argument.
void parse_listen_address(const std::string& text, ServiceConfig& config);

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

enum class JobState { Queued, Running, Done, Failed };
const char* to_string(JobState state);

class PlannerCore {
 public:
  explicit PlannerCore(ServiceConfig config);
  ~PlannerCore();
  PlannerCore(const PlannerCore&) = delete;
  PlannerCore& operator=(const PlannerCore&) = delete;

  ServiceResponse create_session(const std::string& body);
  ServiceResponse submit_job(const std::string& session_id, const std::string& body);
  ServiceResponse get_job(const std::string& job_id) const;
  ServiceResponse get_roster(const std::string& session_id, const std::string& view) const;
  ServiceResponse get_kpis(const std::string& session_id) const;

  long cache_hits() const;
  long jobs_run() const;
  // Blocks until the queue is empty and the worker is idle.
  void wait_idle();

 private:
  struct Job {
    std::string id;
    std::string session;
    std::string kind;
    RunParams params;
    JobState state = JobState::Queued;
    nlohmann::json result;  // set when done
    std::string reason;     // set when failed
  };
  struct Session {
    std::string id;
    RosterInstance instance;
    std::map<std::string, std::string> cache;  // request key -> job id
    std::optional<KpiReport> baseline;
    std::string baseline_job;
    std::string latest_job;  // most recently completed job
  };

  void worker_loop();
  void run_job(const std::string& job_id);
  nlohmann::json job_document(const Job& job) const;
  const Session* find_session(const std::string& id) const;

  ServiceConfig config_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::map<std::string, Session> sessions_;
  std::map<std::string, Job> jobs_;
  std::deque<std::string> queue_;
  bool busy_ = false;
  bool stopping_ = false;
  long next_session_ = 1;
  long next_job_ = 1;
  long cache_hits_ = 0;
  long jobs_run_ = 0;
  std::thread worker_;
};

class PlannerServer {
 public:
  explicit PlannerServer(ServiceConfig config);
  ~PlannerServer();

  // Binds the configured address; returns the bound port.
  int bind();
  // Serves until stop(). Call bind() first.
  void serve();
  void stop();
  PlannerCore& core() { return core_; }

 private:
  ServiceConfig config_;
  PlannerCore core_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace nrp
