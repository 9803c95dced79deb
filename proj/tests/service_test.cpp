// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <httplib.h>

#include <chrono>
#include <thread>

#include "nrp/io.hpp"
#include "nrp/service.hpp"
#include "test_instances.hpp"

namespace nrp {
namespace {

using nlohmann::json;

class LiveServer : public ::testing::Test {
 protected:
  void SetUp() override {
    ServiceConfig config;
    config.port = 0;
    config.time_limit_seconds = 30;
    config.spool_dir = std::filesystem::temp_directory_path() / "nrp_service_test_spool";
    std::filesystem::remove_all(*config.spool_dir);
    spool_ = *config.spool_dir;
    server_ = std::make_unique<PlannerServer>(config);
    port_ = server_->bind();
    thread_ = std::thread([this] { server_->serve(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(60, 0);
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  std::pair<int, json> post(const std::string& path, const std::string& body) {
    auto res = client_->Post(path.c_str(), body, "application/json");
    EXPECT_TRUE(res) << path;
    if (!res) return {0, json()};
    return {res->status, res->body.empty() ? json() : json::parse(res->body)};
  }
  std::pair<int, json> get(const std::string& path) {
    auto res = client_->Get(path.c_str());
    EXPECT_TRUE(res) << path;
    if (!res) return {0, json()};
    return {res->status, json::parse(res->body)};
  }
  std::string new_session(const RosterInstance& inst) {
    auto [status, body] = post("/api/sessions", instance_to_json(inst).dump());
    EXPECT_EQ(status, 201) << body.dump();
    return body.value("id", "");
  }
  json run(const std::string& session, const json& request) {
    auto [status, body] = post("/api/sessions/" + session + "/jobs", request.dump());
    EXPECT_TRUE(status == 202 || status == 200) << body.dump();
    const std::string id = body.value("id", "");
    for (int k = 0; k < 600; ++k) {
      auto [s, job] = get("/api/jobs/" + id);
      EXPECT_EQ(s, 200);
      const std::string state = job.value("status", "");
      if (state == "done" || state == "failed") return job;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    ADD_FAILURE() << "job " << id << " did not finish";
    return json();
  }

  std::unique_ptr<PlannerServer> server_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  std::filesystem::path spool_;
  int port_ = 0;
};

TEST_F(LiveServer, SessionCreatedFromInstancePayload) {
  auto [status, body] = post("/api/sessions", instance_to_json(testing::ora1()).dump());
  EXPECT_EQ(status, 201);
  EXPECT_FALSE(body.at("id").get<std::string>().empty());
  EXPECT_TRUE(body.at("warnings").empty());
}

TEST_F(LiveServer, InvalidInstanceIs422WithLocations) {
  json doc = instance_to_json(testing::ora1());
  doc["nurses"][0]["h_min"] = 20;  // above h_max
  auto [status, body] = post("/api/sessions", doc.dump());
  EXPECT_EQ(status, 422);
  EXPECT_EQ(body.at("code"), "invalid-instance");
  ASSERT_FALSE(body.at("locations").empty());
  EXPECT_NE(body.at("locations")[0].get<std::string>().find("nurses"), std::string::npos);

  doc = instance_to_json(testing::ora1());
  doc["nurses"][1]["h_max"] = "lots";
  std::tie(status, body) = post("/api/sessions", doc.dump());
  EXPECT_EQ(status, 422);
  EXPECT_EQ(body.at("locations")[0], "nurses[1].h_max");
}

TEST_F(LiveServer, MalformedBodiesAre400) {
  EXPECT_EQ(post("/api/sessions", "").first, 400);
  EXPECT_EQ(post("/api/sessions", "{not json").first, 400);
  EXPECT_EQ(post("/api/sessions", "[1,2]").first, 400);
  const std::string s = new_session(testing::ora1());
  EXPECT_EQ(post("/api/sessions/" + s + "/jobs", "").first, 400);
  EXPECT_EQ(post("/api/sessions/" + s + "/jobs", R"({"kind":"dance"})").first, 400);
  EXPECT_EQ(post("/api/sessions/" + s + "/jobs", R"({"kind":"solve","params":{"nope":1}})").first, 400);
  EXPECT_EQ(post("/api/sessions/" + s + "/jobs", R"({"kind":"solve","params":{"p1":-1}})").first, 422);
}

TEST_F(LiveServer, UnknownIdsAre404) {
  EXPECT_EQ(get("/api/jobs/j999").first, 404);
  EXPECT_EQ(get("/api/sessions/s999/roster").first, 404);
  EXPECT_EQ(get("/api/sessions/s999/kpis").first, 404);
  EXPECT_EQ(post("/api/sessions/s999/jobs", R"({"kind":"solve"})").first, 404);
  const std::string s = new_session(testing::ora1());
  auto [status, body] = get("/api/sessions/" + s + "/roster");
  EXPECT_EQ(status, 404);
  EXPECT_EQ(body.at("code"), "no-roster");
}

TEST_F(LiveServer, SolveJobAndRosterViews) {
  const std::string s = new_session(testing::ora1());
  const json job = run(s, {{"kind", "solve"}});
  ASSERT_EQ(job.at("status"), "done") << job.dump();
  const json& r = job.at("result");
  EXPECT_EQ(r.at("status"), "optimal");
  EXPECT_NEAR(r.at("objective").get<double>(), 1000002.0, 1e-6);
  EXPECT_EQ(r.at("slack"), 1);
  EXPECT_EQ(r.at("hires"), 0);
  EXPECT_NEAR(r.at("gap").get<double>(), 0.0, 1e-9);

  auto [status, all] = get("/api/sessions/" + s + "/roster");
  ASSERT_EQ(status, 200);
  EXPECT_EQ(all.at("by_nurse").size(), 2u);
  EXPECT_EQ(all.at("by_day").size(), 2u);

  // Every NIGHT assignment is followed by POST-NIGHT-REST in the nurse view.
  for (const char* nid : {"n1", "n2"}) {
    auto [st, view] = get("/api/sessions/" + s + "/roster?view=nurse:" + nid);
    ASSERT_EQ(st, 200);
    const json& days = view.at("nurse").at("days");
    ASSERT_EQ(days.size(), 2u);
    if (days[0].at("assignment") == "NIGHT") {
      EXPECT_EQ(days[1].at("assignment"), "POST-NIGHT-REST");
      EXPECT_EQ(days[1].at("hours"), 0.0);
    }
  }
  auto [st, day] = get("/api/sessions/" + s + "/roster?view=day:d1");
  ASSERT_EQ(st, 200);
  int staffed = 0;
  for (const json& sh : day.at("day").at("shifts")) staffed += static_cast<int>(sh.at("nurses").size());
  EXPECT_EQ(staffed, 2);
  EXPECT_EQ(get("/api/sessions/" + s + "/roster?view=nurse:zz").first, 404);
  EXPECT_EQ(get("/api/sessions/" + s + "/roster?view=day:d9").first, 404);
  EXPECT_EQ(get("/api/sessions/" + s + "/roster?view=week:1").first, 400);

  EXPECT_TRUE(std::filesystem::exists(spool_ / (job.at("id").get<std::string>() + ".json")));
}

TEST_F(LiveServer, StaffPlanHiresOneAndCacheHits) {
  const std::string s = new_session(testing::ora1());
  const json req = {{"kind", "staff-plan"}, {"params", {{"hire_cost", 10}}}};
  const json job = run(s, req);
  ASSERT_EQ(job.at("status"), "done") << job.dump();
  const json& r = job.at("result");
  EXPECT_EQ(r.at("hires_accepted"), 1);
  EXPECT_EQ(r.at("slack"), 0);
  EXPECT_EQ(r.at("stop_reason"), "improvement-below-c");
  EXPECT_EQ(r.at("final_nurse_count"), 3);

  const long runs = server_->core().jobs_run();
  auto [status, again] = post("/api/sessions/" + s + "/jobs", json(req).dump());
  EXPECT_EQ(status, 200);
  EXPECT_EQ(again.at("id"), job.at("id"));
  EXPECT_EQ(again.at("cached"), true);
  EXPECT_EQ(server_->core().cache_hits(), 1);
  server_->core().wait_idle();
  EXPECT_EQ(server_->core().jobs_run(), runs);

  // Same parameters spelled differently hit the same entry.
  std::tie(status, again) =
      post("/api/sessions/" + s + "/jobs", R"({"kind":"staff-plan","params":{"hire_cost":10.0}})");
  EXPECT_EQ(again.at("id"), job.at("id"));
  EXPECT_EQ(server_->core().cache_hits(), 2);

  const json expensive = run(s, {{"kind", "staff-plan"}, {"params", {{"hire_cost", 1e9}}}});
  ASSERT_EQ(expensive.at("status"), "done");
  EXPECT_EQ(expensive.at("result").at("hires_accepted"), 0);
  EXPECT_NE(expensive.at("id"), job.at("id"));
}

TEST_F(LiveServer, KpisCarryDeltaAgainstBaseline) {
  const std::string s = new_session(testing::ora1());
  const json first = run(s, {{"kind", "solve"}});
  ASSERT_EQ(first.at("status"), "done");
  auto [status, k1] = get("/api/sessions/" + s + "/kpis");
  ASSERT_EQ(status, 200);
  EXPECT_EQ(k1.at("baseline_job"), first.at("id"));
  EXPECT_EQ(k1.at("kpi_delta").at("total_slack_units"), 0);

  const json second = run(s, {{"kind", "staff-plan"}, {"params", {{"hire_cost", 10}}}});
  ASSERT_EQ(second.at("status"), "done");
  auto [st, k2] = get("/api/sessions/" + s + "/kpis");
  ASSERT_EQ(st, 200);
  EXPECT_EQ(k2.at("job"), second.at("id"));
  EXPECT_EQ(k2.at("baseline_job"), first.at("id"));
  EXPECT_EQ(k2.at("kpi_delta").at("total_slack_units"), -1);
  EXPECT_EQ(k2.at("kpi_delta").at("nurse_count"), 1);
  EXPECT_LT(k2.at("kpi_delta").at("objective").get<double>(), -1e5);
}

TEST_F(LiveServer, CorsHeaderAndPreflight) {
  auto res = client_->Get("/api/jobs/none");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  res = client_->Options("/api/sessions");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(get("/api/elsewhere").first, 404);
}

TEST(ListenAddress, Parses) {
  ServiceConfig c;
  parse_listen_address("0.0.0.0:9000", c);
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 9000);
  parse_listen_address(":0", c);
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 0);
  parse_listen_address("8081", c);
  EXPECT_EQ(c.port, 8081);
  EXPECT_THROW(parse_listen_address("host:", c), std::invalid_argument);
  EXPECT_THROW(parse_listen_address("host:70000", c), std::invalid_argument);
  EXPECT_THROW(parse_listen_address("h:12x", c), std::invalid_argument);
}

}  // namespace
}  // namespace nrp
