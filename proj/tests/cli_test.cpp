// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "nrp/cli.hpp"
#include "nrp/io.hpp"
#include "test_instances.hpp"

namespace nrp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kFixtures = NRP_FIXTURE_DIR;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nrp_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, ValidateReportsJson) {
  CliRun ok = cli({"validate", "-i", (kFixtures / "ora1").string()});
  EXPECT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_EQ(json::parse(ok.out).at("valid"), true);

  CliRun bad = cli({"validate", "-i", (kFixtures / "bad_contract").string()});
  EXPECT_EQ(bad.code, kExitError);
  const json doc = json::parse(bad.out);
  EXPECT_EQ(doc.at("valid"), false);
  ASSERT_FALSE(doc.at("errors").empty());
  EXPECT_NE(bad.err.find("nurses.csv"), std::string::npos) << bad.err;

  CliRun warn = cli({"validate", "-i", (kFixtures / "zero_demand").string()});
  EXPECT_EQ(warn.code, kExitOk);
  EXPECT_NE(warn.err.find("seniority"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"solve"}).code, kExitUsage);
  EXPECT_EQ(cli({"solve", "-i", "x", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"solve", "-i", "x", "--time-limit", "-3"}).code, kExitUsage);
  EXPECT_EQ(cli({"validate", "--nurses", "a.csv"}).code, kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, MissingInstanceIsError) {
  CliRun r = cli({"solve", "-i", path("nowhere"), "-o", path("out")});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("file-unreadable"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(CliTest, SolveWritesDocuments) {
  CliRun r = cli({"solve", "-i", (kFixtures / "ora1").string(), "-o", path("out")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("status=optimal objective=1000002 slack=1 hires=0"), std::string::npos) << r.out;
  for (const char* f : {"roster.json", "kpis.json", "understaffing.json", "sheets/n1.csv", "sheets/n2.csv",
                        "sheets/summary.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  const json under = json::parse(read_file(dir_ / "out" / "understaffing.json"));
  EXPECT_EQ(under.at("total_slack"), 1);
  EXPECT_NE(r.err.find("understaffed:"), std::string::npos);

  // Same input, same bytes.
  ASSERT_EQ(cli({"solve", "-i", (kFixtures / "ora1").string(), "-o", path("again")}).code, kExitOk);
  EXPECT_EQ(read_file(dir_ / "out" / "roster.json"), read_file(dir_ / "again" / "roster.json"));
  EXPECT_EQ(read_file(dir_ / "out" / "kpis.json"), read_file(dir_ / "again" / "kpis.json"));
  EXPECT_EQ(read_file(dir_ / "out" / "sheets" / "n1.csv"), read_file(dir_ / "again" / "sheets" / "n1.csv"));
}

TEST_F(CliTest, InfeasibleIsError) {
  RosterInstance inst = testing::ora1();
  inst.shifts[0].min_staff = 3;  // two nurses cannot staff three day seats
  export_instance(inst, InstanceFileSet::in_directory(dir_ / "inst"));
  CliRun r = cli({"solve", "-i", path("inst"), "-o", path("out")});
  EXPECT_EQ(r.code, kExitError) << r.out << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "out" / "roster.json"));
}

TEST_F(CliTest, TimeLimitIsExitTwo) {
  export_instance(testing::scale_instance(10, 4), InstanceFileSet::in_directory(dir_ / "inst"));
  CliRun r = cli({"solve", "-i", path("inst"), "-o", path("out"), "--time-limit", "0.05"});
  EXPECT_EQ(r.code, kExitLimit) << r.out << r.err;
}

TEST_F(CliTest, StaffPlanTableAndDelta) {
  CliRun r = cli({"staff-plan", "-i", (kFixtures / "ora1").string(), "-o", path("out")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("iteration nurses objective slack overtime_h\n0 2 1000002 1 ", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("\n1 3 "), std::string::npos);
  EXPECT_NE(r.out.find("hires=1"), std::string::npos);
  EXPECT_NE(r.err.find("stop_reason=improvement-below-c"), std::string::npos);
  const json plan = json::parse(read_file(dir_ / "out" / "plan.json"));
  EXPECT_EQ(plan.at("hires_accepted"), 1);
  const json delta = json::parse(read_file(dir_ / "out" / "delta.json"));
  EXPECT_EQ(delta.at("total_slack_units"), -1);
  EXPECT_EQ(delta.at("nurse_count"), 1);

  CliRun dear = cli({"staff-plan", "-i", (kFixtures / "ora1").string(), "-o", path("dear"), "--hire-cost", "1e9"});
  ASSERT_EQ(dear.code, kExitOk);
  EXPECT_NE(dear.out.find("hires=0"), std::string::npos);
}

TEST_F(CliTest, KpiAndExport) {
  const std::string inst = (kFixtures / "ora1").string();
  ASSERT_EQ(cli({"solve", "-i", inst, "-o", path("out")}).code, kExitOk);
  const std::string roster = path("out/roster.json");

  CliRun k = cli({"kpi", "-i", inst, "--roster", roster});
  ASSERT_EQ(k.code, kExitOk) << k.err;
  EXPECT_EQ(k.out, read_file(dir_ / "out" / "kpis.json"));

  CliRun self = cli({"kpi", "-i", inst, "--roster", roster, "--against", roster, "-o", path("self.json")});
  ASSERT_EQ(self.code, kExitOk);
  const json d = json::parse(read_file(path("self.json"))).at("delta");
  EXPECT_EQ(d.at("objective"), 0.0);
  EXPECT_EQ(d.at("total_slack_units"), 0);

  CliRun e = cli({"export", "-i", inst, "--roster", roster, "--sheets", path("sheets"), "--instance-out",
               path("copy"), "--instance-json", path("inst.json")});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  EXPECT_TRUE(fs::exists(path("sheets/n2.csv")));
  EXPECT_EQ(load_instance(InstanceFileSet::in_directory(path("copy"))).instance, testing::ora1());
  EXPECT_EQ(instance_from_json(json::parse(read_file(path("inst.json")))).instance, testing::ora1());

  EXPECT_EQ(cli({"export", "-i", inst, "--sheets", path("s2")}).code, kExitUsage);

  // A roster belonging to another instance is refused.
  RosterInstance other = testing::ora1();
  other.demand[0] = 5;
  export_instance(other, InstanceFileSet::in_directory(dir_ / "other"));
  CliRun foreign = cli({"kpi", "-i", path("other"), "--roster", roster});
  EXPECT_EQ(foreign.code, kExitError);
}

}  // namespace
}  // namespace nrp
