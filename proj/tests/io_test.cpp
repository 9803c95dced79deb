// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "nrp/encoder.hpp"
#include "nrp/io.hpp"
#include "nrp/roster_solver.hpp"
#include "test_instances.hpp"

namespace nrp {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = NRP_FIXTURE_DIR;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("nrp_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// Copies a fixture so a test can damage one file.
fs::path copy_fixture(const std::string& name, const fs::path& dest) {
  fs::copy(kFixtures / name, dest / name, fs::copy_options::recursive);
  return dest / name;
}

std::vector<Issue> parse_errors(const InstanceFileSet& files) {
  try {
    load_instance(files);
  } catch (const ParseError& e) {
    return e.issues();
  }
  return {};
}

TEST(LoadInstance, Ora1FixtureEqualsInCodeInstance) {
  const LoadedInstance loaded = load_instance(InstanceFileSet::in_directory(kFixtures / "ora1"));
  EXPECT_EQ(loaded.instance, testing::ora1());
}

TEST(LoadInstance, ZeroDemandFixtureAndIgnoredColumn) {
  const LoadedInstance loaded = load_instance(InstanceFileSet::in_directory(kFixtures / "zero_demand"));
  EXPECT_EQ(loaded.instance, testing::zero_demand());
  const bool warned = std::any_of(loaded.warnings.begin(), loaded.warnings.end(),
                                  [](const Issue& i) { return i.code == "ignored-column"; });
  EXPECT_TRUE(warned);
}

TEST(LoadInstance, BigMDefaultsWhenOmitted) {
  const LoadedInstance loaded = load_instance(InstanceFileSet::in_directory(kFixtures / "zero_demand"));
  EXPECT_EQ(loaded.instance.penalties.big_m, 1e6);
}

TEST(LoadInstance, NegativePatientsLocated) {
  TempDir tmp;
  const fs::path dir = copy_fixture("ora1", tmp.path());
  write(dir / "demand.csv", "day_label,patients\nd1,4\nd2,-1\n");
  const auto errors = parse_errors(InstanceFileSet::in_directory(dir));
  ASSERT_EQ(errors.size(), 1U);
  EXPECT_EQ(errors[0].code, "negative-value");
  EXPECT_EQ(errors[0].location, "demand.csv:3:patients");
}

TEST(LoadInstance, MissingColumnAndNonNumericCell) {
  TempDir tmp;
  const fs::path dir = copy_fixture("ora1", tmp.path());
  write(dir / "nurses.csv", "id,name,h_min,h_std\nn1,A,8,16\n");
  write(dir / "shifts.csv",
        "id,name,duration_hours,capacity_per_nurse,min_staff,is_night\nDAY,Day,eight,4,0,false\n");
  const auto errors = parse_errors(InstanceFileSet::in_directory(dir));
  ASSERT_EQ(errors.size(), 2U);
  EXPECT_EQ(errors[0].code, "missing-column");
  EXPECT_EQ(errors[0].location, "nurses.csv");
  EXPECT_EQ(errors[1].code, "not-a-number");
  EXPECT_EQ(errors[1].location, "shifts.csv:2:duration_hours");
}

TEST(LoadInstance, DuplicateIdAndUnknownDayLabel) {
  TempDir tmp;
  const fs::path dir = copy_fixture("ora1", tmp.path());
  write(dir / "nurses.csv", "id,name,h_min,h_std,h_max\nn1,A,8,16,16\nn1,B,8,16,16\n");
  write(dir / "config.json",
        R"({"weeks": 1, "days_per_week": 2, "weights": [{"shift": "DAY", "day": "d9", "weight": 2}]})");
  const auto errors = parse_errors(InstanceFileSet::in_directory(dir));
  ASSERT_EQ(errors.size(), 2U);
  EXPECT_EQ(errors[0].code, "duplicate-nurse-id");
  EXPECT_EQ(errors[0].location, "nurses.csv:3:id");
  EXPECT_EQ(errors[1].code, "unknown-day-label");
  EXPECT_EQ(errors[1].location, "config.json:weights[0].day");
}

TEST(LoadInstance, ValidationErrorsPropagate) {
  try {
    load_instance(InstanceFileSet::in_directory(kFixtures / "bad_contract"));
    FAIL() << "expected InvalidInstance";
  } catch (const InvalidInstance& e) {
    ASSERT_FALSE(e.report().errors.empty());
    EXPECT_EQ(e.report().errors[0].code, "contract-bounds-inverted");
  }
}

TEST(LoadInstance, MissingFile) {
  TempDir tmp;
  InstanceFileSet files = InstanceFileSet::in_directory(tmp.path());
  const auto errors = parse_errors(files);
  ASSERT_EQ(errors.size(), 4U);
  EXPECT_EQ(errors[0].code, "file-unreadable");
}

TEST(LoadInstance, QuotedCsvFields) {
  TempDir tmp;
  const fs::path dir = copy_fixture("ora1", tmp.path());
  write(dir / "nurses.csv",
        "id,name,h_min,h_std,h_max\r\nn1,\"Doe, Jane \"\"JD\"\"\",8,16,16\r\nn2,Nurse 2,8,16,16\r\n");
  const LoadedInstance loaded = load_instance(InstanceFileSet::in_directory(dir));
  EXPECT_EQ(loaded.instance.nurses[0].name, "Doe, Jane \"JD\"");
}

TEST(ExportInstance, RoundTripsEveryFixtureAndRandomInstances) {
  TempDir tmp;
  std::vector<RosterInstance> cases;
  for (const char* name : {"ora1", "zero_demand"}) {
    cases.push_back(load_instance(InstanceFileSet::in_directory(kFixtures / name)).instance);
  }
  std::mt19937 rng(5);
  for (int k = 0; k < 20; ++k) cases.push_back(testing::random_instance(rng));
  RosterInstance quoted = testing::ora1();
  quoted.nurses[0].name = "O'Neil, \"Pat\"";
  quoted.penalties.p1 = 0.1;
  cases.push_back(quoted);
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const InstanceFileSet files = InstanceFileSet::in_directory(tmp.path() / std::to_string(k));
    export_instance(cases[k], files);
    EXPECT_EQ(load_instance(files).instance, cases[k]) << "case " << k;
  }
}

TEST(InstanceJson, RoundTripsAndMatchesCsv) {
  const RosterInstance inst = testing::ora1();
  EXPECT_EQ(instance_from_json(instance_to_json(inst)).instance, inst);
  RosterInstance weighted = testing::zero_demand();
  weighted.weights.set(1, 3, 7.25);
  EXPECT_EQ(instance_from_json(instance_to_json(weighted)).instance, weighted);
}

TEST(InstanceJson, LocatedErrors) {
  nlohmann::json doc = instance_to_json(testing::ora1());
  doc["demand"][1]["patients"] = -1;
  doc["nurses"][0]["h_min"] = "lots";
  try {
    instance_from_json(doc);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    ASSERT_EQ(e.issues().size(), 2U);
    EXPECT_EQ(e.issues()[0].location, "nurses[0].h_min");
    EXPECT_EQ(e.issues()[1].location, "demand[1].patients");
  }
}

TEST(Fingerprint, StableAndSensitive) {
  const RosterInstance a = testing::ora1();
  RosterInstance b = a;
  b.demand[0] = 5;
  EXPECT_EQ(instance_fingerprint(a), instance_fingerprint(testing::ora1()));
  EXPECT_EQ(instance_fingerprint(a).size(), 64U);
  EXPECT_NE(instance_fingerprint(a), instance_fingerprint(b));
}

TEST(ExportRoster, EmptyRosterDocument) {
  const RosterInstance inst = testing::zero_demand();
  Roster r = Roster::empty_for(inst);
  recompute_derived(inst, r);
  const nlohmann::json doc = roster_to_json(inst, r);
  EXPECT_TRUE(doc["assignments"].empty());
  EXPECT_TRUE(doc["slack"].empty());
  EXPECT_EQ(doc["objective"].get<double>(), 0.0);
}

TEST(ExportRoster, ByteStableAndRoundTrips) {
  TempDir tmp;
  const RosterInstance inst = testing::ora1();
  const Roster r = *solve_instance(inst).roster;
  export_roster(inst, r, tmp.path() / "a.json");
  export_roster(inst, r, tmp.path() / "b.json");
  EXPECT_EQ(read_file(tmp.path() / "a.json"), read_file(tmp.path() / "b.json"));
  EXPECT_EQ(load_roster(inst, tmp.path() / "a.json"), r);
  EXPECT_FALSE(fs::exists(tmp.path() / "a.json.tmp"));
}

TEST(ExportRoster, RejectsForeignInstance) {
  TempDir tmp;
  const RosterInstance inst = testing::ora1();
  export_roster(inst, *solve_instance(inst).roster, tmp.path() / "r.json");
  RosterInstance other = inst;
  other.demand[1] = 3;
  EXPECT_THROW(load_roster(other, tmp.path() / "r.json"), IoError);
}

TEST(ExportRoster, UnwritableDestination) {
  TempDir tmp;
  write(tmp.path() / "file", "x");
  const RosterInstance inst = testing::ora1();
  EXPECT_THROW(export_roster(inst, Roster::empty_for(inst), tmp.path() / "file" / "r.json"), IoError);
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST(NurseSheets, PostNightRestAndCoverage) {
  TempDir tmp;
  // The oracle's tie-break puts the night shift on the last day; this equally
  // optimal roster has it on d1 so the forced rest shows up on d2.
  const RosterInstance inst = testing::ora1();
  Roster r = Roster::empty_for(inst);
  r.set_x(0, 0, 0, true);
  r.set_x(0, 0, 1, true);
  r.set_x(1, 1, 0, true);
  r.set_j(1, 1, 1);
  recompute_derived(inst, r);
  ASSERT_TRUE(check_roster(inst, r).empty());
  ASSERT_NEAR(r.objective, brute_force_solve(inst)->objective, 1e-9);
  export_nurse_sheets(inst, r, tmp.path());
  int assignments = 0;
  bool saw_post_night = false;
  for (int i = 0; i < inst.num_nurses(); ++i) {
    const auto rows = read_csv_rows(tmp.path() / sheet_file_name(inst.nurses[i].id));
    ASSERT_EQ(rows.size(), 1U + inst.num_days());
    for (int t = 0; t < inst.num_days(); ++t) {
      const auto& row = rows[t + 1];
      EXPECT_EQ(row[0], inst.horizon.day_labels[t]);
      const auto s = r.shift_on(i, t);
      if (s) {
        EXPECT_EQ(row[1], inst.shifts[*s].id);
        ++assignments;
      } else if (t > 0 && r.shift_on(i, t - 1) && inst.shifts[*r.shift_on(i, t - 1)].is_night) {
        EXPECT_EQ(row[1], kPostNightMarker);
        saw_post_night = true;
      } else {
        EXPECT_EQ(row[1], kRestMarker);
      }
    }
  }
  int expected = 0;
  for (int i = 0; i < inst.num_nurses(); ++i) {
    for (int s = 0; s < inst.num_shifts(); ++s) {
      for (int t = 0; t < inst.num_days(); ++t) expected += r.x(i, s, t) ? 1 : 0;
    }
  }
  EXPECT_EQ(assignments, expected);
  EXPECT_TRUE(saw_post_night);
  const auto summary = read_csv_rows(tmp.path() / "summary.csv");
  ASSERT_EQ(summary.size(), 3U);
  EXPECT_EQ(summary[0], (std::vector<std::string>{"nurse", "total_hours", "overtime_hours", "weighted_workload"}));
}

TEST(NurseSheets, IdleNurseAllRest) {
  TempDir tmp;
  const RosterInstance inst = testing::zero_demand();
  export_nurse_sheets(inst, Roster::empty_for(inst), tmp.path());
  const auto rows = read_csv_rows(tmp.path() / "n1.csv");
  ASSERT_EQ(rows.size(), 8U);
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_EQ(rows[k][1], kRestMarker);
}

TEST(SheetFileName, Sanitized) {
  EXPECT_EQ(sheet_file_name("n1"), "n1.csv");
  EXPECT_EQ(sheet_file_name("a/b c"), "a_b_c.csv");
  EXPECT_EQ(sheet_file_name("summary"), "nurse_summary.csv");
}

TEST(ExportKpis, Documents) {
  TempDir tmp;
  KpiReport zero;
  export_kpis(zero, tmp.path() / "k.json");
  const auto doc = nlohmann::json::parse(read_file(tmp.path() / "k.json"));
  EXPECT_EQ(doc["objective"].get<double>(), 0.0);
  EXPECT_EQ(doc["total_slack_units"].get<int>(), 0);

  KpiReport before;
  before.total_overtime_hours = 10;
  KpiReport after;
  after.total_overtime_hours = 4;
  export_kpis(kpi_delta(before, after), tmp.path() / "d.json");
  const auto delta = nlohmann::json::parse(read_file(tmp.path() / "d.json"));
  EXPECT_EQ(delta["total_overtime_hours"].get<double>(), -6.0);

  HiringOptions opts;
  opts.hire_template = NurseContract{8.0, 16.0, 16.0};
  export_kpis(plan_hiring(testing::ora1(), opts), tmp.path() / "p.json");
  const auto plan = nlohmann::json::parse(read_file(tmp.path() / "p.json"));
  EXPECT_EQ(plan["iterations"].size(), 2U);
  EXPECT_EQ(plan["hires_accepted"].get<int>(), 1);
  EXPECT_EQ(plan["stop_reason"].get<std::string>(), "improvement-below-c");
  EXPECT_EQ(plan["final_roster"]["total_slack"].get<int>(), 0);
}

}  // namespace
}  // namespace nrp
