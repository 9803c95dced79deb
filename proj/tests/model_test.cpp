// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "nrp/model.hpp"
#include "test_instances.hpp"

namespace nrp {
namespace {

bool has_error(const ValidationReport& r, const std::string& code) {
  return std::any_of(r.errors.begin(), r.errors.end(),
                     [&](const Issue& e) { return e.code == code; });
}

bool has_warning(const ValidationReport& r, const std::string& code) {
  return std::any_of(r.warnings.begin(), r.warnings.end(),
                     [&](const Issue& e) { return e.code == code; });
}

TEST(ValidateInstance, Ora1IsWellFormed) {
  const ValidationReport report = validate_instance(testing::ora1());
  EXPECT_TRUE(report.errors.empty());
  EXPECT_TRUE(report.warnings.empty());
}

TEST(ValidateInstance, InvertedContractBounds) {
  RosterInstance inst = testing::ora1();
  inst.nurses[1].contract = {20.0, 10.0, 10.0};
  const ValidationReport report = validate_instance(inst);
  ASSERT_TRUE(has_error(report, "contract-bounds-inverted"));
  EXPECT_NE(report.errors.front().message.find("contract bounds inverted"), std::string::npos);
  EXPECT_EQ(report.errors.front().location, "nurses[1]");
}

TEST(ValidateInstance, DemandHorizonMismatch) {
  RosterInstance inst = testing::ora1();
  inst.demand = {4, 4, 4};
  const ValidationReport report = validate_instance(inst);
  ASSERT_TRUE(has_error(report, "demand-horizon-mismatch"));
  EXPECT_NE(report.errors.front().message.find("demand/horizon mismatch"), std::string::npos);
}

TEST(ValidateInstance, StructuralErrors) {
  RosterInstance inst = testing::ora1();
  inst.shifts[1].id = "DAY";
  inst.shifts[0].duration_hours = 0.0;
  inst.shifts[1].capacity_per_nurse = 0;
  inst.nurses[1].id = "n1";
  inst.weights.set(1, 1, 0.0);
  const ValidationReport report = validate_instance(inst);
  EXPECT_TRUE(has_error(report, "duplicate-shift-id"));
  EXPECT_TRUE(has_error(report, "duplicate-nurse-id"));
  EXPECT_TRUE(has_error(report, "nonpositive-duration"));
  EXPECT_TRUE(has_error(report, "nonpositive-capacity"));
  EXPECT_TRUE(has_error(report, "nonpositive-weight"));
}

TEST(ValidateInstance, EmptySetsAndHorizonShape) {
  RosterInstance inst = testing::ora1();
  inst.nurses.clear();
  inst.horizon.day_labels.push_back("d3");
  const ValidationReport report = validate_instance(inst);
  EXPECT_TRUE(has_error(report, "empty-nurses"));
  EXPECT_TRUE(has_error(report, "horizon-shape"));
}

TEST(ValidateInstance, BigMDominance) {
  RosterInstance inst = testing::ora1();
  inst.penalties.big_m = 1.5;  // below the night weight
  EXPECT_TRUE(has_error(validate_instance(inst), "big-m-dominance"));

  inst.penalties.big_m = 3.0;  // above p1 and every weight, below the sufficient bound 4
  const ValidationReport weak = validate_instance(inst);
  EXPECT_TRUE(weak.ok());
  EXPECT_TRUE(has_warning(weak, "big-m-weak"));
}

TEST(ValidateInstance, Warnings) {
  RosterInstance inst = testing::zero_demand();
  EXPECT_TRUE(has_warning(validate_instance(inst), "zero-demand"));
  inst.nurses[0].contract = {60.0, 60.0, 60.0};  // 7 days x 8h = 56 < 60
  const ValidationReport report = validate_instance(inst);
  EXPECT_TRUE(report.ok());
  EXPECT_TRUE(has_warning(report, "h-min-unreachable"));
}

TEST(ValidateInstance, PureAndDeterministic) {
  RosterInstance inst = testing::ora1();
  inst.nurses[0].contract = {20.0, 10.0, 10.0};
  EXPECT_EQ(validate_instance(inst), validate_instance(inst));
}

TEST(DefaultWeights, SevenDayWeek) {
  const RosterInstance inst = testing::zero_demand(1, 2, 7);
  const WeightTable& w = inst.weights;
  EXPECT_DOUBLE_EQ(w.at(0, 0), 1.0);  // day shift, Monday
  EXPECT_DOUBLE_EQ(w.at(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(w.at(0, 5), 1.5);
  EXPECT_DOUBLE_EQ(w.at(1, 5), 3.0);  // night, Saturday
  EXPECT_DOUBLE_EQ(w.max(), 3.0);
  EXPECT_DOUBLE_EQ(w.at(1, 12), 3.0);  // Saturday of week 2
}

TEST(DefaultWeights, OrderingProperty) {
  for (int dpw : {1, 2, 5, 7}) {
    const RosterInstance inst = testing::zero_demand(1, 3, dpw);
    const WeightTable& w = inst.weights;
    for (int t = 0; t < inst.num_days(); ++t) {
      EXPECT_GT(w.at(1, t), w.at(0, t));
      for (int s = 0; s < 2; ++s) {
        for (int u = 0; u < inst.num_days(); ++u) {
          if (inst.horizon.is_weekend(t) && !inst.horizon.is_weekend(u)) {
            EXPECT_GE(w.at(s, t), w.at(s, u));
          }
        }
      }
    }
  }
}

TEST(DefaultWeights, ShortWeeksAreAllMidweek) {
  const RosterInstance inst = testing::zero_demand(1, 2, 3);
  for (int t = 0; t < inst.num_days(); ++t) {
    EXPECT_DOUBLE_EQ(inst.weights.at(0, t), 1.0);
    EXPECT_DOUBLE_EQ(inst.weights.at(1, t), 2.0);
  }
}

TEST(WithAdditionalNurse, AddsFreshNurseWithoutTouchingInput) {
  const RosterInstance inst = testing::ora1();
  const RosterInstance copy = inst;
  const NurseContract tmpl{8.0, 16.0, 16.0};
  const RosterInstance grown = with_additional_nurse(inst, tmpl);
  EXPECT_EQ(inst, copy);
  ASSERT_EQ(grown.num_nurses(), 3);
  EXPECT_EQ(grown.nurses.back().contract, tmpl);
  EXPECT_EQ(grown.shifts, inst.shifts);
  EXPECT_EQ(grown.horizon, inst.horizon);
  EXPECT_EQ(grown.demand, inst.demand);
  EXPECT_EQ(grown.weights, inst.weights);
  EXPECT_EQ(grown.penalties, inst.penalties);

  const RosterInstance twice = with_additional_nurse(grown, tmpl);
  std::set<std::string> ids;
  for (const Nurse& n : twice.nurses) ids.insert(n.id);
  EXPECT_EQ(ids.size(), 4u);
  EXPECT_NE(twice.nurses[2].id, twice.nurses[3].id);
}

TEST(ModalContract, PicksMostFrequent) {
  RosterInstance inst = testing::ora1();
  inst.nurses.push_back({"n3", "N3", {0.0, 40.0, 40.0}});
  EXPECT_EQ(modal_contract(inst), (NurseContract{8.0, 16.0, 16.0}));
}

TEST(CheckRoster, DetectsEachViolation) {
  const RosterInstance inst = testing::ora1();
  Roster r = Roster::empty_for(inst);
  r.set_x(0, 1, 0, true);  // n1 night d1
  r.set_x(0, 0, 1, true);  // n1 day d2: breaks night rest
  r.set_x(1, 0, 0, true);
  r.set_x(1, 1, 0, true);  // n2 two shifts d1
  recompute_derived(inst, r);
  std::set<std::string> codes;
  for (const Issue& i : check_roster(inst, r)) codes.insert(i.code);
  EXPECT_TRUE(codes.count("Eq1"));
  EXPECT_TRUE(codes.count("Eq5"));
  EXPECT_TRUE(codes.count("Eq7"));  // night d2 is uncovered with zero slack
}

TEST(CheckRoster, WeeklyBounds) {
  const RosterInstance inst = testing::ora1();
  Roster r = Roster::empty_for(inst);
  r.set_j(0, 0, 1);
  r.set_j(1, 0, 1);
  r.set_j(0, 1, 1);
  r.set_j(1, 1, 1);
  recompute_derived(inst, r);
  std::set<std::string> codes;
  for (const Issue& i : check_roster(inst, r)) codes.insert(i.code);
  EXPECT_TRUE(codes.count("Eq2"));
  EXPECT_FALSE(codes.count("Eq7"));
}

}  // namespace
}  // namespace nrp
