// SPDX-License-Identifier: Apache-2.0
//
// Understaffing reports from slack values, and the iterative hiring loop that
// adds template nurses while each hire pays for itself.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nrp/kpi.hpp"
#include "nrp/milp.hpp"
#include "nrp/model.hpp"

namespace nrp {

struct UnderstaffingEntry {
  std::string shift_id;
  std::string day;
  int slack_units = 0;
  int shortfall_patients = 0;  // max(0, D_t - a_s * staffed)
  bool operator==(const UnderstaffingEntry&) const = default;
};

struct UnderstaffingReport {
  std::vector<UnderstaffingEntry> entries;  // (shift, day) order, only j > 0
  int total_slack = 0;
};

UnderstaffingReport detect_understaffing(const RosterInstance& instance, const Roster& roster);

struct HiringOptions {
  std::optional<NurseContract> hire_template;  // default: modal contract of the instance
  int max_hires = 50;
  SolveOptions solve_options;
};

struct HiringIteration {
  int nurse_count = 0;
  double objective = 0.0;
  int total_slack = 0;
  KpiReport kpis;
};

enum class StopReason { ImprovementBelowCost, MaxHires, SolverLimit };

const char* to_string(StopReason reason);

struct HiringPlan {
  std::vector<HiringIteration> iterations;  // one per accepted state, first is the input
  int hires_accepted = 0;
  std::optional<Roster> final_roster;  // empty only when the first solve failed
  RosterInstance final_instance;
  StopReason stop_reason = StopReason::ImprovementBelowCost;
  std::string detail;  // solver status behind a solver-limit stop
  long total_nodes = 0;
};

// Throws std::invalid_argument when max_hires < 1 and InvalidInstance for an
// invalid instance.
HiringPlan plan_hiring(const RosterInstance& instance, const HiringOptions& options = {});

}  // namespace nrp
