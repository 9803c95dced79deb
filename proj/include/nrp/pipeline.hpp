// SPDX-License-Identifier: Apache-2.0
//
// Parameter handling and end-to-end runs shared by the CLI and the service,
// so both front ends apply identical defaults and produce identical results.

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "nrp/kpi.hpp"
#include "nrp/milp.hpp"
#include "nrp/model.hpp"
#include "nrp/staffing.hpp"

namespace nrp {

inline constexpr double kDefaultTimeLimitSeconds = 60.0;

struct RunParams {
  std::optional<double> p1;
  std::optional<double> hire_cost;
  std::optional<double> big_m;
  std::optional<double> time_limit_seconds;
  std::optional<int> max_hires;
  std::optional<NurseContract> hire_template;

  bool operator==(const RunParams&) const = default;
};

// Copy of `instance` with the penalty overrides applied. Throws
// InvalidInstance when the overridden instance no longer validates.
RosterInstance apply_params(const RosterInstance& instance, const RunParams& params);
SolveOptions solve_options_for(const RunParams& params);
HiringOptions hiring_options_for(const RunParams& params);

// {p1?, hire_cost?, big_m?, time_limit?, max_hires?, template?: {h_min, h_std, h_max}}.
// Throws std::invalid_argument naming the offending key.
RunParams params_from_json(const nlohmann::json& doc);
nlohmann::json params_to_json(const RunParams& params);

struct SolveOutcome {
  MilpResult milp;
  std::optional<Roster> roster;
  std::optional<KpiReport> kpis;
  std::optional<UnderstaffingReport> understaffing;
};

SolveOutcome run_solve(const RosterInstance& instance, const RunParams& params);

// Result documents. Both carry "status", "objective", "slack", "hires".
nlohmann::json solve_document(const RosterInstance& instance, const SolveOutcome& outcome);
nlohmann::json staff_plan_document(const HiringPlan& plan);

// Shortest round-trip decimal text.
std::string format_number(double value);

}  // namespace nrp
