// SPDX-License-Identifier: Apache-2.0
//
// Key performance indicators of a roster and field-wise deltas between two.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nrp/model.hpp"

namespace nrp {

struct KpiReport {
  double min_workload = 0.0;  // weighted, over nurses
  double max_workload = 0.0;
  double min_weekly_hours = 0.0;  // over nurse x week
  double max_weekly_hours = 0.0;
  double total_overtime_hours = 0.0;
  std::vector<std::pair<std::string, double>> per_nurse_overtime;  // instance order
  int total_slack_units = 0;
  double objective = 0.0;
  int nurse_count = 0;

  bool operator==(const KpiReport&) const = default;
};

struct KpiDelta {
  double min_workload = 0.0;
  double max_workload = 0.0;
  double min_weekly_hours = 0.0;
  double max_weekly_hours = 0.0;
  double total_overtime_hours = 0.0;
  // Union of nurse ids: `before` order first, then ids only in `after`.
  // A nurse missing from one side counts as zero overtime there.
  std::vector<std::pair<std::string, double>> per_nurse_overtime;
  int total_slack_units = 0;
  double objective = 0.0;
  int nurse_count = 0;

  bool operator==(const KpiDelta&) const = default;
};

KpiReport compute_kpis(const RosterInstance& instance, const Roster& roster);

// after - before, field by field.
KpiDelta kpi_delta(const KpiReport& before, const KpiReport& after);

}  // namespace nrp
