// SPDX-License-Identifier: Apache-2.0

#include "nrp/kpi.hpp"

#include <algorithm>

#include "nrp/encoder.hpp"

namespace nrp {

KpiReport compute_kpis(const RosterInstance& inst, const Roster& roster) {
  KpiReport k;
  k.nurse_count = inst.num_nurses();
  bool first_nurse = true;
  bool first_week = true;
  for (int i = 0; i < inst.num_nurses(); ++i) {
    const double load = weighted_workload(inst, roster, i);
    k.min_workload = first_nurse ? load : std::min(k.min_workload, load);
    k.max_workload = first_nurse ? load : std::max(k.max_workload, load);
    first_nurse = false;
    double overtime = 0.0;
    for (int w = 0; w < inst.num_weeks(); ++w) {
      const double h = weekly_hours(inst, roster, i, w);
      k.min_weekly_hours = first_week ? h : std::min(k.min_weekly_hours, h);
      k.max_weekly_hours = first_week ? h : std::max(k.max_weekly_hours, h);
      first_week = false;
      overtime += std::max(0.0, h - inst.nurses[i].contract.h_std);
    }
    k.per_nurse_overtime.emplace_back(inst.nurses[i].id, overtime);
    k.total_overtime_hours += overtime;
  }
  k.total_slack_units = roster.total_slack();
  k.objective = objective_of(inst, roster);
  return k;
}

KpiDelta kpi_delta(const KpiReport& before, const KpiReport& after) {
  KpiDelta d;
  d.min_workload = after.min_workload - before.min_workload;
  d.max_workload = after.max_workload - before.max_workload;
  d.min_weekly_hours = after.min_weekly_hours - before.min_weekly_hours;
  d.max_weekly_hours = after.max_weekly_hours - before.max_weekly_hours;
  d.total_overtime_hours = after.total_overtime_hours - before.total_overtime_hours;
  d.total_slack_units = after.total_slack_units - before.total_slack_units;
  d.objective = after.objective - before.objective;
  d.nurse_count = after.nurse_count - before.nurse_count;

  auto lookup = [](const KpiReport& r, const std::string& id) {
    for (const auto& [nid, v] : r.per_nurse_overtime) {
      if (nid == id) return v;
    }
    return 0.0;
  };
  std::vector<std::string> ids;
  for (const auto& entry : before.per_nurse_overtime) ids.push_back(entry.first);
  for (const auto& entry : after.per_nurse_overtime) {
    if (std::find(ids.begin(), ids.end(), entry.first) == ids.end()) ids.push_back(entry.first);
  }
  for (const std::string& id : ids) {
    d.per_nurse_overtime.emplace_back(id, lookup(after, id) - lookup(before, id));
  }
  return d;
}

}  // namespace nrp
