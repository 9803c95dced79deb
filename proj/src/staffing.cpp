// SPDX-License-Identifier: Apache-2.0

#include "nrp/staffing.hpp"

#include <stdexcept>

#include "nrp/encoder.hpp"
#include "nrp/roster_solver.hpp"

namespace nrp {

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::ImprovementBelowCost: return "improvement-below-c";
    case StopReason::MaxHires: return "max-hires";
    case StopReason::SolverLimit: return "solver-limit";
  }
  return "unknown";
}

UnderstaffingReport detect_understaffing(const RosterInstance& inst, const Roster& roster) {
  UnderstaffingReport report;
  for (int s = 0; s < inst.num_shifts(); ++s) {
    for (int t = 0; t < inst.num_days(); ++t) {
      const int units = roster.j(s, t);
      if (units <= 0) continue;
      UnderstaffingEntry e;
      e.shift_id = inst.shifts[s].id;
      e.day = inst.horizon.day_labels[t];
      e.slack_units = units;
      e.shortfall_patients =
          std::max(0, inst.demand[t] - inst.shifts[s].capacity_per_nurse * roster.staffed(s, t));
      report.total_slack += units;
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

namespace {

struct Solved {
  bool ok = false;
  Roster roster;
  std::string status;
  long nodes = 0;
};

Solved solve_optimal(const RosterInstance& inst, const SolveOptions& opts) {
  Solved out;
  const RosterSolution sol = solve_instance(inst, opts);
  out.status = to_string(sol.milp.status);
  out.nodes = sol.milp.stats.nodes;
  // Only proven optima are compared; a limited solve cannot justify a hire.
  if (sol.milp.status == MilpStatus::Optimal && sol.roster) {
    out.ok = true;
    out.roster = *sol.roster;
  }
  return out;
}

HiringIteration snapshot(const RosterInstance& inst, const Roster& roster) {
  HiringIteration it;
  it.nurse_count = inst.num_nurses();
  it.objective = roster.objective;
  it.total_slack = roster.total_slack();
  it.kpis = compute_kpis(inst, roster);
  return it;
}

}  // namespace

HiringPlan plan_hiring(const RosterInstance& instance, const HiringOptions& options) {
  if (options.max_hires < 1) throw std::invalid_argument("max_hires must be at least 1");
  const ValidationReport report = validate_instance(instance);
  if (!report.ok()) throw InvalidInstance(report);

  const NurseContract hire = options.hire_template.value_or(modal_contract(instance));
  const double cost = instance.penalties.hire_cost;

  HiringPlan plan;
  plan.final_instance = instance;
  Solved current = solve_optimal(instance, options.solve_options);
  plan.total_nodes += current.nodes;
  if (!current.ok) {
    plan.stop_reason = StopReason::SolverLimit;
    plan.detail = current.status;
    return plan;
  }
  plan.final_roster = current.roster;
  plan.iterations.push_back(snapshot(instance, current.roster));

  while (true) {
    if (plan.hires_accepted >= options.max_hires) {
      plan.stop_reason = StopReason::MaxHires;
      break;
    }
    RosterInstance candidate = with_additional_nurse(plan.final_instance, hire);
    const Solved next = solve_optimal(candidate, options.solve_options);
    plan.total_nodes += next.nodes;
    if (!next.ok) {
      plan.stop_reason = StopReason::SolverLimit;
      plan.detail = next.status;
      break;
    }
    if (!(next.roster.objective + cost < current.roster.objective)) {
      plan.stop_reason = StopReason::ImprovementBelowCost;
      break;
    }
    ++plan.hires_accepted;
    plan.final_instance = std::move(candidate);
    plan.final_roster = next.roster;
    plan.iterations.push_back(snapshot(plan.final_instance, next.roster));
    current = next;
  }
  return plan;
}

}  // namespace nrp
