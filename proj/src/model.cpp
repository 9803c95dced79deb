// SPDX-License-Identifier: Apache-2.0

#include "nrp/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace nrp {

std::optional<int> Horizon::day_index(const std::string& label) const {
  auto it = std::find(day_labels.begin(), day_labels.end(), label);
  if (it == day_labels.end()) return std::nullopt;
  return static_cast<int>(it - day_labels.begin());
}

double WeightTable::max() const {
  double m = 0.0;
  for (double v : w_) m = std::max(m, v);
  return m;
}

Roster::Roster(int nurses, int shifts, int days, int weeks)
    : nurses_(nurses),
      shifts_(shifts),
      days_(days),
      weeks_(weeks),
      x_(static_cast<std::size_t>(nurses) * shifts * days, 0),
      j_(static_cast<std::size_t>(shifts) * days, 0),
      beta_(static_cast<std::size_t>(nurses) * weeks, 0.0) {}

Roster Roster::empty_for(const RosterInstance& instance) {
  return Roster(instance.num_nurses(), instance.num_shifts(),
                instance.num_days(), instance.num_weeks());
}

std::optional<int> Roster::shift_on(int nurse, int day) const {
  for (int s = 0; s < shifts_; ++s) {
    if (x(nurse, s, day)) return s;
  }
  return std::nullopt;
}

int Roster::staffed(int shift, int day) const {
  int count = 0;
  for (int i = 0; i < nurses_; ++i) count += x(i, shift, day) ? 1 : 0;
  return count;
}

int Roster::total_slack() const {
  int total = 0;
  for (int v : j_) total += v;
  return total;
}

namespace {

std::string indexed(const char* what, std::size_t i) {
  std::ostringstream os;
  os << what << "[" << i << "]";
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate_instance(const RosterInstance& inst) {
  ValidationReport report;
  auto error = [&](std::string code, std::string message, std::string where) {
    report.errors.push_back({std::move(code), std::move(message), std::move(where)});
  };
  auto warn = [&](std::string code, std::string message, std::string where) {
    report.warnings.push_back({std::move(code), std::move(message), std::move(where)});
  };

  if (inst.shifts.empty()) error("empty-shifts", "instance has no shift types", "shifts");
  if (inst.nurses.empty()) error("empty-nurses", "instance has no nurses", "nurses");

  std::set<std::string> seen;
  double max_duration = 0.0;
  for (std::size_t s = 0; s < inst.shifts.size(); ++s) {
    const ShiftType& shift = inst.shifts[s];
    if (!seen.insert(shift.id).second) {
      error("duplicate-shift-id", "duplicate shift id '" + shift.id + "'", indexed("shifts", s));
    }
    if (!(shift.duration_hours > 0.0)) {
      error("nonpositive-duration", "shift duration must be positive", indexed("shifts", s));
    }
    if (shift.capacity_per_nurse < 1) {
      error("nonpositive-capacity", "capacity per nurse must be at least 1", indexed("shifts", s));
    }
    if (shift.min_staff < 0) {
      error("negative-min-staff", "min_staff must be non-negative", indexed("shifts", s));
    } else if (shift.min_staff > static_cast<int>(inst.nurses.size())) {
      warn("min-staff-exceeds-nurses",
           "min_staff " + std::to_string(shift.min_staff) + " exceeds the number of nurses",
           indexed("shifts", s));
    }
    max_duration = std::max(max_duration, shift.duration_hours);
  }

  seen.clear();
  for (std::size_t i = 0; i < inst.nurses.size(); ++i) {
    const Nurse& nurse = inst.nurses[i];
    const NurseContract& c = nurse.contract;
    if (!seen.insert(nurse.id).second) {
      error("duplicate-nurse-id", "duplicate nurse id '" + nurse.id + "'", indexed("nurses", i));
    }
    if (c.h_min < 0.0) {
      error("negative-h-min", "h_min must be non-negative", indexed("nurses", i));
    }
    if (!(c.h_max > 0.0)) {
      error("nonpositive-h-max", "h_max must be positive", indexed("nurses", i));
    }
    if (c.h_min > c.h_max) {
      error("contract-bounds-inverted",
            "contract bounds inverted: h_min " + num(c.h_min) + " > h_max " + num(c.h_max),
            indexed("nurses", i));
    } else if (c.h_std < c.h_min || c.h_std > c.h_max) {
      error("contract-std-out-of-range", "h_std must lie within [h_min, h_max]",
            indexed("nurses", i));
    }
    if (inst.horizon.days_per_week > 0 &&
        c.h_min > inst.horizon.days_per_week * max_duration) {
      warn("h-min-unreachable",
           "weekly minimum " + num(c.h_min) + " exceeds what one shift per day can reach",
           indexed("nurses", i));
    }
  }

  const Horizon& h = inst.horizon;
  bool horizon_ok = true;
  if (h.weeks < 1 || h.days_per_week < 1) {
    error("horizon-shape", "weeks and days_per_week must be positive", "horizon");
    horizon_ok = false;
  } else if (static_cast<int>(h.day_labels.size()) != h.num_days()) {
    error("horizon-shape",
          "horizon has " + std::to_string(h.day_labels.size()) + " day labels, expected " +
              std::to_string(h.num_days()),
          "horizon.day_labels");
    horizon_ok = false;
  }
  seen.clear();
  for (std::size_t t = 0; t < h.day_labels.size(); ++t) {
    if (!seen.insert(h.day_labels[t]).second) {
      error("duplicate-day-label", "duplicate day label '" + h.day_labels[t] + "'",
            indexed("horizon.day_labels", t));
    }
  }

  if (static_cast<int>(inst.demand.size()) != h.num_days()) {
    error("demand-horizon-mismatch",
          "demand/horizon mismatch: " + std::to_string(inst.demand.size()) +
              " demand entries for " + std::to_string(h.num_days()) + " days",
          "demand");
  } else {
    bool any_demand = false;
    for (std::size_t t = 0; t < inst.demand.size(); ++t) {
      if (inst.demand[t] < 0) {
        error("negative-demand", "patient count must be non-negative", indexed("demand", t));
      }
      any_demand = any_demand || inst.demand[t] > 0;
    }
    if (!any_demand && horizon_ok) {
      warn("zero-demand", "no patients over the whole horizon", "demand");
    }
  }

  if (inst.weights.num_shifts() != inst.num_shifts() ||
      inst.weights.num_days() != h.num_days()) {
    error("weight-shape", "weight table does not cover every (shift, day) pair", "weights");
  } else {
    for (int s = 0; s < inst.weights.num_shifts(); ++s) {
      for (int t = 0; t < inst.weights.num_days(); ++t) {
        if (!(inst.weights.at(s, t) > 0.0)) {
          error("nonpositive-weight", "weights must be positive",
                "weights[" + std::to_string(s) + "][" + std::to_string(t) + "]");
        }
      }
    }
  }

  const Penalties& p = inst.penalties;
  if (p.p1 < 0.0) error("negative-penalty", "p1 must be non-negative", "penalties.p1");
  if (p.hire_cost < 0.0) {
    error("negative-penalty", "hire_cost must be non-negative", "penalties.hire_cost");
  }
  if (!(p.big_m > 0.0)) {
    error("big-m-dominance", "big_m must be positive", "penalties.big_m");
  } else if (!(p.big_m > p.p1) || !(p.big_m > inst.weights.max())) {
    error("big-m-dominance", "big_m must exceed p1 and every weight", "penalties.big_m");
  } else if (report.errors.empty()) {
    // M > p1 * (h_max - h_std) * q * n + sum_t max_s w guarantees one slack
    // unit always costs more than any reshuffle of real assignments.
    double overtime_room = 0.0;
    for (const Nurse& nurse : inst.nurses) {
      overtime_room += nurse.contract.h_max - nurse.contract.h_std;
    }
    double bound = p.p1 * overtime_room * h.weeks;
    for (int t = 0; t < h.num_days(); ++t) {
      double m = 0.0;
      for (int s = 0; s < inst.num_shifts(); ++s) m = std::max(m, inst.weights.at(s, t));
      bound += m;
    }
    if (!(p.big_m > bound)) {
      warn("big-m-weak",
           "big_m " + num(p.big_m) + " does not dominate the workload and overtime terms (" +
               num(bound) + "); slack may be used when coverage is possible",
           "penalties.big_m");
    }
  }
  return report;
}

WeightTable default_weights(const std::vector<ShiftType>& shifts, const Horizon& horizon) {
  WeightTable table(static_cast<int>(shifts.size()), horizon.num_days());
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    for (int t = 0; t < horizon.num_days(); ++t) {
      const bool weekend = horizon.is_weekend(t);
      double w = 0.0;
      if (shifts[s].is_night) {
        w = weekend ? 3.0 : 2.0;
      } else {
        w = weekend ? 1.5 : 1.0;
      }
      table.set(static_cast<int>(s), t, w);
    }
  }
  return table;
}

RosterInstance with_additional_nurse(const RosterInstance& instance,
                                     const NurseContract& contract) {
  RosterInstance next = instance;
  std::set<std::string> ids;
  for (const Nurse& n : instance.nurses) ids.insert(n.id);
  int k = 1;
  std::string id;
  do {
    id = "hire-" + std::to_string(k++);
  } while (ids.count(id) != 0);
  next.nurses.push_back(Nurse{id, "Additional nurse " + id.substr(5), contract});
  return next;
}

NurseContract modal_contract(const RosterInstance& instance) {
  std::vector<std::pair<NurseContract, int>> counts;
  for (const Nurse& n : instance.nurses) {
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& e) { return e.first == n.contract; });
    if (it == counts.end()) {
      counts.emplace_back(n.contract, 1);
    } else {
      ++it->second;
    }
  }
  if (counts.empty()) return {};
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

double weekly_hours(const RosterInstance& inst, const Roster& roster, int nurse, int week) {
  const int dpw = inst.horizon.days_per_week;
  double hours = 0.0;
  for (int t = week * dpw; t < (week + 1) * dpw; ++t) {
    for (int s = 0; s < inst.num_shifts(); ++s) {
      if (roster.x(nurse, s, t)) hours += inst.shifts[s].duration_hours;
    }
  }
  return hours;
}

double weighted_workload(const RosterInstance& inst, const Roster& roster, int nurse) {
  double load = 0.0;
  for (int t = 0; t < inst.num_days(); ++t) {
    for (int s = 0; s < inst.num_shifts(); ++s) {
      if (roster.x(nurse, s, t)) load += inst.weights.at(s, t);
    }
  }
  return load;
}

void recompute_derived(const RosterInstance& inst, Roster& roster) {
  double overtime = 0.0;
  double z = 0.0;
  for (int i = 0; i < inst.num_nurses(); ++i) {
    for (int k = 0; k < inst.num_weeks(); ++k) {
      const double beta =
          std::max(0.0, weekly_hours(inst, roster, i, k) - inst.nurses[i].contract.h_std);
      roster.set_beta(i, k, beta);
      overtime += beta;
    }
    z = std::max(z, weighted_workload(inst, roster, i));
  }
  roster.z = z;
  roster.objective = z + inst.penalties.p1 * overtime +
                     inst.penalties.big_m * static_cast<double>(roster.total_slack());
}

std::vector<Issue> check_roster(const RosterInstance& inst, const Roster& roster, double tol) {
  std::vector<Issue> issues;
  auto fail = [&](std::string code, std::string where) {
    issues.push_back({code, code + " violated", std::move(where)});
  };
  if (roster.num_nurses() != inst.num_nurses() || roster.num_shifts() != inst.num_shifts() ||
      roster.num_days() != inst.num_days() || roster.num_weeks() != inst.num_weeks()) {
    fail("Shape", "roster");
    return issues;
  }
  const int n = inst.num_nurses();
  const int S = inst.num_shifts();
  const int T = inst.num_days();
  auto at = [](int a, int b) { return "[" + std::to_string(a) + "," + std::to_string(b) + "]"; };

  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) {
      int count = 0;
      for (int s = 0; s < S; ++s) count += roster.x(i, s, t) ? 1 : 0;
      if (count > 1) fail("Eq1", "Eq1" + at(i, t));
    }
    for (int k = 0; k < inst.num_weeks(); ++k) {
      const double hours = weekly_hours(inst, roster, i, k);
      const NurseContract& c = inst.nurses[i].contract;
      if (hours < c.h_min - tol) fail("Eq2", "Eq2" + at(i, k));
      if (hours > c.h_max + tol) fail("Eq3", "Eq3" + at(i, k));
      const double beta = std::max(0.0, hours - c.h_std);
      if (std::abs(roster.beta(i, k) - beta) > tol) fail("Beta", "BLink" + at(i, k));
    }
    for (int s = 0; s < S; ++s) {
      if (!inst.shifts[s].is_night) continue;
      for (int t = 0; t + 1 < T; ++t) {
        if (roster.x(i, s, t) && roster.shift_on(i, t + 1)) {
          fail("Eq5", "Eq5[" + std::to_string(i) + "," + std::to_string(s) + "," +
                          std::to_string(t) + "]");
        }
      }
    }
  }
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < T; ++t) {
      const int staffed = roster.staffed(s, t);
      if (roster.j(s, t) < 0) fail("Slack", "J" + at(s, t));
      const long long coverage =
          static_cast<long long>(inst.shifts[s].capacity_per_nurse) * (staffed + roster.j(s, t));
      if (coverage < inst.demand[t]) fail("Eq7", "Eq7" + at(s, t));
      if (staffed < inst.shifts[s].min_staff) fail("MinStaff", "MinStaff" + at(s, t));
    }
  }
  double z = 0.0;
  double overtime = 0.0;
  for (int i = 0; i < n; ++i) {
    z = std::max(z, weighted_workload(inst, roster, i));
    for (int k = 0; k < inst.num_weeks(); ++k) overtime += roster.beta(i, k);
  }
  if (std::abs(roster.z - z) > tol * std::max(1.0, z)) fail("Z", "ZLink");
  const double objective = z + inst.penalties.p1 * overtime +
                           inst.penalties.big_m * static_cast<double>(roster.total_slack());
  if (std::abs(roster.objective - objective) > 1e-6 * std::max(1.0, std::abs(objective))) {
    fail("Objective", "objective");
  }
  return issues;
}

}  // namespace nrp
