// SPDX-License-Identifier: Apache-2.0
//
// Domain types for the nurse rostering problem.
//
// Everything is index based: shifts, nurses and days are addressed by their
// position in the instance vectors. String ids are only used at the I/O edge.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nrp {

struct ShiftType {
  std::string id;
  std::string name;
  double duration_hours = 0.0;
  int capacity_per_nurse = 1;  // patients one nurse covers on this shift
  int min_staff = 0;           // hard floor on nurses per shift-day
  bool is_night = false;

  bool operator==(const ShiftType&) const = default;
};

struct Horizon {
  int weeks = 1;
  int days_per_week = 7;
  std::vector<std::string> day_labels;

  int num_days() const { return weeks * days_per_week; }
  // 0-based week of a 0-based day position.
  int week_of(int day) const { return day / days_per_week; }
  // Last two positions of a 7-day week. Other week lengths have no weekend.
  bool is_weekend(int day) const {
    return days_per_week == 7 && (day % 7) >= 5;
  }
  std::optional<int> day_index(const std::string& label) const;

  bool operator==(const Horizon&) const = default;
};

struct NurseContract {
  double h_min = 0.0;
  double h_max = 0.0;
  double h_std = 0.0;  // overtime accrues above this many weekly hours

  bool operator==(const NurseContract&) const = default;
};

struct Nurse {
  std::string id;
  std::string name;
  NurseContract contract;

  bool operator==(const Nurse&) const = default;
};

// Weight of each (shift, day) pair, stored shift-major.
class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(int num_shifts, int num_days, double fill = 1.0)
      : num_shifts_(num_shifts),
        num_days_(num_days),
        w_(static_cast<std::size_t>(num_shifts) * num_days, fill) {}

  double at(int shift, int day) const { return w_[index(shift, day)]; }
  void set(int shift, int day, double value) { w_[index(shift, day)] = value; }

  int num_shifts() const { return num_shifts_; }
  int num_days() const { return num_days_; }
  double max() const;

  bool operator==(const WeightTable&) const = default;

 private:
  std::size_t index(int shift, int day) const {
    return static_cast<std::size_t>(shift) * num_days_ + day;
  }

  int num_shifts_ = 0;
  int num_days_ = 0;
  std::vector<double> w_;
};

struct Penalties {
  double p1 = 1.0;        // overtime weight
  double big_m = 1e6;     // slack weight
  double hire_cost = 0.0; // price of one extra nurse, in objective units

  bool operator==(const Penalties&) const = default;
};

struct RosterInstance {
  std::vector<ShiftType> shifts;
  std::vector<Nurse> nurses;
  Horizon horizon;
  std::vector<int> demand;  // patients per day, indexed by day position
  WeightTable weights;
  Penalties penalties;

  int num_shifts() const { return static_cast<int>(shifts.size()); }
  int num_nurses() const { return static_cast<int>(nurses.size()); }
  int num_days() const { return horizon.num_days(); }
  int num_weeks() const { return horizon.weeks; }

  bool operator==(const RosterInstance&) const = default;
};

// A roster: assignments, slack and the derived overtime/peak quantities.
class Roster {
 public:
  Roster() = default;
  Roster(int nurses, int shifts, int days, int weeks);
  static Roster empty_for(const RosterInstance& instance);

  bool x(int nurse, int shift, int day) const {
    return x_[x_index(nurse, shift, day)] != 0;
  }
  void set_x(int nurse, int shift, int day, bool on) {
    x_[x_index(nurse, shift, day)] = on ? 1 : 0;
  }
  int j(int shift, int day) const { return j_[shift * days_ + day]; }
  void set_j(int shift, int day, int units) { j_[shift * days_ + day] = units; }
  double beta(int nurse, int week) const { return beta_[nurse * weeks_ + week]; }
  void set_beta(int nurse, int week, double hours) {
    beta_[nurse * weeks_ + week] = hours;
  }

  // Shift worked by a nurse on a day, if any (first match).
  std::optional<int> shift_on(int nurse, int day) const;
  int staffed(int shift, int day) const;
  int total_slack() const;

  int num_nurses() const { return nurses_; }
  int num_shifts() const { return shifts_; }
  int num_days() const { return days_; }
  int num_weeks() const { return weeks_; }

  double z = 0.0;
  double objective = 0.0;

  bool operator==(const Roster&) const = default;

 private:
  std::size_t x_index(int nurse, int shift, int day) const {
    return (static_cast<std::size_t>(nurse) * days_ + day) * shifts_ + shift;
  }

  int nurses_ = 0;
  int shifts_ = 0;
  int days_ = 0;
  int weeks_ = 0;
  std::vector<std::uint8_t> x_;
  std::vector<int> j_;
  std::vector<double> beta_;
};

struct Issue {
  std::string code;      // stable machine-readable identifier
  std::string message;
  std::string location;  // e.g. "nurses[1]", "shifts.csv:3:duration_hours"

  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;

  bool ok() const { return errors.empty(); }
  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate_instance(const RosterInstance& instance);

// Night > day on every day; weekend >= weekday for every shift.
WeightTable default_weights(const std::vector<ShiftType>& shifts,
                            const Horizon& horizon);

// Copy of `instance` with one fresh nurse carrying `contract`.
RosterInstance with_additional_nurse(const RosterInstance& instance,
                                     const NurseContract& contract);

// Most frequent contract among the nurses (first seen wins ties).
NurseContract modal_contract(const RosterInstance& instance);

// Weekly hours of one nurse.
double weekly_hours(const RosterInstance& instance, const Roster& roster,
                    int nurse, int week);
// Weighted workload sum_{s,t} w_{s,t} x(i,s,t).
double weighted_workload(const RosterInstance& instance, const Roster& roster,
                         int nurse);

// Recomputes beta, z and the objective of `roster` from its x and j.
void recompute_derived(const RosterInstance& instance, Roster& roster);

// Walks every roster invariant directly. Returns one issue per violation.
std::vector<Issue> check_roster(const RosterInstance& instance,
                                const Roster& roster, double tol = 1e-9);

}  // namespace nrp
