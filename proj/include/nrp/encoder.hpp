// SPDX-License-Identifier: Apache-2.0
//
// Lowering of a RosterInstance to an IlpModel and back.
//
// Column layout: X(i,s,t) nurse-major then day then shift, followed by
// J(s,t), B(i,k) and the single peak-workload column Z. Rows are emitted in
// the order Eq1, Eq2, Eq3, Eq5, Eq7, MinStaff, ZLink, BLink.

#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nrp/ilp.hpp"
#include "nrp/model.hpp"

namespace nrp {

enum class VarRole { X, J, B, Z };

struct VarKey {
  VarRole role = VarRole::Z;
  int a = 0;  // X: nurse, J: shift, B: nurse
  int b = 0;  // X: shift, J: day,   B: week
  int c = 0;  // X: day
  bool operator==(const VarKey&) const = default;
};

class VarIndex {
 public:
  VarIndex() = default;
  VarIndex(int nurses, int shifts, int days, int weeks)
      : nurses_(nurses), shifts_(shifts), days_(days), weeks_(weeks) {}

  int x(int nurse, int shift, int day) const {
    return (nurse * days_ + day) * shifts_ + shift;
  }
  int j(int shift, int day) const { return num_x() + shift * days_ + day; }
  int b(int nurse, int week) const { return num_x() + num_j() + nurse * weeks_ + week; }
  int z() const { return num_x() + num_j() + num_b(); }

  int num_x() const { return nurses_ * shifts_ * days_; }
  int num_j() const { return shifts_ * days_; }
  int num_b() const { return nurses_ * weeks_; }
  int size() const { return z() + 1; }

  VarKey key(int column) const;

 private:
  int nurses_ = 0;
  int shifts_ = 0;
  int days_ = 0;
  int weeks_ = 0;
};

class InvalidInstance : public std::invalid_argument {
 public:
  explicit InvalidInstance(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EncodedModel {
  IlpModel model;
  VarIndex index;
};

// Throws InvalidInstance when validate_instance reports errors.
EncodedModel encode(const RosterInstance& instance);

// Rounds integer columns (failing beyond `integrality_tol`) and recomputes
// beta, z and the objective from x. When `solver_objective` is given the
// recomputed objective must match it within 1e-6 relative.
Roster decode(const std::vector<double>& values, const VarIndex& index,
              const RosterInstance& instance,
              std::optional<double> solver_objective = std::nullopt,
              double integrality_tol = 1e-6);

// Column vector representing `roster` under `index` (beta and z recomputed).
std::vector<double> to_values(const Roster& roster, const VarIndex& index,
                              const RosterInstance& instance);

// z + p1 * sum beta + M * sum j, computed straight from the x matrix.
double objective_of(const RosterInstance& instance, const Roster& roster);

// Lattice step of optimal objective values, or 0 if it cannot be derived.
double objective_lattice_step(const RosterInstance& instance);

}  // namespace nrp
