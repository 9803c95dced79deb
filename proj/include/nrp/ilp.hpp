// SPDX-License-Identifier: Apache-2.0
//
// A small generic mixed-integer linear program representation.

#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace nrp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType { Binary, Integer, Continuous };

struct VarKind {
  VarType type = VarType::Continuous;
  double lower = 0.0;
  double upper = kInf;

  static VarKind binary() { return {VarType::Binary, 0.0, 1.0}; }
  static VarKind integer(double lo, double hi) { return {VarType::Integer, lo, hi}; }
  static VarKind continuous(double lo, double hi) { return {VarType::Continuous, lo, hi}; }

  bool is_integral() const { return type != VarType::Continuous; }
  bool operator==(const VarKind&) const = default;
};

struct Column {
  VarKind kind;
  std::string name;
  bool operator==(const Column&) const = default;
};

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Term {
  int column = 0;
  double coefficient = 0.0;
  bool operator==(const Term&) const = default;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string tag;
  bool operator==(const LinearConstraint&) const = default;
};

// min objective . x  subject to the constraints and column bounds.
struct IlpModel {
  std::vector<Column> columns;
  std::vector<LinearConstraint> constraints;
  std::vector<Term> objective;
  double objective_offset = 0.0;
  // When positive, the optimal objective of every subproblem obtained by
  // tightening integer bounds lies on the lattice offset + step * Z. Lets the
  // search round node bounds up. Zero disables it.
  double objective_step = 0.0;

  int num_columns() const { return static_cast<int>(columns.size()); }
  int num_rows() const { return static_cast<int>(constraints.size()); }

  int add_column(VarKind kind, std::string name) {
    columns.push_back({kind, std::move(name)});
    return num_columns() - 1;
  }

  double evaluate(const std::vector<double>& values) const;
  // Largest bound or row violation of `values`.
  double max_violation(const std::vector<double>& values) const;
  // Empty when well-formed, else a description of the first defect.
  std::string check_well_formed() const;

  bool operator==(const IlpModel&) const = default;
};

}  // namespace nrp
