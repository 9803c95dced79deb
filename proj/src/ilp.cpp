// SPDX-License-Identifier: Apache-2.0

#include "nrp/ilp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace nrp {

double IlpModel::evaluate(const std::vector<double>& values) const {
  double total = objective_offset;
  for (const Term& t : objective) total += t.coefficient * values[t.column];
  return total;
}

double IlpModel::max_violation(const std::vector<double>& values) const {
  double worst = 0.0;
  for (int c = 0; c < num_columns(); ++c) {
    worst = std::max(worst, columns[c].kind.lower - values[c]);
    worst = std::max(worst, values[c] - columns[c].kind.upper);
  }
  for (const LinearConstraint& row : constraints) {
    double activity = 0.0;
    for (const Term& t : row.terms) activity += t.coefficient * values[t.column];
    if (row.sense != Sense::GreaterEqual) worst = std::max(worst, activity - row.rhs);
    if (row.sense != Sense::LessEqual) worst = std::max(worst, row.rhs - activity);
  }
  return worst;
}

std::string IlpModel::check_well_formed() const {
  for (int c = 0; c < num_columns(); ++c) {
    const VarKind& k = columns[c].kind;
    if (std::isnan(k.lower) || std::isnan(k.upper) || k.lower > k.upper) {
      return "column " + columns[c].name + " has inconsistent bounds";
    }
    if (k.lower == kInf || k.upper == -kInf) {
      return "column " + columns[c].name + " has an unreachable bound";
    }
  }
  auto in_range = [&](int col) { return col >= 0 && col < num_columns(); };
  for (const LinearConstraint& row : constraints) {
    std::set<int> cols;
    for (const Term& t : row.terms) {
      if (!in_range(t.column)) return "constraint " + row.tag + " references a missing column";
      if (!cols.insert(t.column).second) {
        return "constraint " + row.tag + " repeats a column";
      }
      if (!std::isfinite(t.coefficient)) return "constraint " + row.tag + " has a bad coefficient";
    }
    if (!std::isfinite(row.rhs)) return "constraint " + row.tag + " has a non-finite rhs";
  }
  for (const Term& t : objective) {
    if (!in_range(t.column)) return "objective references a missing column";
  }
  return {};
}

}  // namespace nrp
