// SPDX-License-Identifier: Apache-2.0
//
// LP-based branch-and-bound for IlpModel.
//
// Search: dive depth-first (floor child first) from the root; once a dive
// ends, continue from the open node with the lowest bound, or the most recent
// one while no incumbent exists. Branching uses pseudo-costs (mean bound gain per
// unit move, per column and direction, with the mean over all columns as the
// default) under the product rule, lowest index on ties. Presolve divides inequalities over integer
// columns by their coefficient divisor, rounds the right-hand side, and adds
// the cardinality rows implied by binary knapsacks. The root relaxation is then
// tightened by rounds of extended cover cuts on binary knapsack rows.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nrp/ilp.hpp"
#include "nrp/lp.hpp"

namespace nrp {

struct SolveOptions {
  double time_limit_seconds = 60.0;
  double integrality_tol = 1e-6;
  double rel_gap_tol = 1e-9;
  long node_limit = 1'000'000;
};

enum class MilpStatus { Optimal, Feasible, Infeasible, Unbounded, LimitReached };

const char* to_string(MilpStatus status);

struct SolveStats {
  long nodes = 0;
  long simplex_iterations = 0;
  double wall_seconds = 0.0;
  double root_bound = 0.0;
  long root_cuts = 0;
  bool warm_start_used = false;
};

struct MilpResult {
  MilpStatus status = MilpStatus::Infeasible;
  std::vector<double> values;
  double objective = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;  // relative, (objective - best_bound) / max(1, |objective|)
  SolveStats stats;

  bool has_solution() const {
    return status == MilpStatus::Optimal || status == MilpStatus::Feasible;
  }
};

// `incumbent`, when feasible for `model`, seeds the pruning bound.
MilpResult solve(const IlpModel& model, const SolveOptions& options = {},
                 const std::vector<double>* incumbent = nullptr);

}  // namespace nrp
