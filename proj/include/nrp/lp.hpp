// SPDX-License-Identifier: Apache-2.0
//
// Bounded-variable simplex over a dense tableau.
//
// Every row i of the model gets a logical variable r_i = a_i . x whose bounds
// encode the row sense, so the working system is [-A | I] (x, r) = 0 with box
// bounds on all n + m variables. Primal simplex (composite phase 1) handles
// cold starts; dual simplex re-optimizes after bound changes, which is what
// branch-and-bound needs.

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "nrp/ilp.hpp"

namespace nrp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit };

const char* to_string(LpStatus status);

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, Free };

// Basis over n structural columns followed by m logical (row) columns.
struct LpBasis {
  std::vector<int> basic;          // m entries, column in [0, n + m)
  std::vector<VarStatus> status;   // n + m entries
  bool operator==(const LpBasis&) const = default;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;          // structural columns
  double objective = 0.0;
  std::vector<double> duals;           // one per row: d_j = c_j - duals . A_j
  std::vector<double> reduced_costs;   // structural columns
  LpBasis basis;
  long iterations = 0;
};

struct LpOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  long max_iterations = 0;  // 0 = automatic, scaled by model size
};

class LpEngine {
 public:
  explicit LpEngine(const IlpModel& model, LpOptions options = {});

  int num_columns() const { return n_; }
  int num_rows() const { return m_; }

  double lower(int column) const { return lo_[column]; }
  double upper(int column) const { return up_[column]; }
  void set_bounds(int column, double lower, double upper);

  // Re-optimizes from the current basis under the current bounds.
  LpStatus solve();

  // solve() returns TimeLimit once this passes.
  void set_deadline(std::chrono::steady_clock::time_point deadline) { deadline_ = deadline; }

  // Replaces the basis, refactoring the tableau. Returns false and keeps a
  // repaired basis if the requested one is singular or malformed.
  bool load_basis(const LpBasis& basis);

  LpResult result() const;
  std::vector<double> values() const;
  double objective() const;
  LpStatus status() const { return status_; }
  long iterations() const { return iterations_; }

 private:
  double& at(int row, int col) { return tab_[static_cast<std::size_t>(row) * width_ + col]; }
  double at(int row, int col) const { return tab_[static_cast<std::size_t>(row) * width_ + col]; }

  void build_initial();
  void refactor();
  void perturb_costs();
  void shift_wrong_signs();
  bool refactor_due() const;
  void pivot(int row, int col);
  void place_nonbasic(int col);
  void recompute_basics();
  void recompute_reduced_costs();
  double infeasibility(int col) const;
  bool make_dual_feasible();
  LpStatus primal_simplex();
  LpStatus dual_simplex();
  double row_residual() const;
  long iteration_budget() const;
  bool out_of_iterations() const;
  bool past_deadline();

  const IlpModel* model_;
  LpOptions opt_;
  int n_ = 0;
  int m_ = 0;
  int width_ = 0;
  std::vector<double> tab_;
  std::vector<double> cost_;
  std::vector<double> d_;
  std::vector<double> x_;
  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<int> head_;
  std::vector<int> row_of_;  // -1 when nonbasic
  std::vector<VarStatus> stat_;
  LpStatus status_ = LpStatus::Infeasible;
  long iterations_ = 0;
  long solve_start_iterations_ = 0;
  long pivots_since_refactor_ = 0;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  int deadline_countdown_ = 0;
  std::vector<int> scratch_;
};

// Solves the continuous relaxation of `model`.
LpResult solve_lp(const IlpModel& model, const std::optional<LpBasis>& basis_hint = std::nullopt,
                  LpOptions options = {});

}  // namespace nrp
