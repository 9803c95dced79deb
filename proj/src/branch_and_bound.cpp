// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "nrp/milp.hpp"

namespace nrp {

const char* to_string(MilpStatus status) {
  switch (status) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::Feasible: return "feasible";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::Unbounded: return "unbounded";
    case MilpStatus::LimitReached: return "limit";
  }
  return "unknown";
}

namespace {

struct BoundChange {
  int column;
  double lower;
  double upper;
};

struct Node {
  double bound;
  int depth;
  long id;
  std::vector<BoundChange> changes;
  // The branching that created this node, for pseudo-cost updates.
  int branch_column = -1;
  bool branch_up = false;
  double branch_distance = 0.0;  // how far the parent value moved
};

// Average objective gain per unit change, per column and direction.
struct PseudoCosts {
  std::vector<double> sum[2];
  std::vector<int> count[2];

  explicit PseudoCosts(int columns) {
    for (int d = 0; d < 2; ++d) {
      sum[d].assign(columns, 0.0);
      count[d].assign(columns, 0);
    }
  }
  void record(int column, bool up, double gain_per_unit) {
    sum[up][column] += gain_per_unit;
    ++count[up][column];
  }
  // Mean over columns with history; 1 when there is none.
  double average(bool up) const {
    double total = 0.0;
    int n = 0;
    for (std::size_t c = 0; c < sum[up].size(); ++c) {
      if (count[up][c] > 0) {
        total += sum[up][c] / count[up][c];
        ++n;
      }
    }
    return n > 0 ? total / n : 1.0;
  }
  double estimate(int column, bool up, double fallback) const {
    return count[up][column] > 0 ? sum[up][column] / count[up][column] : fallback;
  }
};

// Common divisor of the coefficients of a row over integer columns only, or
// zero when there is none worth using.
double row_divisor(const IlpModel& model, const LinearConstraint& row) {
  if (row.terms.empty()) return 0.0;
  bool integral = true;
  double smallest = kInf;
  for (const Term& t : row.terms) {
    if (!model.columns[t.column].kind.is_integral() || t.coefficient == 0.0) return 0.0;
    const double a = std::abs(t.coefficient);
    integral = integral && a < 1e9 && std::abs(a - std::round(a)) <= 1e-9;
    smallest = std::min(smallest, a);
  }
  if (integral) {
    long long g = 0;
    for (const Term& t : row.terms) g = std::gcd(g, std::llround(std::abs(t.coefficient)));
    return static_cast<double>(g);
  }
  for (const Term& t : row.terms) {
    const double ratio = std::abs(t.coefficient) / smallest;
    if (std::abs(ratio - std::round(ratio)) > 1e-9) return 0.0;
  }
  return smallest;
}

// Divides each all-integer inequality by its coefficient divisor and rounds
// the right-hand side inward, then appends the cardinality rows implied by
// binary knapsacks. The integer feasible set is unchanged and the relaxation
// gets tighter: a.x + a.j >= d becomes x + j >= ceil(d / a).
IlpModel tighten_integer_rows(const IlpModel& model) {
  IlpModel out = model;
  for (LinearConstraint& row : out.constraints) {
    if (row.sense == Sense::Equal) continue;
    const double g = row_divisor(model, row);
    if (!(g > 0.0)) continue;
    const double scaled = row.rhs / g;
    const double rounded = row.sense == Sense::GreaterEqual ? std::ceil(scaled - 1e-9) : std::floor(scaled + 1e-9);
    if (g == 1.0 && rounded == row.rhs) continue;
    for (Term& t : row.terms) t.coefficient /= g;
    row.rhs = rounded;
  }
  // Cardinality rows implied by binary knapsacks: at most (at least) as many
  // items as the smallest (largest) coefficients allow.
  const std::size_t original_rows = out.constraints.size();
  for (std::size_t r = 0; r < original_rows; ++r) {
    const LinearConstraint row = out.constraints[r];
    if (row.sense == Sense::Equal || row.terms.size() < 2) continue;
    std::vector<double> a;
    for (const Term& t : row.terms) {
      const VarKind& kind = model.columns[t.column].kind;
      if (!kind.is_integral() || kind.lower != 0.0 || kind.upper != 1.0 || !(t.coefficient > 0.0)) break;
      a.push_back(t.coefficient);
    }
    if (a.size() != row.terms.size()) continue;
    if (std::all_of(a.begin(), a.end(), [&](double v) { return v == a.front(); })) continue;
    std::size_t count = 0;
    double sum = 0.0;
    if (row.sense == Sense::LessEqual) {
      std::sort(a.begin(), a.end());
      while (count < a.size() && sum + a[count] <= row.rhs + 1e-9) sum += a[count++];
      if (count == a.size()) continue;
    } else {
      if (!(row.rhs > 1e-9)) continue;
      std::sort(a.rbegin(), a.rend());
      while (count < a.size() && sum < row.rhs - 1e-9) sum += a[count++];
      if (sum < row.rhs - 1e-9) continue;  // infeasible row, left to the LP
    }
    LinearConstraint card{{}, row.sense, static_cast<double>(count), row.tag + "#card"};
    for (const Term& t : row.terms) card.terms.push_back({t.column, 1.0});
    out.constraints.push_back(std::move(card));
  }
  return out;
}

bool is_binary(const VarKind& kind) {
  return kind.is_integral() && kind.lower == 0.0 && kind.upper == 1.0;
}

// Extended cover inequalities violated by `x`, separated greedily from every
// binary knapsack row a.x <= b with positive a.
std::vector<LinearConstraint> separate_covers(const IlpModel& model, const std::vector<double>& x,
                                              std::set<std::vector<int>>& seen) {
  constexpr double kViolation = 1e-6;
  std::vector<LinearConstraint> cuts;
  for (const LinearConstraint& row : model.constraints) {
    if (row.sense != Sense::LessEqual || row.terms.size() < 2 || !(row.rhs > 0.0)) continue;
    bool knapsack = true;
    for (const Term& t : row.terms) {
      knapsack = knapsack && is_binary(model.columns[t.column].kind) && t.coefficient > 0.0;
    }
    if (!knapsack) continue;
    // Prefer items the relaxation already sets near one, then heavier ones.
    std::vector<Term> order = row.terms;
    std::sort(order.begin(), order.end(), [&](const Term& a, const Term& b) {
      const double ka = 1.0 - x[a.column];
      const double kb = 1.0 - x[b.column];
      if (std::abs(ka - kb) > 1e-12) return ka < kb;
      if (a.coefficient != b.coefficient) return a.coefficient > b.coefficient;
      return a.column < b.column;
    });
    std::vector<Term> cover;
    double weight = 0.0;
    for (const Term& t : order) {
      if (weight > row.rhs + 1e-9) break;
      cover.push_back(t);
      weight += t.coefficient;
    }
    if (!(weight > row.rhs + 1e-9)) continue;
    // Drop items with the smallest values while the set still overflows.
    std::sort(cover.begin(), cover.end(), [&](const Term& a, const Term& b) {
      if (x[a.column] != x[b.column]) return x[a.column] < x[b.column];
      return a.column < b.column;
    });
    for (std::size_t k = 0; k < cover.size();) {
      if (weight - cover[k].coefficient > row.rhs + 1e-9) {
        weight -= cover[k].coefficient;
        cover.erase(cover.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        ++k;
      }
    }
    double heaviest = 0.0;
    for (const Term& t : cover) heaviest = std::max(heaviest, t.coefficient);
    std::vector<int> columns;
    double lhs = 0.0;
    for (const Term& t : row.terms) {
      const bool in_cover = std::any_of(cover.begin(), cover.end(), [&](const Term& c) { return c.column == t.column; });
      if (in_cover || t.coefficient >= heaviest) {
        columns.push_back(t.column);
        lhs += x[t.column];
      }
    }
    const double rhs = static_cast<double>(cover.size()) - 1.0;
    if (lhs <= rhs + kViolation) continue;
    std::sort(columns.begin(), columns.end());
    std::vector<int> key = columns;
    key.push_back(static_cast<int>(rhs));
    if (!seen.insert(key).second) continue;
    LinearConstraint cut{{}, Sense::LessEqual, rhs, row.tag + "#cover"};
    for (int c : columns) cut.terms.push_back({c, 1.0});
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

class BranchAndBound {
 public:
  BranchAndBound(const IlpModel& model, const SolveOptions& options)
      : model_(model), opt_(options), tightened_(tighten_integer_rows(model)), engine_(tightened_),
        pseudo_(model.num_columns()) {
    for (int c = 0; c < model.num_columns(); ++c) {
      if (model.columns[c].kind.is_integral()) integer_columns_.push_back(c);
    }
  }

  MilpResult run(const std::vector<double>* incumbent) {
    start_ = Clock::now();
    if (std::isfinite(opt_.time_limit_seconds)) {
      deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(opt_.time_limit_seconds));
      engine_.set_deadline(*deadline_);
    }
    MilpResult result;
    if (incumbent && accept_external(*incumbent)) result.stats.warm_start_used = true;

    LpStatus root = engine_.solve();
    ++nodes_;
    if (root == LpStatus::Optimal) root = add_root_cuts();
    if (root == LpStatus::Infeasible) return finish(result, MilpStatus::Infeasible, kInf);
    if (root == LpStatus::Unbounded) return finish(result, MilpStatus::Unbounded, -kInf);
    if (root == LpStatus::IterationLimit || root == LpStatus::TimeLimit) {
      return finish_limited(result, -kInf);
    }
    result.stats.root_bound = engine_.objective();

    std::optional<Node> current = expand(Node{result.stats.root_bound, 0, next_id_++, {}});
    while (true) {
      if (!current) {
        current = select();
        if (!current) break;
      }
      if (limits_hit()) {
        open_.push_back(*current);
        return finish_limited(result, open_bound());
      }
      apply(current->changes);
      const LpStatus st = engine_.solve();
      ++nodes_;
      if (st == LpStatus::Infeasible) {
        current.reset();
        continue;
      }
      if (st == LpStatus::TimeLimit) {
        open_.push_back(*current);
        return finish_limited(result, open_bound());
      }
      if (st != LpStatus::Optimal) {
        lost_bound_ = std::min(lost_bound_, current->bound);
        current.reset();
        continue;
      }
      if (current->branch_column >= 0 && current->branch_distance > 0.0) {
        const double gain = std::max(0.0, engine_.objective() - current->bound);
        if (std::isfinite(gain)) {
          pseudo_.record(current->branch_column, current->branch_up, gain / current->branch_distance);
        }
      }
      current->bound = std::max(current->bound, engine_.objective());
      current = expand(std::move(*current));
    }
    const double bound = std::min(lost_bound_, has_incumbent() ? best_ : kInf);
    if (!has_incumbent()) {
      return finish(result, lost_bound_ < kInf ? MilpStatus::LimitReached : MilpStatus::Infeasible,
                    bound);
    }
    return finish(result, prunable(bound) ? MilpStatus::Optimal : MilpStatus::Feasible,
                  std::min(bound, best_));
  }

 private:
  using Clock = std::chrono::steady_clock;

  bool has_incumbent() const { return !best_values_.empty(); }

  // Rounds of cover separation at the root. Each round appends the cuts to
  // the working model and re-optimizes from the previous basis.
  LpStatus add_root_cuts() {
    constexpr int kRounds = 20;
    std::set<std::vector<int>> seen;
    LpStatus status = LpStatus::Optimal;
    for (int round = 0; round < kRounds && status == LpStatus::Optimal; ++round) {
      std::vector<LinearConstraint> cuts = separate_covers(tightened_, engine_.values(), seen);
      if (cuts.empty()) break;
      LpBasis basis = engine_.result().basis;
      const int n = model_.num_columns();
      const int m = tightened_.num_rows();
      for (LinearConstraint& c : cuts) tightened_.constraints.push_back(std::move(c));
      const int added = tightened_.num_rows() - m;
      for (int k = 0; k < added; ++k) {
        basis.basic.push_back(n + m + k);
        basis.status.push_back(VarStatus::Basic);
      }
      root_cuts_ += added;
      earlier_iterations_ += engine_.iterations();
      engine_ = LpEngine(tightened_);
      if (deadline_) engine_.set_deadline(*deadline_);
      engine_.load_basis(basis);
      status = engine_.solve();
    }
    return status;
  }

  double rounded(double bound) const {
    const double step = model_.objective_step;
    if (!(step > 0.0) || !std::isfinite(bound)) return bound;
    const double units = (bound - model_.objective_offset) / step;
    return model_.objective_offset + std::ceil(units - 1e-6) * step;
  }

  double prune_tol() const {
    return std::max(1e-9, opt_.rel_gap_tol * std::max(1.0, std::abs(best_)));
  }

  // A subtree with this bound cannot hold a strictly better solution.
  bool prunable(double bound) const {
    return has_incumbent() && rounded(bound) >= best_ - prune_tol();
  }

  bool accept_external(const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != model_.num_columns()) return false;
    std::vector<double> v = values;
    for (int c : integer_columns_) {
      const double r = std::round(v[c]);
      if (std::abs(v[c] - r) > opt_.integrality_tol) return false;
      v[c] = r;
    }
    if (model_.max_violation(v) > 1e-6) return false;
    best_ = model_.evaluate(v);
    best_values_ = std::move(v);
    return true;
  }

  bool limits_hit() const {
    if (nodes_ >= opt_.node_limit) return true;
    const double elapsed = std::chrono::duration<double>(Clock::now() - start_).count();
    return elapsed >= opt_.time_limit_seconds;
  }

  void apply(const std::vector<BoundChange>& changes) {
    for (int c : touched_) {
      engine_.set_bounds(c, model_.columns[c].kind.lower, model_.columns[c].kind.upper);
    }
    touched_.clear();
    for (const BoundChange& ch : changes) {
      engine_.set_bounds(ch.column, ch.lower, ch.upper);
      touched_.push_back(ch.column);
    }
  }

  // Processes the LP just solved for `node`. Returns the floor child to dive
  // into, after storing the ceil child as an open node.
  std::optional<Node> expand(Node node) {
    if (prunable(node.bound)) return std::nullopt;
    const std::vector<double> x = engine_.values();
    // Product rule over pseudo-cost estimates, lowest index on ties.
    int branch = -1;
    double best_score = -1.0;
    const double avg_down = pseudo_.average(false);
    const double avg_up = pseudo_.average(true);
    for (int c : integer_columns_) {
      const double frac = x[c] - std::floor(x[c]);
      if (std::min(frac, 1.0 - frac) <= opt_.integrality_tol) continue;
      const double down = std::max(1e-6, pseudo_.estimate(c, false, avg_down) * frac);
      const double up = std::max(1e-6, pseudo_.estimate(c, true, avg_up) * (1.0 - frac));
      const double score = down * up;
      if (score > best_score * (1.0 + 1e-9)) {
        best_score = score;
        branch = c;
      }
    }
    if (branch < 0) {
      std::vector<double> v = x;
      for (int c : integer_columns_) v[c] = std::round(v[c]);
      const double obj = model_.evaluate(v);
      if ((!has_incumbent() || obj < best_ - prune_tol()) && model_.max_violation(v) <= 1e-6) {
        best_ = obj;
        best_values_ = std::move(v);
      }
      return std::nullopt;
    }
    const double value = x[branch];
    Node up{node.bound, node.depth + 1, next_id_++, node.changes, branch, true, std::ceil(value) - value};
    up.changes.push_back({branch, std::ceil(value), engine_.upper(branch)});
    open_.push_back(std::move(up));
    Node down{node.bound, node.depth + 1, next_id_++, std::move(node.changes), branch, false,
              value - std::floor(value)};
    down.changes.push_back({branch, engine_.lower(branch), std::floor(value)});
    return down;
  }

  std::optional<Node> select() {
    if (has_incumbent()) {
      const double tol = prune_tol();
      open_.erase(std::remove_if(open_.begin(), open_.end(),
                                 [&](const Node& n) { return rounded(n.bound) >= best_ - tol; }),
                  open_.end());
    }
    if (open_.empty()) return std::nullopt;
    std::size_t pick = open_.size() - 1;
    if (has_incumbent()) {
      for (std::size_t k = 0; k < open_.size(); ++k) {
        const Node& a = open_[k];
        const Node& b = open_[pick];
        if (a.bound < b.bound - 1e-12 ||
            (a.bound <= b.bound + 1e-12 && (a.depth > b.depth ||
                                            (a.depth == b.depth && a.id > b.id)))) {
          pick = k;
        }
      }
    }
    Node node = std::move(open_[pick]);
    open_.erase(open_.begin() + static_cast<std::ptrdiff_t>(pick));
    return node;
  }

  double open_bound() const {
    double bound = lost_bound_;
    for (const Node& n : open_) bound = std::min(bound, n.bound);
    return bound;
  }

  MilpResult finish(MilpResult& result, MilpStatus status, double bound) {
    result.status = status;
    if (has_incumbent()) {
      result.values = best_values_;
      result.objective = best_;
    }
    result.best_bound = status == MilpStatus::Optimal ? best_ : bound;
    if (has_incumbent()) {
      const double lb = std::min(rounded(result.best_bound), best_);
      result.gap = std::isfinite(lb) ? (best_ - lb) / std::max(1.0, std::abs(best_)) : kInf;
      if (status == MilpStatus::Optimal) result.gap = 0.0;
    }
    result.stats.nodes = nodes_;
    result.stats.simplex_iterations = earlier_iterations_ + engine_.iterations();
    result.stats.root_cuts = root_cuts_;
    result.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return result;
  }

  MilpResult finish_limited(MilpResult& result, double bound) {
    if (has_incumbent() && prunable(bound)) return finish(result, MilpStatus::Optimal, bound);
    return finish(result, has_incumbent() ? MilpStatus::Feasible : MilpStatus::LimitReached,
                  bound);
  }

  const IlpModel& model_;
  SolveOptions opt_;
  IlpModel tightened_;
  LpEngine engine_;
  PseudoCosts pseudo_;
  std::vector<int> integer_columns_;
  std::vector<int> touched_;
  std::vector<Node> open_;
  std::vector<double> best_values_;
  double best_ = kInf;
  double lost_bound_ = kInf;
  long nodes_ = 0;
  long next_id_ = 0;
  long root_cuts_ = 0;
  long earlier_iterations_ = 0;
  std::optional<Clock::time_point> deadline_;
  Clock::time_point start_;
};

}  // namespace

MilpResult solve(const IlpModel& model, const SolveOptions& options,
                 const std::vector<double>* incumbent) {
  BranchAndBound bnb(model, options);
  return bnb.run(incumbent);
}

}  // namespace nrp
