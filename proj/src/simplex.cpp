// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "nrp/lp.hpp"

namespace nrp {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    case LpStatus::TimeLimit: return "time-limit";
  }
  return "unknown";
}

namespace {

constexpr double kDropTol = 1e-13;
constexpr int kDegenerateBeforeBland = 60;
constexpr double kPerturbation = 1e-6;

// Deterministic value in [0.5, 1) per column.
double jitter(int j) {
  const unsigned h = static_cast<unsigned>(j) * 2654435761U;
  return 0.5 + static_cast<double>(h >> 8) / static_cast<double>(1U << 25);
}

}  // namespace

LpEngine::LpEngine(const IlpModel& model, LpOptions options)
    : model_(&model), opt_(options) {
  n_ = model.num_columns();
  m_ = model.num_rows();
  width_ = n_ + m_;
  cost_.assign(width_, 0.0);
  for (const Term& t : model.objective) cost_[t.column] += t.coefficient;
  lo_.resize(width_);
  up_.resize(width_);
  for (int j = 0; j < n_; ++j) {
    lo_[j] = model.columns[j].kind.lower;
    up_[j] = model.columns[j].kind.upper;
  }
  for (int i = 0; i < m_; ++i) {
    const LinearConstraint& row = model.constraints[i];
    lo_[n_ + i] = row.sense == Sense::LessEqual ? -kInf : row.rhs;
    up_[n_ + i] = row.sense == Sense::GreaterEqual ? kInf : row.rhs;
  }
  stat_.assign(width_, VarStatus::AtLower);
  x_.assign(width_, 0.0);
  for (int j = 0; j < n_; ++j) place_nonbasic(j);
  build_initial();
}

void LpEngine::build_initial() {
  tab_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
  head_.assign(m_, 0);
  row_of_.assign(width_, -1);
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : model_->constraints[i].terms) at(i, t.column) = -t.coefficient;
    at(i, n_ + i) = 1.0;
    head_[i] = n_ + i;
    row_of_[n_ + i] = i;
    stat_[n_ + i] = VarStatus::Basic;
  }
  recompute_basics();
  recompute_reduced_costs();
  pivots_since_refactor_ = 0;
}

void LpEngine::place_nonbasic(int j) {
  const bool lo_ok = std::isfinite(lo_[j]);
  const bool up_ok = std::isfinite(up_[j]);
  if (stat_[j] == VarStatus::AtUpper && up_ok) {
    x_[j] = up_[j];
  } else if (lo_ok) {
    stat_[j] = VarStatus::AtLower;
    x_[j] = lo_[j];
  } else if (up_ok) {
    stat_[j] = VarStatus::AtUpper;
    x_[j] = up_[j];
  } else {
    stat_[j] = VarStatus::Free;
    x_[j] = 0.0;
  }
}

void LpEngine::set_bounds(int column, double lower, double upper) {
  lo_[column] = lower;
  up_[column] = upper;
  if (row_of_[column] >= 0) return;
  const double old = x_[column];
  place_nonbasic(column);
  const double delta = x_[column] - old;
  if (delta == 0.0) return;
  for (int r = 0; r < m_; ++r) {
    const double a = at(r, column);
    if (a != 0.0) x_[head_[r]] -= a * delta;
  }
}

void LpEngine::recompute_basics() {
  scratch_.clear();
  for (int j = 0; j < width_; ++j) {
    if (row_of_[j] < 0 && x_[j] != 0.0) scratch_.push_back(j);
  }
  for (int r = 0; r < m_; ++r) {
    const double* row = &tab_[static_cast<std::size_t>(r) * width_];
    double s = 0.0;
    for (int j : scratch_) s += row[j] * x_[j];
    x_[head_[r]] = -s;
  }
}

void LpEngine::recompute_reduced_costs() {
  d_ = cost_;
  for (int r = 0; r < m_; ++r) {
    const double cb = cost_[head_[r]];
    if (cb == 0.0) continue;
    const double* row = &tab_[static_cast<std::size_t>(r) * width_];
    for (int j = 0; j < width_; ++j) d_[j] -= cb * row[j];
  }
  for (int r = 0; r < m_; ++r) d_[head_[r]] = 0.0;
}

void LpEngine::pivot(int r, int q) {
  double* prow = &tab_[static_cast<std::size_t>(r) * width_];
  const double inv = 1.0 / prow[q];
  scratch_.clear();
  for (int j = 0; j < width_; ++j) {
    if (prow[j] == 0.0) continue;
    prow[j] *= inv;
    if (std::abs(prow[j]) < kDropTol) {
      prow[j] = 0.0;
    } else {
      scratch_.push_back(j);
    }
  }
  prow[q] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* row = &tab_[static_cast<std::size_t>(i) * width_];
    const double f = row[q];
    if (f == 0.0) continue;
    for (int j : scratch_) {
      double v = row[j] - f * prow[j];
      row[j] = std::abs(v) < kDropTol ? 0.0 : v;
    }
    row[q] = 0.0;
  }
  const double f = d_[q];
  if (f != 0.0) {
    for (int j : scratch_) d_[j] -= f * prow[j];
  }
  d_[q] = 0.0;
  const int leaving = head_[r];
  row_of_[leaving] = -1;
  head_[r] = q;
  row_of_[q] = r;
  stat_[q] = VarStatus::Basic;
  ++pivots_since_refactor_;
}

void LpEngine::refactor() {
  std::vector<char> target(width_, 0);
  for (int b : head_) target[b] = 1;
  const std::vector<VarStatus> old_stat = stat_;

  tab_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
  row_of_.assign(width_, -1);
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : model_->constraints[i].terms) at(i, t.column) = -t.coefficient;
    at(i, n_ + i) = 1.0;
    head_[i] = n_ + i;
    row_of_[n_ + i] = i;
  }
  d_ = cost_;
  for (int j = 0; j < width_; ++j) stat_[j] = old_stat[j];
  for (int i = 0; i < m_; ++i) stat_[n_ + i] = VarStatus::Basic;

  for (int q = 0; q < n_; ++q) {
    if (!target[q]) continue;
    int best = -1;
    double best_abs = 1e-9;
    for (int r = 0; r < m_; ++r) {
      const int h = head_[r];
      if (h < n_ || target[h]) continue;
      const double a = std::abs(at(r, q));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (best < 0) {
      // Dependent column: leave it nonbasic.
      stat_[q] = VarStatus::AtLower;
      place_nonbasic(q);
      continue;
    }
    pivot(best, q);
  }
  for (int j = 0; j < width_; ++j) {
    if (row_of_[j] >= 0) {
      stat_[j] = VarStatus::Basic;
    } else if (old_stat[j] == VarStatus::Basic || stat_[j] == VarStatus::Basic) {
      stat_[j] = VarStatus::AtLower;
      place_nonbasic(j);
    }
  }
  recompute_basics();
  recompute_reduced_costs();
  pivots_since_refactor_ = 0;
}

bool LpEngine::load_basis(const LpBasis& basis) {
  bool ok = static_cast<int>(basis.basic.size()) == m_ &&
            static_cast<int>(basis.status.size()) == width_;
  if (ok) {
    std::vector<char> seen(width_, 0);
    for (int b : basis.basic) {
      if (b < 0 || b >= width_ || seen[b]) {
        ok = false;
        break;
      }
      seen[b] = 1;
    }
  }
  if (!ok) {
    build_initial();
    return false;
  }
  head_ = basis.basic;
  for (int j = 0; j < width_; ++j) {
    stat_[j] = basis.status[j];
    if (stat_[j] == VarStatus::Basic) stat_[j] = VarStatus::AtLower;
  }
  for (int j = 0; j < width_; ++j) place_nonbasic(j);
  refactor();
  int basic_count = 0;
  for (int b : basis.basic) basic_count += row_of_[b] >= 0 ? 1 : 0;
  return basic_count == m_;
}

double LpEngine::infeasibility(int col) const {
  if (x_[col] < lo_[col] - opt_.primal_tol) return lo_[col] - x_[col];
  if (x_[col] > up_[col] + opt_.primal_tol) return x_[col] - up_[col];
  return 0.0;
}

bool LpEngine::make_dual_feasible() {
  const double tol = opt_.dual_tol;
  for (int j = 0; j < width_; ++j) {
    if (row_of_[j] >= 0 || lo_[j] == up_[j]) continue;
    const double dj = d_[j];
    double target = x_[j];
    if (stat_[j] == VarStatus::AtLower && dj < -tol) {
      if (!std::isfinite(up_[j])) return false;
      stat_[j] = VarStatus::AtUpper;
      target = up_[j];
    } else if (stat_[j] == VarStatus::AtUpper && dj > tol) {
      if (!std::isfinite(lo_[j])) return false;
      stat_[j] = VarStatus::AtLower;
      target = lo_[j];
    } else if (stat_[j] == VarStatus::Free && std::abs(dj) > tol) {
      return false;
    }
    const double delta = target - x_[j];
    if (delta != 0.0) {
      x_[j] = target;
      for (int r = 0; r < m_; ++r) {
        const double a = at(r, j);
        if (a != 0.0) x_[head_[r]] -= a * delta;
      }
    }
  }
  return true;
}

bool LpEngine::refactor_due() const {
  return pivots_since_refactor_ > std::max<long>(500, 2L * m_);
}

// Shifts each nonbasic cost away from zero in the direction that keeps it dual
// feasible. Breaks the ties that make the dual simplex stall on models where
// most columns cost nothing.
void LpEngine::perturb_costs() {
  for (int j = 0; j < width_; ++j) {
    if (row_of_[j] >= 0 || lo_[j] == up_[j]) continue;
    const double delta = kPerturbation * (1.0 + std::abs(cost_[j])) * jitter(j);
    if (stat_[j] == VarStatus::AtLower) {
      cost_[j] += delta;
      d_[j] += delta;
    } else if (stat_[j] == VarStatus::AtUpper) {
      cost_[j] -= delta;
      d_[j] -= delta;
    }
  }
}

// Harris steps can leave reduced costs slightly on the wrong side; shifting the
// cost back keeps the dual strictly feasible. Shifts live in cost_ and are
// discarded when solve() restores the original costs.
void LpEngine::shift_wrong_signs() {
  for (int j = 0; j < width_; ++j) {
    if (row_of_[j] >= 0 || lo_[j] == up_[j]) continue;
    const double small = 0.1 * kPerturbation * jitter(j);
    if (stat_[j] == VarStatus::AtLower && d_[j] < 0.0) {
      cost_[j] += small - d_[j];
      d_[j] = small;
    } else if (stat_[j] == VarStatus::AtUpper && d_[j] > 0.0) {
      cost_[j] -= small + d_[j];
      d_[j] = -small;
    }
  }
}

long LpEngine::iteration_budget() const {
  if (opt_.max_iterations > 0) return opt_.max_iterations;
  return 20000 + 50L * (n_ + m_);
}

bool LpEngine::past_deadline() {
  if (!deadline_) return false;
  if (--deadline_countdown_ > 0) return false;
  deadline_countdown_ = 16;
  return std::chrono::steady_clock::now() >= *deadline_;
}

bool LpEngine::out_of_iterations() const {
  return iterations_ - solve_start_iterations_ >= iteration_budget();
}

LpStatus LpEngine::primal_simplex() {
  const double ptol = opt_.primal_tol;
  const double dtol = opt_.dual_tol;
  std::vector<double> d1(width_, 0.0);
  std::vector<int> infeasible_rows;
  int degenerate = 0;
  long since_refresh = 0;

  while (true) {
    if (out_of_iterations()) return LpStatus::IterationLimit;
    if (past_deadline()) return LpStatus::TimeLimit;
    if (refactor_due()) {
      refactor();
      since_refresh = 0;
    } else if (++since_refresh > 100) {
      recompute_basics();
      since_refresh = 0;
    }

    infeasible_rows.clear();
    for (int r = 0; r < m_; ++r) {
      if (infeasibility(head_[r]) > 0.0) infeasible_rows.push_back(r);
    }
    const bool phase1 = !infeasible_rows.empty();
    const double* price = d_.data();
    if (phase1) {
      std::fill(d1.begin(), d1.end(), 0.0);
      for (int r : infeasible_rows) {
        const int b = head_[r];
        const double c1 = x_[b] < lo_[b] ? -1.0 : 1.0;
        const double* row = &tab_[static_cast<std::size_t>(r) * width_];
        for (int j = 0; j < width_; ++j) {
          if (row[j] != 0.0) d1[j] -= c1 * row[j];
        }
      }
      price = d1.data();
    }

    const bool bland = degenerate > kDegenerateBeforeBland;
    int q = -1;
    int dir = 0;
    double best_score = 0.0;
    for (int j = 0; j < width_; ++j) {
      if (row_of_[j] >= 0 || lo_[j] == up_[j]) continue;
      const double dj = price[j];
      int jdir = 0;
      if (stat_[j] == VarStatus::AtLower && dj < -dtol) {
        jdir = 1;
      } else if (stat_[j] == VarStatus::AtUpper && dj > dtol) {
        jdir = -1;
      } else if (stat_[j] == VarStatus::Free && std::abs(dj) > dtol) {
        jdir = dj < 0 ? 1 : -1;
      }
      if (jdir == 0) continue;
      if (bland) {
        q = j;
        dir = jdir;
        break;
      }
      if (std::abs(dj) > best_score) {
        best_score = std::abs(dj);
        q = j;
        dir = jdir;
      }
    }
    if (q < 0) return phase1 ? LpStatus::Infeasible : LpStatus::Optimal;

    // Harris two-pass ratio test. Each candidate row blocks at one bound.
    auto limits = [&](int r, double alpha, double relax, double& limit, bool& to_lower) {
      const int b = head_[r];
      const double rate = -alpha * dir;
      const double xb = x_[b];
      limit = kInf;
      if (phase1 && xb < lo_[b] - ptol) {
        if (rate > 0) {
          limit = (lo_[b] - xb + relax) / rate;
          to_lower = true;
        }
      } else if (phase1 && xb > up_[b] + ptol) {
        if (rate < 0) {
          limit = (xb - up_[b] + relax) / -rate;
          to_lower = false;
        }
      } else if (rate < 0 && std::isfinite(lo_[b])) {
        limit = (xb - lo_[b] + relax) / -rate;
        to_lower = true;
      } else if (rate > 0 && std::isfinite(up_[b])) {
        limit = (up_[b] - xb + relax) / rate;
        to_lower = false;
      }
      if (limit < 0.0) limit = 0.0;
    };

    double theta_max = kInf;
    for (int r = 0; r < m_; ++r) {
      const double alpha = at(r, q);
      if (std::abs(alpha) < opt_.pivot_tol) continue;
      double limit;
      bool to_lower = false;
      limits(r, alpha, ptol, limit, to_lower);
      theta_max = std::min(theta_max, limit);
    }
    const double flip = (std::isfinite(lo_[q]) && std::isfinite(up_[q])) ? up_[q] - lo_[q] : kInf;

    if (theta_max == kInf && flip == kInf) {
      return phase1 ? LpStatus::Infeasible : LpStatus::Unbounded;
    }

    int leave = -1;
    bool leave_to_lower = false;
    double theta = kInf;
    if (theta_max < kInf) {
      double best_alpha = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double alpha = at(r, q);
        if (std::abs(alpha) < opt_.pivot_tol) continue;
        double limit;
        bool to_lower = false;
        limits(r, alpha, 0.0, limit, to_lower);
        if (limit > theta_max) continue;
        bool better;
        if (bland) {
          better = leave < 0 || limit < theta - 1e-12 ||
                   (limit <= theta + 1e-12 && head_[r] < head_[leave]);
        } else {
          better = std::abs(alpha) > best_alpha;
        }
        if (better) {
          best_alpha = std::abs(alpha);
          leave = r;
          leave_to_lower = to_lower;
          theta = limit;
        }
      }
    }

    ++iterations_;
    if (flip <= theta) {
      const double delta = dir * flip;
      x_[q] += delta;
      stat_[q] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
      x_[q] = dir > 0 ? up_[q] : lo_[q];
      for (int r = 0; r < m_; ++r) {
        const double a = at(r, q);
        if (a != 0.0) x_[head_[r]] -= a * delta;
      }
      degenerate = 0;
      continue;
    }

    const double delta = dir * theta;
    if (delta != 0.0) {
      x_[q] += delta;
      for (int r = 0; r < m_; ++r) {
        const double a = at(r, q);
        if (a != 0.0) x_[head_[r]] -= a * delta;
      }
    }
    degenerate = theta < 1e-12 ? degenerate + 1 : 0;
    const int b = head_[leave];
    pivot(leave, q);
    stat_[b] = leave_to_lower ? VarStatus::AtLower : VarStatus::AtUpper;
    x_[b] = leave_to_lower ? lo_[b] : up_[b];
  }
}

LpStatus LpEngine::dual_simplex() {
  const double dtol = opt_.dual_tol;
  int degenerate = 0;
  long since_refresh = 0;

  while (true) {
    if (out_of_iterations()) return LpStatus::IterationLimit;
    if (past_deadline()) return LpStatus::TimeLimit;
    if (refactor_due()) {
      refactor();
      since_refresh = 0;
    } else if (++since_refresh > 100) {
      recompute_basics();
      since_refresh = 0;
    }

    const bool bland = degenerate > kDegenerateBeforeBland;
    int r = -1;
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double v = infeasibility(head_[i]);
      if (v <= 0.0) continue;
      if (bland) {
        if (r < 0 || head_[i] < head_[r]) r = i;
      } else if (v > worst) {
        worst = v;
        r = i;
      }
    }
    if (r < 0) return LpStatus::Optimal;

    const int b = head_[r];
    const bool increase = x_[b] < lo_[b];
    const double delta = increase ? lo_[b] - x_[b] : x_[b] - up_[b];
    const double* row = &tab_[static_cast<std::size_t>(r) * width_];

    auto eligible = [&](int j, int& jdir) {
      if (row_of_[j] >= 0 || lo_[j] == up_[j]) return false;
      const double alpha = row[j];
      if (std::abs(alpha) < opt_.pivot_tol) return false;
      // x_b moves by -alpha * jdir per unit of entering movement.
      switch (stat_[j]) {
        case VarStatus::AtLower: jdir = 1; break;
        case VarStatus::AtUpper: jdir = -1; break;
        case VarStatus::Free: jdir = (increase == (alpha < 0)) ? 1 : -1; break;
        default: return false;
      }
      const double move = -alpha * jdir;
      return increase ? move > 0 : move < 0;
    };
    auto dual_room = [&](int j) {
      const double dj = d_[j];
      if (stat_[j] == VarStatus::AtLower) return std::max(dj, 0.0);
      if (stat_[j] == VarStatus::AtUpper) return std::max(-dj, 0.0);
      return std::abs(dj);
    };

    double bound = kInf;
    for (int j = 0; j < width_; ++j) {
      int jdir;
      if (!eligible(j, jdir)) continue;
      bound = std::min(bound, (dual_room(j) + dtol) / std::abs(row[j]));
    }
    if (bound == kInf) return LpStatus::Infeasible;

    int q = -1;
    int dir = 0;
    double best_alpha = 0.0;
    double best_ratio = kInf;
    for (int j = 0; j < width_; ++j) {
      int jdir;
      if (!eligible(j, jdir)) continue;
      const double ratio = dual_room(j) / std::abs(row[j]);
      if (ratio > bound) continue;
      bool better;
      if (bland) {
        better = q < 0 || ratio < best_ratio - 1e-12;
      } else {
        better = std::abs(row[j]) > best_alpha;
      }
      if (better) {
        q = j;
        dir = jdir;
        best_alpha = std::abs(row[j]);
        best_ratio = ratio;
      }
    }

    ++iterations_;
    degenerate = best_ratio < 1e-12 ? degenerate + 1 : 0;
    const double step = dir * delta / std::abs(row[q]);
    x_[q] += step;
    for (int i = 0; i < m_; ++i) {
      const double a = at(i, q);
      if (a != 0.0) x_[head_[i]] -= a * step;
    }
    pivot(r, q);
    stat_[b] = increase ? VarStatus::AtLower : VarStatus::AtUpper;
    x_[b] = increase ? lo_[b] : up_[b];
    shift_wrong_signs();
  }
}

double LpEngine::row_residual() const {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    double activity = 0.0;
    for (const Term& t : model_->constraints[i].terms) activity += t.coefficient * x_[t.column];
    worst = std::max(worst, std::abs(activity - x_[n_ + i]) / std::max(1.0, std::abs(activity)));
  }
  return worst;
}

LpStatus LpEngine::solve() {
  solve_start_iterations_ = iterations_;
  if (refactor_due()) refactor();

  LpStatus st = LpStatus::IterationLimit;
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (make_dual_feasible()) {
      const std::vector<double> base = cost_;
      perturb_costs();
      st = dual_simplex();
      cost_ = base;
      recompute_reduced_costs();
      if (st == LpStatus::Optimal) st = primal_simplex();
    } else {
      st = primal_simplex();
    }
    if (st == LpStatus::IterationLimit || st == LpStatus::TimeLimit || st == LpStatus::Unbounded) break;

    recompute_basics();
    bool clean = row_residual() < 1e-9;
    if (clean && st == LpStatus::Optimal) {
      recompute_reduced_costs();
      for (int j = 0; j < width_ && clean; ++j) {
        clean = infeasibility(j) == 0.0;
        if (row_of_[j] >= 0 || lo_[j] == up_[j]) continue;
        if (stat_[j] == VarStatus::AtLower && d_[j] < -opt_.dual_tol) clean = false;
        if (stat_[j] == VarStatus::AtUpper && d_[j] > opt_.dual_tol) clean = false;
      }
    }
    if (clean) break;
    refactor();
  }
  status_ = st;
  return st;
}

std::vector<double> LpEngine::values() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

double LpEngine::objective() const {
  double total = model_->objective_offset;
  for (int j = 0; j < n_; ++j) total += cost_[j] * x_[j];
  return total;
}

LpResult LpEngine::result() const {
  LpResult out;
  out.status = status_;
  out.values = values();
  out.objective = objective();
  out.duals.assign(d_.begin() + n_, d_.end());
  out.reduced_costs.assign(d_.begin(), d_.begin() + n_);
  out.basis.basic = head_;
  out.basis.status = stat_;
  out.iterations = iterations_;
  return out;
}

LpResult solve_lp(const IlpModel& model, const std::optional<LpBasis>& basis_hint,
                  LpOptions options) {
  LpEngine engine(model, options);
  if (basis_hint) engine.load_basis(*basis_hint);
  engine.solve();
  return engine.result();
}

}  // namespace nrp
