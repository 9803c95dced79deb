// SPDX-License-Identifier: Apache-2.0

#include "nrp/roster_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nrp {

namespace {

int slack_needed(int demand, int capacity, int staffed) {
  const int shortfall = demand - capacity * staffed;
  if (shortfall <= 0) return 0;
  return (shortfall + capacity - 1) / capacity;
}

}  // namespace

std::optional<Roster> warm_start(const RosterInstance& inst) {
  const int n = inst.num_nurses();
  const int S = inst.num_shifts();
  const int T = inst.num_days();
  const int q = inst.num_weeks();
  Roster r = Roster::empty_for(inst);
  std::vector<double> load(n, 0.0);
  std::vector<double> hours(static_cast<std::size_t>(n) * q, 0.0);
  auto week_hours = [&](int i, int t) -> double& {
    return hours[static_cast<std::size_t>(i) * q + inst.horizon.week_of(t)];
  };
  auto night_before = [&](int i, int t) {
    if (t == 0) return false;
    auto s = r.shift_on(i, t - 1);
    return s && inst.shifts[*s].is_night;
  };
  auto can_take = [&](int i, int s, int t) {
    if (r.shift_on(i, t)) return false;
    if (night_before(i, t)) return false;
    if (inst.shifts[s].is_night && t + 1 < T && r.shift_on(i, t + 1)) return false;
    return week_hours(i, t) + inst.shifts[s].duration_hours <= inst.nurses[i].contract.h_max + 1e-9;
  };
  auto assign = [&](int i, int s, int t) {
    r.set_x(i, s, t, true);
    load[i] += inst.weights.at(s, t);
    week_hours(i, t) += inst.shifts[s].duration_hours;
  };

  std::vector<int> order(n);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      const ShiftType& shift = inst.shifts[s];
      std::iota(order.begin(), order.end(), 0);
      auto overtime = [&](int i) {
        return week_hours(i, t) + shift.duration_hours > inst.nurses[i].contract.h_std + 1e-9;
      };
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (overtime(a) != overtime(b)) return !overtime(a);
        return load[a] < load[b];
      });
      int staffed = 0;
      for (int i : order) {
        const bool covered = static_cast<long long>(shift.capacity_per_nurse) * staffed >=
                             inst.demand[t];
        if (covered && staffed >= shift.min_staff) break;
        if (!can_take(i, s, t)) continue;
        assign(i, s, t);
        ++staffed;
      }
      if (staffed < shift.min_staff) return std::nullopt;
    }
  }

  for (int i = 0; i < n; ++i) {
    const double h_min = inst.nurses[i].contract.h_min;
    for (int k = 0; k < q; ++k) {
      const int first = k * inst.horizon.days_per_week;
      const int last = first + inst.horizon.days_per_week;
      while (hours[static_cast<std::size_t>(i) * q + k] < h_min - 1e-9) {
        int best_s = -1;
        int best_t = -1;
        for (int t = first; t < last; ++t) {
          for (int s = 0; s < S; ++s) {
            if (!can_take(i, s, t)) continue;
            if (best_s < 0 || inst.weights.at(s, t) < inst.weights.at(best_s, best_t)) {
              best_s = s;
              best_t = t;
            }
          }
        }
        if (best_s < 0) return std::nullopt;
        assign(i, best_s, best_t);
      }
    }
  }

  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < T; ++t) {
      r.set_j(s, t, slack_needed(inst.demand[t], inst.shifts[s].capacity_per_nurse, r.staffed(s, t)));
    }
  }
  recompute_derived(inst, r);
  return r;
}

std::optional<Roster> brute_force_solve(const RosterInstance& inst) {
  const int n = inst.num_nurses();
  const int S = inst.num_shifts();
  const int T = inst.num_days();
  const int cells = n * S * T;
  if (cells > kBruteForceMaxCells) {
    throw EnumerationTooLarge("brute force limited to " + std::to_string(kBruteForceMaxCells) +
                              " assignment cells, instance has " + std::to_string(cells));
  }
  const int dpw = inst.horizon.days_per_week;
  // Bit string position p = (i * T + t) * S + s; position 0 is the most
  // significant bit so numeric order equals lexicographic string order.
  auto bit = [&](unsigned mask, int i, int s, int t) {
    const int p = (i * T + t) * S + s;
    return ((mask >> (cells - 1 - p)) & 1U) != 0;
  };

  std::optional<Roster> best;
  double best_obj = kInf;
  const unsigned limit = 1U << cells;
  for (unsigned mask = 0; mask < limit; ++mask) {
    bool ok = true;
    double z = 0.0;
    double overtime = 0.0;
    for (int i = 0; i < n && ok; ++i) {
      const NurseContract& c = inst.nurses[i].contract;
      double load = 0.0;
      for (int t = 0; t < T && ok; ++t) {
        int worked = 0;
        for (int s = 0; s < S; ++s) {
          if (!bit(mask, i, s, t)) continue;
          ++worked;
          load += inst.weights.at(s, t);
          if (inst.shifts[s].is_night && t + 1 < T) {
            for (int s2 = 0; s2 < S; ++s2) ok = ok && !bit(mask, i, s2, t + 1);
          }
        }
        ok = ok && worked <= 1;
      }
      for (int k = 0; k < inst.num_weeks() && ok; ++k) {
        double h = 0.0;
        for (int t = k * dpw; t < (k + 1) * dpw; ++t) {
          for (int s = 0; s < S; ++s) h += bit(mask, i, s, t) ? inst.shifts[s].duration_hours : 0.0;
        }
        ok = h >= c.h_min - 1e-9 && h <= c.h_max + 1e-9;
        overtime += std::max(0.0, h - c.h_std);
      }
      z = std::max(z, load);
    }
    if (!ok) continue;
    int slack = 0;
    for (int s = 0; s < S && ok; ++s) {
      for (int t = 0; t < T; ++t) {
        int staffed = 0;
        for (int i = 0; i < n; ++i) staffed += bit(mask, i, s, t) ? 1 : 0;
        if (staffed < inst.shifts[s].min_staff) {
          ok = false;
          break;
        }
        slack += slack_needed(inst.demand[t], inst.shifts[s].capacity_per_nurse, staffed);
      }
    }
    if (!ok) continue;
    const double obj = z + inst.penalties.p1 * overtime + inst.penalties.big_m * slack;
    if (obj < best_obj - 1e-9) {
      best_obj = obj;
      Roster r = Roster::empty_for(inst);
      for (int i = 0; i < n; ++i) {
        for (int s = 0; s < S; ++s) {
          for (int t = 0; t < T; ++t) r.set_x(i, s, t, bit(mask, i, s, t));
        }
      }
      for (int s = 0; s < S; ++s) {
        for (int t = 0; t < T; ++t) {
          r.set_j(s, t, slack_needed(inst.demand[t], inst.shifts[s].capacity_per_nurse,
                                     r.staffed(s, t)));
        }
      }
      recompute_derived(inst, r);
      best = std::move(r);
    }
  }
  return best;
}

RosterSolution solve_instance(const RosterInstance& inst, const SolveOptions& options) {
  const EncodedModel enc = encode(inst);
  std::vector<double> seed;
  if (auto start = warm_start(inst)) seed = to_values(*start, enc.index, inst);
  RosterSolution out;
  out.milp = solve(enc.model, options, seed.empty() ? nullptr : &seed);
  if (out.milp.has_solution()) {
    out.roster = decode(out.milp.values, enc.index, inst, out.milp.objective,
                        options.integrality_tol);
    // Report the objective recomputed from the rounded roster, free of LP noise.
    out.milp.objective = out.roster->objective;
    if (out.milp.status == MilpStatus::Optimal) out.milp.best_bound = out.milp.objective;
  }
  return out;
}

}  // namespace nrp
