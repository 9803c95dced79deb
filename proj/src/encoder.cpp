// SPDX-License-Identifier: Apache-2.0

#include "nrp/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nrp {

VarKey VarIndex::key(int column) const {
  if (column < num_x()) {
    const int shift = column % shifts_;
    const int rest = column / shifts_;
    return {VarRole::X, rest / days_, shift, rest % days_};
  }
  column -= num_x();
  if (column < num_j()) return {VarRole::J, column / days_, column % days_, 0};
  column -= num_j();
  if (column < num_b()) return {VarRole::B, column / weeks_, column % weeks_, 0};
  return {VarRole::Z, 0, 0, 0};
}

namespace {

std::string summarize(const ValidationReport& report) {
  std::ostringstream os;
  os << "invalid instance:";
  for (const Issue& e : report.errors) os << " [" << e.location << "] " << e.message << ";";
  return os.str();
}

std::string tag(const char* eq, std::initializer_list<std::string> parts) {
  std::string out = eq;
  out += '[';
  bool first = true;
  for (const std::string& p : parts) {
    if (!first) out += ',';
    out += p;
    first = false;
  }
  out += ']';
  return out;
}

// Exact rational p/q for values that are short decimals or small fractions.
std::optional<std::pair<long long, long long>> as_rational(double v) {
  for (long long den = 1; den <= 1'000'000; den *= 10) {
    for (long long mul : {1LL, 2LL, 3LL, 4LL, 6LL, 8LL, 12LL}) {
      const long long q = den * mul;
      const double scaled = v * static_cast<double>(q);
      if (std::abs(scaled) > 4e15) return std::nullopt;
      const double r = std::round(scaled);
      if (std::abs(scaled - r) <= 1e-9 * std::max(1.0, std::abs(scaled))) {
        return std::pair{static_cast<long long>(r), q};
      }
    }
  }
  return std::nullopt;
}

// gcd over non-negative rationals; nullopt when any input is not a short rational.
std::optional<double> rational_gcd(const std::vector<double>& values) {
  std::vector<std::pair<long long, long long>> rs;
  long long lcm = 1;
  for (double v : values) {
    auto r = as_rational(std::abs(v));
    if (!r) return std::nullopt;
    if (r->first == 0) continue;
    rs.push_back(*r);
    lcm = std::lcm(lcm, r->second);
    if (lcm > 1'000'000'000LL) return std::nullopt;
  }
  if (rs.empty()) return 0.0;
  long long g = 0;
  for (auto [p, q] : rs) {
    g = std::gcd(g, p * (lcm / q));
  }
  return static_cast<double>(g) / static_cast<double>(lcm);
}

}  // namespace

InvalidInstance::InvalidInstance(ValidationReport report)
    : std::invalid_argument(summarize(report)), report_(std::move(report)) {}

double objective_lattice_step(const RosterInstance& inst) {
  std::vector<double> weights;
  for (int s = 0; s < inst.num_shifts(); ++s) {
    for (int t = 0; t < inst.num_days(); ++t) weights.push_back(inst.weights.at(s, t));
  }
  auto weight_step = rational_gcd(weights);
  if (!weight_step) return 0.0;

  std::vector<double> parts = {*weight_step, inst.penalties.big_m};
  if (inst.penalties.p1 != 0.0) {
    std::vector<double> hours;
    for (const ShiftType& s : inst.shifts) hours.push_back(s.duration_hours);
    for (const Nurse& n : inst.nurses) hours.push_back(n.contract.h_std);
    auto hour_step = rational_gcd(hours);
    if (!hour_step) return 0.0;
    const double overtime_step = inst.penalties.p1 * *hour_step;
    if (!as_rational(overtime_step)) return 0.0;
    parts.push_back(overtime_step);
  }
  auto step = rational_gcd(parts);
  return step ? *step : 0.0;
}

EncodedModel encode(const RosterInstance& inst) {
  ValidationReport report = validate_instance(inst);
  if (!report.ok()) throw InvalidInstance(std::move(report));

  const int n = inst.num_nurses();
  const int S = inst.num_shifts();
  const int T = inst.num_days();
  const int q = inst.num_weeks();
  const int dpw = inst.horizon.days_per_week;
  const auto& day = inst.horizon.day_labels;

  EncodedModel out;
  out.index = VarIndex(n, S, T, q);
  const VarIndex& idx = out.index;
  IlpModel& m = out.model;
  m.columns.reserve(idx.size());

  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) {
      for (int s = 0; s < S; ++s) {
        m.add_column(VarKind::binary(),
                     tag("X", {inst.nurses[i].id, inst.shifts[s].id, day[t]}));
      }
    }
  }
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < T; ++t) {
      m.add_column(VarKind::integer(0.0, kInf), tag("J", {inst.shifts[s].id, day[t]}));
    }
  }
  for (int i = 0; i < n; ++i) {
    const NurseContract& c = inst.nurses[i].contract;
    for (int k = 0; k < q; ++k) {
      m.add_column(VarKind::continuous(0.0, c.h_max - c.h_std),
                   tag("B", {inst.nurses[i].id, std::to_string(k + 1)}));
    }
  }
  m.add_column(VarKind::continuous(0.0, kInf), "Z");

  auto add = [&](std::vector<Term> terms, Sense sense, double rhs, std::string name) {
    m.constraints.push_back({std::move(terms), sense, rhs, std::move(name)});
  };
  auto week_hours = [&](int i, int k) {
    std::vector<Term> terms;
    for (int t = k * dpw; t < (k + 1) * dpw; ++t) {
      for (int s = 0; s < S; ++s) terms.push_back({idx.x(i, s, t), inst.shifts[s].duration_hours});
    }
    return terms;
  };
  auto week_label = [](int k) { return std::to_string(k + 1); };

  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) {
      std::vector<Term> terms;
      for (int s = 0; s < S; ++s) terms.push_back({idx.x(i, s, t), 1.0});
      add(std::move(terms), Sense::LessEqual, 1.0, tag("Eq1", {inst.nurses[i].id, day[t]}));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < q; ++k) {
      add(week_hours(i, k), Sense::GreaterEqual, inst.nurses[i].contract.h_min,
          tag("Eq2", {inst.nurses[i].id, week_label(k)}));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < q; ++k) {
      add(week_hours(i, k), Sense::LessEqual, inst.nurses[i].contract.h_max,
          tag("Eq3", {inst.nurses[i].id, week_label(k)}));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int night = 0; night < S; ++night) {
      if (!inst.shifts[night].is_night) continue;
      for (int t = 0; t + 1 < T; ++t) {
        std::vector<Term> terms;
        for (int s = 0; s < S; ++s) terms.push_back({idx.x(i, s, t + 1), 1.0});
        terms.push_back({idx.x(i, night, t), 1.0});
        add(std::move(terms), Sense::LessEqual, 1.0,
            tag("Eq5", {inst.nurses[i].id, inst.shifts[night].id, day[t]}));
      }
    }
  }
  for (int s = 0; s < S; ++s) {
    const double a = inst.shifts[s].capacity_per_nurse;
    for (int t = 0; t < T; ++t) {
      std::vector<Term> terms;
      for (int i = 0; i < n; ++i) terms.push_back({idx.x(i, s, t), a});
      terms.push_back({idx.j(s, t), a});
      add(std::move(terms), Sense::GreaterEqual, inst.demand[t],
          tag("Eq7", {inst.shifts[s].id, day[t]}));
    }
  }
  for (int s = 0; s < S; ++s) {
    if (inst.shifts[s].min_staff <= 0) continue;
    for (int t = 0; t < T; ++t) {
      std::vector<Term> terms;
      for (int i = 0; i < n; ++i) terms.push_back({idx.x(i, s, t), 1.0});
      add(std::move(terms), Sense::GreaterEqual, inst.shifts[s].min_staff,
          tag("MinStaff", {inst.shifts[s].id, day[t]}));
    }
  }
  for (int i = 0; i < n; ++i) {
    std::vector<Term> terms;
    for (int t = 0; t < T; ++t) {
      for (int s = 0; s < S; ++s) terms.push_back({idx.x(i, s, t), inst.weights.at(s, t)});
    }
    terms.push_back({idx.z(), -1.0});
    add(std::move(terms), Sense::LessEqual, 0.0, tag("ZLink", {inst.nurses[i].id}));
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < q; ++k) {
      std::vector<Term> terms = week_hours(i, k);
      terms.push_back({idx.b(i, k), -1.0});
      add(std::move(terms), Sense::LessEqual, inst.nurses[i].contract.h_std,
          tag("BLink", {inst.nurses[i].id, week_label(k)}));
    }
  }

  m.objective.push_back({idx.z(), 1.0});
  if (inst.penalties.p1 != 0.0) {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < q; ++k) m.objective.push_back({idx.b(i, k), inst.penalties.p1});
    }
  }
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < T; ++t) m.objective.push_back({idx.j(s, t), inst.penalties.big_m});
  }
  m.objective_step = objective_lattice_step(inst);
  return out;
}

Roster decode(const std::vector<double>& values, const VarIndex& idx, const RosterInstance& inst,
              std::optional<double> solver_objective, double integrality_tol) {
  if (static_cast<int>(values.size()) != idx.size()) {
    throw DecodeError("value vector has " + std::to_string(values.size()) +
                      " entries, model has " + std::to_string(idx.size()) + " columns");
  }
  auto integral = [&](int col) {
    const double v = values[col];
    const double r = std::round(v);
    if (!(std::abs(v - r) <= integrality_tol)) {
      std::ostringstream os;
      os << "column " << col << " holds non-integral value " << v;
      throw DecodeError(os.str());
    }
    return r;
  };

  Roster roster = Roster::empty_for(inst);
  for (int i = 0; i < inst.num_nurses(); ++i) {
    for (int s = 0; s < inst.num_shifts(); ++s) {
      for (int t = 0; t < inst.num_days(); ++t) {
        const double v = integral(idx.x(i, s, t));
        if (v != 0.0 && v != 1.0) throw DecodeError("binary column outside {0,1}");
        roster.set_x(i, s, t, v == 1.0);
      }
    }
  }
  for (int s = 0; s < inst.num_shifts(); ++s) {
    for (int t = 0; t < inst.num_days(); ++t) {
      const double v = integral(idx.j(s, t));
      if (v < 0.0) throw DecodeError("negative slack");
      roster.set_j(s, t, static_cast<int>(v));
    }
  }
  recompute_derived(inst, roster);
  if (solver_objective) {
    const double scale = std::max(1.0, std::abs(*solver_objective));
    if (std::abs(roster.objective - *solver_objective) > 1e-6 * scale) {
      std::ostringstream os;
      os << "recomputed objective " << roster.objective << " differs from solver objective "
         << *solver_objective;
      throw DecodeError(os.str());
    }
  }
  return roster;
}

std::vector<double> to_values(const Roster& roster, const VarIndex& idx,
                              const RosterInstance& inst) {
  Roster r = roster;
  recompute_derived(inst, r);
  std::vector<double> v(idx.size(), 0.0);
  for (int i = 0; i < inst.num_nurses(); ++i) {
    for (int s = 0; s < inst.num_shifts(); ++s) {
      for (int t = 0; t < inst.num_days(); ++t) v[idx.x(i, s, t)] = r.x(i, s, t) ? 1.0 : 0.0;
    }
    for (int k = 0; k < inst.num_weeks(); ++k) v[idx.b(i, k)] = r.beta(i, k);
  }
  for (int s = 0; s < inst.num_shifts(); ++s) {
    for (int t = 0; t < inst.num_days(); ++t) v[idx.j(s, t)] = r.j(s, t);
  }
  v[idx.z()] = r.z;
  return v;
}

double objective_of(const RosterInstance& inst, const Roster& roster) {
  double z = 0.0;
  double overtime = 0.0;
  for (int i = 0; i < inst.num_nurses(); ++i) {
    double load = 0.0;
    for (int t = 0; t < inst.num_days(); ++t) {
      for (int s = 0; s < inst.num_shifts(); ++s) {
        if (roster.x(i, s, t)) load += inst.weights.at(s, t);
      }
    }
    z = std::max(z, load);
    for (int k = 0; k < inst.num_weeks(); ++k) {
      double hours = 0.0;
      for (int t = k * inst.horizon.days_per_week; t < (k + 1) * inst.horizon.days_per_week; ++t) {
        for (int s = 0; s < inst.num_shifts(); ++s) {
          if (roster.x(i, s, t)) hours += inst.shifts[s].duration_hours;
        }
      }
      overtime += std::max(0.0, hours - inst.nurses[i].contract.h_std);
    }
  }
  double slack = 0.0;
  for (int s = 0; s < inst.num_shifts(); ++s) {
    for (int t = 0; t < inst.num_days(); ++t) slack += roster.j(s, t);
  }
  return z + inst.penalties.p1 * overtime + inst.penalties.big_m * slack;
}

}  // namespace nrp
