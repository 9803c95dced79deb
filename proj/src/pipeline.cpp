// SPDX-License-Identifier: Apache-2.0

#include "nrp/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "nrp/encoder.hpp"
#include "nrp/io.hpp"
#include "nrp/roster_solver.hpp"

namespace nrp {

using nlohmann::json;

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

RosterInstance apply_params(const RosterInstance& instance, const RunParams& params) {
  RosterInstance out = instance;
  if (params.p1) out.penalties.p1 = *params.p1;
  if (params.hire_cost) out.penalties.hire_cost = *params.hire_cost;
  if (params.big_m) out.penalties.big_m = *params.big_m;
  const ValidationReport report = validate_instance(out);
  if (!report.ok()) throw InvalidInstance(report);
  return out;
}

SolveOptions solve_options_for(const RunParams& params) {
  SolveOptions opts;
  opts.time_limit_seconds = params.time_limit_seconds.value_or(kDefaultTimeLimitSeconds);
  return opts;
}

HiringOptions hiring_options_for(const RunParams& params) {
  HiringOptions opts;
  opts.solve_options = solve_options_for(params);
  if (params.max_hires) opts.max_hires = *params.max_hires;
  opts.hire_template = params.hire_template;
  return opts;
}

namespace {

double number_at(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    throw std::invalid_argument(std::string("'") + key + "' must be a finite number");
  }
  return v.get<double>();
}

}  // namespace

RunParams params_from_json(const json& doc) {
  if (doc.is_null()) return {};
  if (!doc.is_object()) throw std::invalid_argument("params must be a JSON object");
  RunParams p;
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key == "p1") {
      p.p1 = number_at(doc, "p1");
    } else if (key == "hire_cost") {
      p.hire_cost = number_at(doc, "hire_cost");
    } else if (key == "big_m") {
      p.big_m = number_at(doc, "big_m");
    } else if (key == "time_limit") {
      p.time_limit_seconds = number_at(doc, "time_limit");
      if (*p.time_limit_seconds <= 0) throw std::invalid_argument("'time_limit' must be positive");
    } else if (key == "max_hires") {
      const double v = number_at(doc, "max_hires");
      if (v < 1 || v != std::floor(v)) throw std::invalid_argument("'max_hires' must be a positive integer");
      p.max_hires = static_cast<int>(v);
    } else if (key == "template") {
      const json& t = doc.at("template");
      if (!t.is_object()) throw std::invalid_argument("'template' must be an object");
      p.hire_template = NurseContract{number_at(t, "h_min"), number_at(t, "h_max"), number_at(t, "h_std")};
    } else {
      throw std::invalid_argument("unknown parameter '" + key + "'");
    }
  }
  return p;
}

json params_to_json(const RunParams& p) {
  json doc = json::object();
  if (p.p1) doc["p1"] = *p.p1;
  if (p.hire_cost) doc["hire_cost"] = *p.hire_cost;
  if (p.big_m) doc["big_m"] = *p.big_m;
  if (p.time_limit_seconds) doc["time_limit"] = *p.time_limit_seconds;
  if (p.max_hires) doc["max_hires"] = *p.max_hires;
  if (p.hire_template) {
    doc["template"] = {{"h_min", p.hire_template->h_min},
                       {"h_std", p.hire_template->h_std},
                       {"h_max", p.hire_template->h_max}};
  }
  return doc;
}

SolveOutcome run_solve(const RosterInstance& instance, const RunParams& params) {
  const RosterInstance inst = apply_params(instance, params);
  RosterSolution sol = solve_instance(inst, solve_options_for(params));
  SolveOutcome out;
  out.milp = std::move(sol.milp);
  out.roster = std::move(sol.roster);
  if (out.roster) {
    out.kpis = compute_kpis(inst, *out.roster);
    out.understaffing = detect_understaffing(inst, *out.roster);
  }
  return out;
}

json solve_document(const RosterInstance& inst, const SolveOutcome& o) {
  json doc = {{"kind", "solve"},
              {"status", to_string(o.milp.status)},
              {"nodes", o.milp.stats.nodes},
              {"root_bound", o.milp.stats.root_bound},
              {"hires", 0}};
  if (o.roster) {
    doc["objective"] = o.milp.objective;
    doc["best_bound"] = o.milp.best_bound;
    doc["gap"] = o.milp.gap;
    doc["slack"] = o.roster->total_slack();
    doc["kpis"] = to_json(*o.kpis);
    doc["understaffing"] = to_json(*o.understaffing);
    doc["roster"] = roster_to_json(inst, *o.roster);
  } else {
    doc["objective"] = nullptr;
    doc["slack"] = nullptr;
  }
  return doc;
}

json staff_plan_document(const HiringPlan& plan) {
  json doc = to_json(plan);
  doc["kind"] = "staff-plan";
  doc["status"] = plan.iterations.empty() ? "failed" : "done";
  doc["hires"] = plan.hires_accepted;
  if (plan.final_roster) {
    doc["objective"] = plan.final_roster->objective;
    doc["slack"] = plan.final_roster->total_slack();
  } else {
    doc["objective"] = nullptr;
    doc["slack"] = nullptr;
  }
  return doc;
}

}  // namespace nrp
