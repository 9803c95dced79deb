// SPDX-License-Identifier: Apache-2.0

#include "nrp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "nrp/encoder.hpp"
#include "nrp/io.hpp"
#include "nrp/pipeline.hpp"
#include "nrp/staffing.hpp"

namespace nrp {

namespace fs = std::filesystem;

namespace {

struct InstanceFlags {
  std::string dir;
  std::string nurses;
  std::string shifts;
  std::string demand;
  std::string config;

  void attach(CLI::App* app) {
    app->add_option("-i,--instance", dir,
                    "directory holding nurses.csv, shifts.csv, demand.csv and config.json");
    app->add_option("--nurses", nurses, "nurses table (overrides the directory's)");
    app->add_option("--shifts", shifts, "shifts table (overrides the directory's)");
    app->add_option("--demand", demand, "demand table (overrides the directory's)");
    app->add_option("--config", config, "config document (overrides the directory's)");
  }

  bool complete() const {
    return !dir.empty() || (!nurses.empty() && !shifts.empty() && !demand.empty() && !config.empty());
  }

  InstanceFileSet files() const {
    InstanceFileSet f = InstanceFileSet::in_directory(dir.empty() ? fs::path(".") : fs::path(dir));
    if (!nurses.empty()) f.nurses = nurses;
    if (!shifts.empty()) f.shifts = shifts;
    if (!demand.empty()) f.demand = demand;
    if (!config.empty()) f.config = config;
    return f;
  }
};

struct ParamFlags {
  std::optional<double> p1;
  std::optional<double> hire_cost;
  std::optional<double> big_m;
  std::optional<double> time_limit;
  std::optional<int> max_hires;

  void attach(CLI::App* app, bool hiring) {
    app->add_option("--p1", p1, "overtime weight");
    app->add_option("--hire-cost", hire_cost, "cost of one additional nurse, in objective units");
    app->add_option("--big-m", big_m, "slack penalty");
    app->add_option("--time-limit", time_limit, "solver time limit per solve, seconds")
        ->check(CLI::PositiveNumber);
    if (hiring) app->add_option("--max-hires", max_hires, "hiring loop cap")->check(CLI::PositiveNumber);
  }

  RunParams params() const {
    RunParams p;
    p.p1 = p1;
    p.hire_cost = hire_cost;
    p.big_m = big_m;
    p.time_limit_seconds = time_limit;
    p.max_hires = max_hires;
    return p;
  }
};

void print_issues(std::ostream& err, const char* kind, const std::vector<Issue>& issues) {
  for (const Issue& i : issues) {
    err << kind << ": ";
    if (!i.location.empty()) err << i.location << ": ";
    err << i.message << " [" << i.code << "]\n";
  }
}

nlohmann::json issues_json(const std::vector<Issue>& issues) {
  nlohmann::json out = nlohmann::json::array();
  for (const Issue& i : issues) {
    out.push_back({{"code", i.code}, {"message", i.message}, {"location", i.location}});
  }
  return out;
}

// Loads the instance, reporting located problems on `err`. nullopt on failure.
std::optional<LoadedInstance> load(const InstanceFlags& flags, std::ostream& err) {
  try {
    LoadedInstance loaded = load_instance(flags.files());
    print_issues(err, "warning", loaded.warnings);
    return loaded;
  } catch (const ParseError& e) {
    print_issues(err, "error", e.issues());
  } catch (const InvalidInstance& e) {
    print_issues(err, "error", e.report().errors);
  }
  return std::nullopt;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void summary_line(std::ostream& out, const std::string& status, std::optional<double> objective,
                  std::optional<int> slack, int hires, double seconds) {
  out << "status=" << status << " objective=" << (objective ? format_number(*objective) : "none")
      << " slack=" << (slack ? std::to_string(*slack) : "none") << " hires=" << hires
      << " time_s=" << fixed(seconds, 3) << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Writes every solve artifact into `dir`. Documents are built before the
// first write so a failure never leaves a half-populated directory behind.
void write_solve_outputs(const RosterInstance& inst, const Roster& roster, const KpiReport& kpis,
                         const UnderstaffingReport& under, const fs::path& dir) {
  const std::string roster_doc = dump_document(roster_to_json(inst, roster));
  const std::string kpi_doc = dump_document(to_json(kpis));
  const std::string under_doc = dump_document(to_json(under));
  fs::create_directories(dir);
  export_nurse_sheets(inst, roster, dir / "sheets");
  write_file_atomic(dir / "kpis.json", kpi_doc);
  write_file_atomic(dir / "understaffing.json", under_doc);
  write_file_atomic(dir / "roster.json", roster_doc);
}

int cmd_validate(const InstanceFlags& flags, std::ostream& out, std::ostream& err) {
  ValidationReport report;
  try {
    LoadedInstance loaded = load_instance(flags.files());
    report.warnings = loaded.warnings;
  } catch (const ParseError& e) {
    report.errors = e.issues();
  } catch (const InvalidInstance& e) {
    report = e.report();
  }
  print_issues(err, "error", report.errors);
  print_issues(err, "warning", report.warnings);
  out << dump_document({{"valid", report.ok()},
                        {"errors", issues_json(report.errors)},
                        {"warnings", issues_json(report.warnings)}});
  return report.ok() ? kExitOk : kExitError;
}

int cmd_solve(const InstanceFlags& flags, const ParamFlags& pflags, const std::string& out_dir,
              std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  auto loaded = load(flags, err);
  if (!loaded) return kExitError;
  const RunParams params = pflags.params();
  const RosterInstance inst = apply_params(loaded->instance, params);
  const SolveOutcome o = run_solve(loaded->instance, params);
  const MilpResult& m = o.milp;
  err << "nodes=" << m.stats.nodes << " simplex_iterations=" << m.stats.simplex_iterations
      << " root_bound=" << format_number(m.stats.root_bound) << "\n";
  if (!o.roster) {
    if (m.status == MilpStatus::Infeasible) {
      err << "error: no roster satisfies the hard constraints (weekly minimums, night rest, "
             "staffing floors)\n";
    } else {
      err << "error: solver stopped (" << to_string(m.status) << ") before finding a roster\n";
    }
    summary_line(out, to_string(m.status), std::nullopt, std::nullopt, 0, seconds_since(start));
    return m.status == MilpStatus::LimitReached ? kExitLimit : kExitError;
  }
  write_solve_outputs(inst, *o.roster, *o.kpis, *o.understaffing, out_dir);
  if (m.status != MilpStatus::Optimal) {
    err << "warning: time limit reached, exporting best roster found; gap=" << format_number(m.gap)
        << " bound=" << format_number(m.best_bound) << "\n";
  }
  for (const UnderstaffingEntry& e : o.understaffing->entries) {
    err << "understaffed: " << e.shift_id << " on " << e.day << " short " << e.shortfall_patients
        << " patients (" << e.slack_units << " slack nurses)\n";
  }
  summary_line(out, to_string(m.status), m.objective, o.roster->total_slack(), 0, seconds_since(start));
  return m.status == MilpStatus::Optimal ? kExitOk : kExitLimit;
}

int cmd_staff_plan(const InstanceFlags& flags, const ParamFlags& pflags, const std::string& out_dir,
                   std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  auto loaded = load(flags, err);
  if (!loaded) return kExitError;
  const RunParams params = pflags.params();
  const RosterInstance inst = apply_params(loaded->instance, params);
  const HiringPlan plan = plan_hiring(inst, hiring_options_for(params));

  out << "iteration nurses objective slack overtime_h\n";
  for (std::size_t k = 0; k < plan.iterations.size(); ++k) {
    const HiringIteration& it = plan.iterations[k];
    out << k << " " << it.nurse_count << " " << format_number(it.objective) << " " << it.total_slack << " "
        << format_number(it.kpis.total_overtime_hours) << "\n";
  }
  err << "stop_reason=" << to_string(plan.stop_reason);
  if (!plan.detail.empty()) err << " (" << plan.detail << ")";
  err << "\n";

  if (!plan.final_roster) {
    err << "error: the initial instance could not be solved (" << plan.detail << ")\n";
    summary_line(out, plan.detail, std::nullopt, std::nullopt, 0, seconds_since(start));
    return plan.detail == to_string(MilpStatus::Infeasible) ? kExitError : kExitLimit;
  }
  const RosterInstance& fin = plan.final_instance;
  const KpiReport final_kpis = compute_kpis(fin, *plan.final_roster);
  const std::string plan_doc = dump_document(to_json(plan));
  const std::string delta_doc = dump_document(to_json(kpi_delta(plan.iterations.front().kpis, final_kpis)));
  write_solve_outputs(fin, *plan.final_roster, final_kpis, detect_understaffing(fin, *plan.final_roster),
                      out_dir);
  write_file_atomic(fs::path(out_dir) / "plan.json", plan_doc);
  write_file_atomic(fs::path(out_dir) / "delta.json", delta_doc);
  const bool limited = plan.stop_reason == StopReason::SolverLimit;
  summary_line(out, limited ? "limit" : "optimal", plan.final_roster->objective,
               plan.final_roster->total_slack(), plan.hires_accepted, seconds_since(start));
  return limited ? kExitLimit : kExitOk;
}

int cmd_kpi(const InstanceFlags& flags, const std::string& roster_path, const std::string& against,
            const std::string& out_path, std::ostream& out, std::ostream& err) {
  auto loaded = load(flags, err);
  if (!loaded) return kExitError;
  const RosterInstance& inst = loaded->instance;
  const KpiReport report = compute_kpis(inst, load_roster(inst, roster_path));
  nlohmann::json doc = to_json(report);
  if (!against.empty()) {
    const KpiReport base = compute_kpis(inst, load_roster(inst, against));
    doc = {{"baseline", to_json(base)}, {"report", to_json(report)}, {"delta", to_json(kpi_delta(base, report))}};
  }
  if (out_path.empty()) {
    out << dump_document(doc);
  } else {
    write_file_atomic(out_path, dump_document(doc));
  }
  return kExitOk;
}

int cmd_export(const InstanceFlags& flags, const std::string& roster_path, const std::string& sheets,
               const std::string& instance_dir, const std::string& instance_json, std::ostream& err) {
  auto loaded = load(flags, err);
  if (!loaded) return kExitError;
  const RosterInstance& inst = loaded->instance;
  if (!instance_dir.empty()) export_instance(inst, InstanceFileSet::in_directory(instance_dir));
  if (!instance_json.empty()) write_file_atomic(instance_json, dump_document(instance_to_json(inst)));
  if (!sheets.empty()) {
    if (roster_path.empty()) {
      err << "error: --sheets needs --roster\n";
      return kExitUsage;
    }
    export_nurse_sheets(inst, load_roster(inst, roster_path), sheets);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nurse rostering: validate, solve, plan hiring, report KPIs, export.", "nrp"};
  app.require_subcommand(1);

  InstanceFlags flags;
  ParamFlags pflags;
  std::string out_dir = "out";
  std::string roster_path;
  std::string against;
  std::string out_path;
  std::string sheets;
  std::string instance_dir;
  std::string instance_json;

  CLI::App* validate = app.add_subcommand("validate", "check an instance and report located problems");
  flags.attach(validate);

  CLI::App* solve = app.add_subcommand("solve", "solve an instance and export roster, sheets and KPIs");
  flags.attach(solve);
  pflags.attach(solve, false);
  solve->add_option("-o,--out", out_dir, "output directory")->capture_default_str();

  CLI::App* staff = app.add_subcommand("staff-plan", "run the hiring loop");
  flags.attach(staff);
  pflags.attach(staff, true);
  staff->add_option("-o,--out", out_dir, "output directory")->capture_default_str();

  CLI::App* kpi = app.add_subcommand("kpi", "KPI report for a stored roster");
  flags.attach(kpi);
  kpi->add_option("--roster", roster_path, "roster document")->required();
  kpi->add_option("--against", against, "baseline roster document; adds a delta");
  kpi->add_option("-o,--out", out_path, "write the report here instead of standard output");

  CLI::App* exp = app.add_subcommand("export", "format conversions");
  flags.attach(exp);
  exp->add_option("--roster", roster_path, "roster document");
  exp->add_option("--sheets", sheets, "write per-nurse sheets of --roster to this directory");
  exp->add_option("--instance-out", instance_dir, "write the instance as CSV tables and config");
  exp->add_option("--instance-json", instance_json, "write the instance as one JSON document");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  if (!flags.complete()) {
    err << "error: give --instance DIR or all of --nurses, --shifts, --demand, --config\n" << app.help();
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(flags, out, err);
    if (solve->parsed()) return cmd_solve(flags, pflags, out_dir, out, err);
    if (staff->parsed()) return cmd_staff_plan(flags, pflags, out_dir, out, err);
    if (kpi->parsed()) return cmd_kpi(flags, roster_path, against, out_path, out, err);
    if (exp->parsed()) return cmd_export(flags, roster_path, sheets, instance_dir, instance_json, err);
  } catch (const InvalidInstance& e) {
    print_issues(err, "error", e.report().errors);
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace nrp
