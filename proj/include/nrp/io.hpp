// SPDX-License-Identifier: Apache-2.0
//
// Instance ingestion (CSV tables plus a JSON config) and result export.
//
// Every export is deterministic byte for byte and written atomically: the
// document goes to a temporary sibling file that is renamed into place.

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nrp/kpi.hpp"
#include "nrp/model.hpp"
#include "nrp/staffing.hpp"

namespace nrp {

struct InstanceFileSet {
  std::filesystem::path nurses;
  std::filesystem::path shifts;
  std::filesystem::path demand;
  std::filesystem::path config;

  // nurses.csv, shifts.csv, demand.csv and config.json inside `dir`.
  static InstanceFileSet in_directory(const std::filesystem::path& dir);
};

// Located parse failures. Validation failures of a well-formed instance are
// raised as InvalidInstance instead.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedInstance {
  RosterInstance instance;
  std::vector<Issue> warnings;  // ignored extra columns and validation warnings
};

LoadedInstance load_instance(const InstanceFileSet& files);

// Same rules as load_instance for a JSON document
// {"nurses": [...], "shifts": [...], "demand": [...], "config": {...}} whose
// row objects use the CSV column names as keys.
LoadedInstance instance_from_json(const nlohmann::json& payload);
nlohmann::json instance_to_json(const RosterInstance& instance);

// Writes the four files of `files`. Weights are written only where they
// differ from default_weights.
void export_instance(const RosterInstance& instance, const InstanceFileSet& files);

// Hex SHA-256 of the canonical instance document.
std::string instance_fingerprint(const RosterInstance& instance);

nlohmann::json roster_to_json(const RosterInstance& instance, const Roster& roster);
Roster roster_from_json(const RosterInstance& instance, const nlohmann::json& doc);
void export_roster(const RosterInstance& instance, const Roster& roster,
                   const std::filesystem::path& destination);
// Throws IoError when the document belongs to a different instance.
Roster load_roster(const RosterInstance& instance, const std::filesystem::path& source);

inline constexpr const char* kRestMarker = "REST";
inline constexpr const char* kPostNightMarker = "POST-NIGHT-REST";

// Shift id worked by nurse `i` on day `t`, else kPostNightMarker right after
// a night shift, else kRestMarker.
std::string day_marker(const RosterInstance& instance, const Roster& roster, int nurse, int day);

// One <nurse id>.csv per nurse (day, assignment, hours) plus summary.csv.
void export_nurse_sheets(const RosterInstance& instance, const Roster& roster,
                         const std::filesystem::path& directory);
// File name used for a nurse's sheet.
std::string sheet_file_name(const std::string& nurse_id);

nlohmann::json to_json(const KpiReport& report);
nlohmann::json to_json(const KpiDelta& delta);
nlohmann::json to_json(const UnderstaffingReport& report);
nlohmann::json to_json(const HiringPlan& plan);

void export_kpis(const KpiReport& report, const std::filesystem::path& destination);
void export_kpis(const KpiDelta& delta, const std::filesystem::path& destination);
void export_kpis(const HiringPlan& plan, const std::filesystem::path& destination);

// Temporary sibling file, then rename. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Canonical text for documents: two-space indent, trailing newline.
std::string dump_document(const nlohmann::json& doc);

}  // namespace nrp
