// SPDX-License-Identifier: Apache-2.0

#include "nrp/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <system_error>

#include "nrp/encoder.hpp"
#include "nrp/pipeline.hpp"

namespace nrp {

namespace fs = std::filesystem;
using nlohmann::json;

InstanceFileSet InstanceFileSet::in_directory(const fs::path& dir) {
  return {dir / "nurses.csv", dir / "shifts.csv", dir / "demand.csv", dir / "config.json"};
}

namespace {

std::string join_messages(const std::vector<Issue>& issues) {
  std::string out;
  for (const Issue& i : issues) {
    if (!out.empty()) out += "; ";
    out += i.location.empty() ? i.message : i.location + ": " + i.message;
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::vector<Issue> issues)
    : std::runtime_error(join_messages(issues)), issues_(std::move(issues)) {}

// ---------------------------------------------------------------------------
// Files

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("cannot write " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot write " + path.string() + ": " + ec.message());
  }
}

std::string dump_document(const json& doc) { return doc.dump(2) + "\n"; }

namespace {

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// ---------------------------------------------------------------------------
// Tables. CSV files and JSON row arrays both become a Table so that one set
// of conversion rules (and error locations) covers both sources.

struct Cell {
  std::string text;
  std::string location;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::map<std::string, Cell>> rows;
  std::vector<std::string> row_locations;
  bool from_json = false;
};

std::vector<std::vector<std::string>> split_csv(const std::string& text, const std::string& name,
                                                std::vector<int>& line_of_record,
                                                std::vector<Issue>& errors) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  int line = 1;
  int record_line = 1;
  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      records.push_back(record);
      line_of_record.push_back(record_line);
    }
    record.clear();
  };
  std::size_t i = 0;
  if (text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      end_record();
      ++line;
      record_line = line;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) errors.push_back({"csv-unterminated-quote", "unterminated quoted field",
                                name + ":" + std::to_string(record_line)});
  if (!field.empty() || !record.empty()) end_record();
  return records;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

Table table_from_csv(const fs::path& path, const std::string& label, std::vector<Issue>& errors) {
  Table t;
  t.name = label;
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    errors.push_back({"file-unreadable", e.what(), label});
    return t;
  }
  std::vector<int> lines;
  const auto records = split_csv(text, label, lines, errors);
  if (records.empty()) {
    errors.push_back({"missing-header", "empty table, header row expected", label + ":1"});
    return t;
  }
  for (const std::string& h : records[0]) t.columns.push_back(trim(h));
  for (std::size_t r = 1; r < records.size(); ++r) {
    const std::string row_loc = label + ":" + std::to_string(lines[r]);
    if (records[r].size() != t.columns.size()) {
      errors.push_back({"csv-field-count",
                        "expected " + std::to_string(t.columns.size()) + " fields, found " +
                            std::to_string(records[r].size()),
                        row_loc});
      continue;
    }
    std::map<std::string, Cell> row;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      row[t.columns[c]] = Cell{trim(records[r][c]), row_loc + ":" + t.columns[c]};
    }
    t.rows.push_back(std::move(row));
    t.row_locations.push_back(row_loc);
  }
  return t;
}

std::string json_cell_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  return v.dump();
}

Table table_from_json(const json& rows, const std::string& label, std::vector<Issue>& errors) {
  Table t;
  t.name = label;
  t.from_json = true;
  if (!rows.is_array()) {
    errors.push_back({"not-an-array", "expected an array of row objects", label});
    return t;
  }
  std::set<std::string> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string row_loc = label + "[" + std::to_string(r) + "]";
    if (!rows[r].is_object()) {
      errors.push_back({"not-an-object", "expected a row object", row_loc});
      continue;
    }
    std::map<std::string, Cell> row;
    for (const auto& [key, value] : rows[r].items()) {
      row[key] = Cell{json_cell_text(value), row_loc + "." + key};
      if (seen.insert(key).second) t.columns.push_back(key);
    }
    t.rows.push_back(std::move(row));
    t.row_locations.push_back(row_loc);
  }
  return t;
}

// Checks required columns; extra ones become warnings. A JSON table with no
// rows has no columns at all and is left to validation.
bool check_columns(const Table& t, const std::vector<std::string>& required,
                   std::vector<Issue>& errors, std::vector<Issue>& warnings) {
  if (t.from_json && t.rows.empty()) return true;
  bool ok = true;
  for (const std::string& col : required) {
    if (std::find(t.columns.begin(), t.columns.end(), col) != t.columns.end()) continue;
    errors.push_back({"missing-column", "missing column '" + col + "'", t.name});
    ok = false;
  }
  for (const std::string& col : t.columns) {
    if (std::find(required.begin(), required.end(), col) == required.end()) {
      warnings.push_back({"ignored-column", "column '" + col + "' is not used and was ignored",
                          t.name});
    }
  }
  return ok;
}

class RowReader {
 public:
  RowReader(const std::map<std::string, Cell>& row, const std::string& row_loc,
            std::vector<Issue>& errors)
      : row_(row), row_loc_(row_loc), errors_(errors) {}

  const Cell* cell(const std::string& col) {
    auto it = row_.find(col);
    if (it == row_.end()) {
      errors_.push_back({"missing-field", "missing field '" + col + "'", row_loc_});
      return nullptr;
    }
    return &it->second;
  }

  std::string text(const std::string& col) {
    const Cell* c = cell(col);
    return c ? c->text : std::string();
  }

  std::string nonempty(const std::string& col) {
    const Cell* c = cell(col);
    if (!c) return {};
    if (c->text.empty()) errors_.push_back({"empty-field", "'" + col + "' must not be empty", c->location});
    return c->text;
  }

  double number(const std::string& col) {
    const Cell* c = cell(col);
    if (!c) return 0.0;
    double v = 0.0;
    const char* b = c->text.data();
    const char* e = b + c->text.size();
    auto res = std::from_chars(b, e, v);
    if (c->text.empty() || res.ec != std::errc() || res.ptr != e || !std::isfinite(v)) {
      errors_.push_back({"not-a-number", "'" + c->text + "' is not a number", c->location});
      return 0.0;
    }
    return v;
  }

  int integer(const std::string& col) {
    const Cell* c = cell(col);
    if (!c) return 0;
    int v = 0;
    const char* b = c->text.data();
    const char* e = b + c->text.size();
    auto res = std::from_chars(b, e, v);
    if (c->text.empty() || res.ec != std::errc() || res.ptr != e) {
      errors_.push_back({"not-an-integer", "'" + c->text + "' is not an integer", c->location});
      return 0;
    }
    return v;
  }

  int nonnegative_integer(const std::string& col) {
    const int v = integer(col);
    if (v < 0) {
      errors_.push_back({"negative-value", "'" + col + "' must not be negative", cell(col)->location});
    }
    return v;
  }

  bool boolean(const std::string& col) {
    const Cell* c = cell(col);
    if (!c) return false;
    std::string t = c->text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no" || t.empty()) return false;
    errors_.push_back({"not-a-boolean", "'" + c->text + "' is not a boolean", c->location});
    return false;
  }

 private:
  const std::map<std::string, Cell>& row_;
  std::string row_loc_;
  std::vector<Issue>& errors_;
};

const std::vector<std::string> kNurseColumns = {"id", "name", "h_min", "h_std", "h_max"};
const std::vector<std::string> kShiftColumns = {"id",        "name",      "duration_hours",
                                                "capacity_per_nurse", "min_staff", "is_night"};
const std::vector<std::string> kDemandColumns = {"day_label", "patients"};
const std::vector<std::string> kConfigKeys = {"weeks",    "days_per_week", "p1",
                                              "big_m",    "hire_cost",     "weights"};

double config_number(const json& cfg, const std::string& key, std::optional<double> fallback,
                     const std::string& label, std::vector<Issue>& errors) {
  const std::string loc = label + ":" + key;
  if (!cfg.contains(key)) {
    if (fallback) return *fallback;
    errors.push_back({"missing-key", "missing key '" + key + "'", loc});
    return 0.0;
  }
  const json& v = cfg.at(key);
  if (!v.is_number()) {
    errors.push_back({"not-a-number", "'" + key + "' must be a number", loc});
    return 0.0;
  }
  return v.get<double>();
}

int config_integer(const json& cfg, const std::string& key, const std::string& label,
                   std::vector<Issue>& errors) {
  const std::string loc = label + ":" + key;
  if (!cfg.contains(key)) {
    errors.push_back({"missing-key", "missing key '" + key + "'", loc});
    return 0;
  }
  const json& v = cfg.at(key);
  if (!v.is_number_integer() && !(v.is_number() && v.get<double>() == std::floor(v.get<double>()))) {
    errors.push_back({"not-an-integer", "'" + key + "' must be an integer", loc});
    return 0;
  }
  return static_cast<int>(v.get<double>());
}

struct Sources {
  Table nurses;
  Table shifts;
  Table demand;
  json config;
  std::string config_label;
};

LoadedInstance build_instance(const Sources& src, std::vector<Issue>& errors) {
  LoadedInstance out;
  RosterInstance& inst = out.instance;
  std::vector<Issue>& warnings = out.warnings;

  if (check_columns(src.nurses, kNurseColumns, errors, warnings)) {
    std::map<std::string, std::string> first_seen;
    for (std::size_t r = 0; r < src.nurses.rows.size(); ++r) {
      RowReader row(src.nurses.rows[r], src.nurses.row_locations[r], errors);
      Nurse n;
      n.id = row.nonempty("id");
      n.name = row.text("name");
      n.contract.h_min = row.number("h_min");
      n.contract.h_std = row.number("h_std");
      n.contract.h_max = row.number("h_max");
      auto [it, fresh] = first_seen.emplace(n.id, src.nurses.row_locations[r]);
      if (!fresh && !n.id.empty()) {
        errors.push_back({"duplicate-nurse-id", "nurse id '" + n.id + "' already defined at " + it->second,
                          src.nurses.row_locations[r] + ":id"});
      }
      inst.nurses.push_back(std::move(n));
    }
  }

  if (check_columns(src.shifts, kShiftColumns, errors, warnings)) {
    std::map<std::string, std::string> first_seen;
    for (std::size_t r = 0; r < src.shifts.rows.size(); ++r) {
      RowReader row(src.shifts.rows[r], src.shifts.row_locations[r], errors);
      ShiftType s;
      s.id = row.nonempty("id");
      s.name = row.text("name");
      s.duration_hours = row.number("duration_hours");
      s.capacity_per_nurse = row.integer("capacity_per_nurse");
      s.min_staff = row.integer("min_staff");
      s.is_night = row.boolean("is_night");
      auto [it, fresh] = first_seen.emplace(s.id, src.shifts.row_locations[r]);
      if (!fresh && !s.id.empty()) {
        errors.push_back({"duplicate-shift-id", "shift id '" + s.id + "' already defined at " + it->second,
                          src.shifts.row_locations[r] + ":id"});
      }
      inst.shifts.push_back(std::move(s));
    }
  }

  if (check_columns(src.demand, kDemandColumns, errors, warnings)) {
    std::map<std::string, std::string> first_seen;
    for (std::size_t r = 0; r < src.demand.rows.size(); ++r) {
      RowReader row(src.demand.rows[r], src.demand.row_locations[r], errors);
      const std::string label = row.nonempty("day_label");
      const int patients = row.nonnegative_integer("patients");
      auto [it, fresh] = first_seen.emplace(label, src.demand.row_locations[r]);
      if (!fresh && !label.empty()) {
        errors.push_back({"duplicate-day-label", "day label '" + label + "' already defined at " + it->second,
                          src.demand.row_locations[r] + ":day_label"});
      }
      inst.horizon.day_labels.push_back(label);
      inst.demand.push_back(patients);
    }
  }

  const json& cfg = src.config;
  const std::string& clabel = src.config_label;
  if (!cfg.is_object()) {
    errors.push_back({"config-not-object", "config must be a JSON object", clabel});
    return out;
  }
  for (const auto& [key, value] : cfg.items()) {
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
      warnings.push_back({"ignored-key", "config key '" + key + "' is not used and was ignored",
                          clabel + ":" + key});
    }
  }
  inst.horizon.weeks = config_integer(cfg, "weeks", clabel, errors);
  inst.horizon.days_per_week = config_integer(cfg, "days_per_week", clabel, errors);
  inst.penalties.p1 = config_number(cfg, "p1", 1.0, clabel, errors);
  inst.penalties.big_m = config_number(cfg, "big_m", 1e6, clabel, errors);
  inst.penalties.hire_cost = config_number(cfg, "hire_cost", 0.0, clabel, errors);

  if (inst.horizon.weeks <= 0 || inst.horizon.days_per_week <= 0) {
    // Leave the shape problem to validation, which reports it as an error.
    return out;
  }
  inst.weights = default_weights(inst.shifts, inst.horizon);
  if (cfg.contains("weights")) {
    const json& entries = cfg.at("weights");
    if (!entries.is_array()) {
      errors.push_back({"not-an-array", "'weights' must be an array", clabel + ":weights"});
      return out;
    }
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const std::string loc = clabel + ":weights[" + std::to_string(k) + "]";
      const json& e = entries[k];
      if (!e.is_object() || !e.contains("shift") || !e.contains("day") || !e.contains("weight") ||
          !e.at("shift").is_string() || !e.at("day").is_string() || !e.at("weight").is_number()) {
        errors.push_back({"bad-weight-entry",
                          "weight entries need string 'shift', string 'day' and numeric 'weight'", loc});
        continue;
      }
      const std::string sid = e.at("shift").get<std::string>();
      const std::string day = e.at("day").get<std::string>();
      auto sit = std::find_if(inst.shifts.begin(), inst.shifts.end(),
                              [&](const ShiftType& s) { return s.id == sid; });
      if (sit == inst.shifts.end()) {
        errors.push_back({"unknown-shift", "unknown shift id '" + sid + "'", loc + ".shift"});
        continue;
      }
      const auto t = inst.horizon.day_index(day);
      if (!t) {
        errors.push_back({"unknown-day-label", "unknown day label '" + day + "'", loc + ".day"});
        continue;
      }
      if (*t >= inst.weights.num_days()) continue;  // horizon mismatch, reported by validation
      inst.weights.set(static_cast<int>(sit - inst.shifts.begin()), *t, e.at("weight").get<double>());
    }
  }
  return out;
}

// Rewrites validation locations such as "nurses[3]" to the source row, so
// CSV input reports "nurses.csv:5".
void relocate(const Sources& src, std::vector<Issue>& issues) {
  const std::pair<const char*, const Table*> tables[] = {
      {"nurses", &src.nurses}, {"shifts", &src.shifts}, {"demand", &src.demand}};
  for (Issue& issue : issues) {
    for (const auto& [name, table] : tables) {
      const std::string prefix = std::string(name) + "[";
      if (issue.location.rfind(prefix, 0) != 0 || issue.location.back() != ']') continue;
      const std::string digits = issue.location.substr(prefix.size(), issue.location.size() - prefix.size() - 1);
      std::size_t k = 0;
      auto res = std::from_chars(digits.data(), digits.data() + digits.size(), k);
      if (res.ec == std::errc() && res.ptr == digits.data() + digits.size() && k < table->row_locations.size()) {
        issue.location = table->row_locations[k];
      }
    }
  }
}

LoadedInstance finish(Sources& src) {
  std::vector<Issue> errors;
  LoadedInstance out = build_instance(src, errors);
  if (!errors.empty()) throw ParseError(std::move(errors));
  ValidationReport report = validate_instance(out.instance);
  relocate(src, report.errors);
  relocate(src, report.warnings);
  if (!report.ok()) throw InvalidInstance(report);
  out.warnings.insert(out.warnings.end(), report.warnings.begin(), report.warnings.end());
  return out;
}

}  // namespace

LoadedInstance load_instance(const InstanceFileSet& files) {
  std::vector<Issue> errors;
  Sources src;
  src.nurses = table_from_csv(files.nurses, files.nurses.filename().string(), errors);
  src.shifts = table_from_csv(files.shifts, files.shifts.filename().string(), errors);
  src.demand = table_from_csv(files.demand, files.demand.filename().string(), errors);
  src.config_label = files.config.filename().string();
  try {
    src.config = json::parse(read_file(files.config));
  } catch (const IoError& e) {
    errors.push_back({"file-unreadable", e.what(), src.config_label});
  } catch (const json::parse_error& e) {
    errors.push_back({"malformed-json", e.what(), src.config_label + ":byte " + std::to_string(e.byte)});
  }
  if (!errors.empty()) throw ParseError(std::move(errors));
  return finish(src);
}

LoadedInstance instance_from_json(const json& payload) {
  std::vector<Issue> errors;
  if (!payload.is_object()) throw ParseError({{"not-an-object", "payload must be a JSON object", ""}});
  Sources src;
  auto member = [&](const char* key) -> json {
    if (payload.contains(key)) return payload.at(key);
    errors.push_back({"missing-key", std::string("missing key '") + key + "'", key});
    return json::array();
  };
  src.nurses = table_from_json(member("nurses"), "nurses", errors);
  src.shifts = table_from_json(member("shifts"), "shifts", errors);
  src.demand = table_from_json(member("demand"), "demand", errors);
  src.config = payload.contains("config") ? payload.at("config") : json::object();
  src.config_label = "config";
  if (!errors.empty()) throw ParseError(std::move(errors));
  return finish(src);
}

// ---------------------------------------------------------------------------
// Instance export

namespace {

json weight_overrides(const RosterInstance& inst) {
  json out = json::array();
  const WeightTable defaults = default_weights(inst.shifts, inst.horizon);
  for (int s = 0; s < inst.num_shifts(); ++s) {
    for (int t = 0; t < inst.num_days(); ++t) {
      if (inst.weights.at(s, t) == defaults.at(s, t)) continue;
      out.push_back({{"shift", inst.shifts[s].id},
                     {"day", inst.horizon.day_labels[t]},
                     {"weight", inst.weights.at(s, t)}});
    }
  }
  return out;
}

json config_json(const RosterInstance& inst) {
  json cfg = {{"weeks", inst.horizon.weeks},
              {"days_per_week", inst.horizon.days_per_week},
              {"p1", inst.penalties.p1},
              {"big_m", inst.penalties.big_m},
              {"hire_cost", inst.penalties.hire_cost}};
  json w = weight_overrides(inst);
  if (!w.empty()) cfg["weights"] = std::move(w);
  return cfg;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out += ',';
    out += csv_field(fields[k]);
  }
  return out + "\n";
}

}  // namespace

json instance_to_json(const RosterInstance& inst) {
  json nurses = json::array();
  for (const Nurse& n : inst.nurses) {
    nurses.push_back({{"id", n.id},
                      {"name", n.name},
                      {"h_min", n.contract.h_min},
                      {"h_std", n.contract.h_std},
                      {"h_max", n.contract.h_max}});
  }
  json shifts = json::array();
  for (const ShiftType& s : inst.shifts) {
    shifts.push_back({{"id", s.id},
                      {"name", s.name},
                      {"duration_hours", s.duration_hours},
                      {"capacity_per_nurse", s.capacity_per_nurse},
                      {"min_staff", s.min_staff},
                      {"is_night", s.is_night}});
  }
  json demand = json::array();
  for (int t = 0; t < inst.num_days(); ++t) {
    demand.push_back({{"day_label", inst.horizon.day_labels[t]}, {"patients", inst.demand[t]}});
  }
  return {{"nurses", nurses}, {"shifts", shifts}, {"demand", demand}, {"config", config_json(inst)}};
}

void export_instance(const RosterInstance& inst, const InstanceFileSet& files) {
  for (const fs::path* p : {&files.nurses, &files.shifts, &files.demand, &files.config}) {
    if (p->has_parent_path()) ensure_directory(p->parent_path());
  }
  std::string nurses = csv_line(kNurseColumns);
  for (const Nurse& n : inst.nurses) {
    nurses += csv_line({n.id, n.name, format_number(n.contract.h_min), format_number(n.contract.h_std),
                        format_number(n.contract.h_max)});
  }
  std::string shifts = csv_line(kShiftColumns);
  for (const ShiftType& s : inst.shifts) {
    shifts += csv_line({s.id, s.name, format_number(s.duration_hours),
                        std::to_string(s.capacity_per_nurse), std::to_string(s.min_staff),
                        s.is_night ? "true" : "false"});
  }
  std::string demand = csv_line(kDemandColumns);
  for (int t = 0; t < inst.num_days(); ++t) {
    demand += csv_line({inst.horizon.day_labels[t], std::to_string(inst.demand[t])});
  }
  write_file_atomic(files.nurses, nurses);
  write_file_atomic(files.shifts, shifts);
  write_file_atomic(files.demand, demand);
  write_file_atomic(files.config, dump_document(config_json(inst)));
}

std::string instance_fingerprint(const RosterInstance& inst) {
  const std::string canonical = instance_to_json(inst).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 0xF];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rosters

json roster_to_json(const RosterInstance& inst, const Roster& r) {
  json assignments = json::array();
  for (int t = 0; t < inst.num_days(); ++t) {
    for (int s = 0; s < inst.num_shifts(); ++s) {
      json nurses = json::array();
      for (int i = 0; i < inst.num_nurses(); ++i) {
        if (r.x(i, s, t)) nurses.push_back(inst.nurses[i].id);
      }
      if (nurses.empty()) continue;
      assignments.push_back(
          {{"day", inst.horizon.day_labels[t]}, {"shift", inst.shifts[s].id}, {"nurses", nurses}});
    }
  }
  json slack = json::array();
  for (int t = 0; t < inst.num_days(); ++t) {
    for (int s = 0; s < inst.num_shifts(); ++s) {
      if (r.j(s, t) == 0) continue;
      slack.push_back({{"day", inst.horizon.day_labels[t]}, {"shift", inst.shifts[s].id}, {"units", r.j(s, t)}});
    }
  }
  json overtime = json::array();
  for (int i = 0; i < inst.num_nurses(); ++i) {
    json weeks = json::array();
    for (int k = 0; k < inst.num_weeks(); ++k) weeks.push_back(r.beta(i, k));
    overtime.push_back({{"nurse", inst.nurses[i].id}, {"weeks", weeks}});
  }
  return {{"format", "nrp-roster/1"},
          {"instance_fingerprint", instance_fingerprint(inst)},
          {"objective", r.objective},
          {"z", r.z},
          {"total_slack", r.total_slack()},
          {"assignments", assignments},
          {"slack", slack},
          {"overtime", overtime}};
}

Roster roster_from_json(const RosterInstance& inst, const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "nrp-roster/1") throw IoError("unsupported roster format");
    if (doc.at("instance_fingerprint").get<std::string>() != instance_fingerprint(inst)) {
      throw IoError("roster belongs to a different instance (fingerprint mismatch)");
    }
    auto shift_index = [&](const std::string& id) {
      for (int s = 0; s < inst.num_shifts(); ++s) {
        if (inst.shifts[s].id == id) return s;
      }
      throw IoError("unknown shift id '" + id + "' in roster");
    };
    auto day_index = [&](const std::string& label) {
      if (auto t = inst.horizon.day_index(label)) return *t;
      throw IoError("unknown day label '" + label + "' in roster");
    };
    auto nurse_index = [&](const std::string& id) {
      for (int i = 0; i < inst.num_nurses(); ++i) {
        if (inst.nurses[i].id == id) return i;
      }
      throw IoError("unknown nurse id '" + id + "' in roster");
    };
    Roster r = Roster::empty_for(inst);
    for (const json& a : doc.at("assignments")) {
      const int s = shift_index(a.at("shift").get<std::string>());
      const int t = day_index(a.at("day").get<std::string>());
      for (const json& n : a.at("nurses")) r.set_x(nurse_index(n.get<std::string>()), s, t, true);
    }
    for (const json& e : doc.at("slack")) {
      r.set_j(shift_index(e.at("shift").get<std::string>()), day_index(e.at("day").get<std::string>()),
              e.at("units").get<int>());
    }
    recompute_derived(inst, r);
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed roster document: ") + e.what());
  }
}

void export_roster(const RosterInstance& inst, const Roster& roster, const fs::path& destination) {
  if (destination.has_parent_path()) ensure_directory(destination.parent_path());
  write_file_atomic(destination, dump_document(roster_to_json(inst, roster)));
}

Roster load_roster(const RosterInstance& inst, const fs::path& source) {
  json doc;
  try {
    doc = json::parse(read_file(source));
  } catch (const json::parse_error& e) {
    throw IoError(source.string() + ": " + e.what());
  }
  return roster_from_json(inst, doc);
}

std::string sheet_file_name(const std::string& nurse_id) {
  std::string out;
  for (unsigned char c : nurse_id) {
    out += (std::isalnum(c) || c == '-' || c == '_' || c == '.') ? static_cast<char>(c) : '_';
  }
  if (out.empty() || out == "summary" || out[0] == '.') out = "nurse_" + out;
  return out + ".csv";
}

std::string day_marker(const RosterInstance& inst, const Roster& r, int i, int t) {
  if (auto s = r.shift_on(i, t)) return inst.shifts[*s].id;
  if (t > 0) {
    auto prev = r.shift_on(i, t - 1);
    if (prev && inst.shifts[*prev].is_night) return kPostNightMarker;
  }
  return kRestMarker;
}

void export_nurse_sheets(const RosterInstance& inst, const Roster& r, const fs::path& directory) {
  ensure_directory(directory);
  std::string summary = csv_line({"nurse", "total_hours", "overtime_hours", "weighted_workload"});
  for (int i = 0; i < inst.num_nurses(); ++i) {
    std::string sheet = csv_line({"day", "assignment", "hours"});
    double total = 0.0;
    for (int t = 0; t < inst.num_days(); ++t) {
      const auto s = r.shift_on(i, t);
      const double hours = s ? inst.shifts[*s].duration_hours : 0.0;
      total += hours;
      sheet += csv_line({inst.horizon.day_labels[t], day_marker(inst, r, i, t), format_number(hours)});
    }
    double overtime = 0.0;
    for (int k = 0; k < inst.num_weeks(); ++k) {
      overtime += std::max(0.0, weekly_hours(inst, r, i, k) - inst.nurses[i].contract.h_std);
    }
    summary += csv_line({inst.nurses[i].id, format_number(total), format_number(overtime),
                         format_number(weighted_workload(inst, r, i))});
    write_file_atomic(directory / sheet_file_name(inst.nurses[i].id), sheet);
  }
  write_file_atomic(directory / "summary.csv", summary);
}

// ---------------------------------------------------------------------------
// KPI documents

namespace {

json overtime_map(const std::vector<std::pair<std::string, double>>& entries) {
  json out = json::array();
  for (const auto& [id, v] : entries) out.push_back({{"nurse", id}, {"hours", v}});
  return out;
}

}  // namespace

json to_json(const KpiReport& k) {
  return {{"min_workload", k.min_workload},
          {"max_workload", k.max_workload},
          {"min_weekly_hours", k.min_weekly_hours},
          {"max_weekly_hours", k.max_weekly_hours},
          {"total_overtime_hours", k.total_overtime_hours},
          {"per_nurse_overtime", overtime_map(k.per_nurse_overtime)},
          {"total_slack_units", k.total_slack_units},
          {"objective", k.objective},
          {"nurse_count", k.nurse_count}};
}

json to_json(const KpiDelta& d) {
  return {{"min_workload", d.min_workload},
          {"max_workload", d.max_workload},
          {"min_weekly_hours", d.min_weekly_hours},
          {"max_weekly_hours", d.max_weekly_hours},
          {"total_overtime_hours", d.total_overtime_hours},
          {"per_nurse_overtime", overtime_map(d.per_nurse_overtime)},
          {"total_slack_units", d.total_slack_units},
          {"objective", d.objective},
          {"nurse_count", d.nurse_count}};
}

json to_json(const UnderstaffingReport& report) {
  json entries = json::array();
  for (const UnderstaffingEntry& e : report.entries) {
    entries.push_back({{"shift", e.shift_id},
                       {"day", e.day},
                       {"slack_units", e.slack_units},
                       {"shortfall_patients", e.shortfall_patients}});
  }
  return {{"entries", entries}, {"total_slack", report.total_slack}};
}

json to_json(const HiringPlan& plan) {
  json iterations = json::array();
  for (const HiringIteration& it : plan.iterations) {
    iterations.push_back({{"nurse_count", it.nurse_count},
                          {"objective", it.objective},
                          {"total_slack", it.total_slack},
                          {"kpis", to_json(it.kpis)}});
  }
  json doc = {{"iterations", iterations},
              {"hires_accepted", plan.hires_accepted},
              {"stop_reason", to_string(plan.stop_reason)},
              {"final_nurse_count", plan.final_instance.num_nurses()}};
  if (!plan.detail.empty()) doc["detail"] = plan.detail;
  if (plan.final_roster) doc["final_roster"] = roster_to_json(plan.final_instance, *plan.final_roster);
  return doc;
}

void export_kpis(const KpiReport& report, const fs::path& destination) {
  write_file_atomic(destination, dump_document(to_json(report)));
}

void export_kpis(const KpiDelta& delta, const fs::path& destination) {
  write_file_atomic(destination, dump_document(to_json(delta)));
}

void export_kpis(const HiringPlan& plan, const fs::path& destination) {
  write_file_atomic(destination, dump_document(to_json(plan)));
}

}  // namespace nrp
