#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "actsched/constraints.hpp"
#include "actsched/documents.hpp"
#include "actsched/schedule.hpp"

namespace actsched {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small file helpers
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read error on '" + path + "'");
  return buf.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write error on '" + path + "'");
}

// ---------------------------------------------------------------------------
// CSV (RFC 4180-ish: quoted fields, embedded commas/newlines, "" escapes)
// ---------------------------------------------------------------------------

inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  const auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
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
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;  // a delimiter implies a following (possibly empty) field
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

// ---------------------------------------------------------------------------
// Profile ingestion
// ---------------------------------------------------------------------------

/// Normalized-alias -> canonical-field pairs. Lookups normalize the incoming
/// header first (lowercase, punctuation runs collapse to '_'), so
/// human-readable headers like "Distance to work (miles)" already resolve
/// without an entry here.
using AliasTable = std::vector<std::pair<std::string, std::string>>;

inline std::string normalize_key(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    const unsigned char uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) {
      out += static_cast<char>(std::tolower(uc));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

inline const std::vector<std::string>& profile_field_names() {
  static const std::vector<std::string> names = {
      "age_range",       "gender",           "race",
      "education",       "employment_status", "work_schedule",
      "occupation",      "primary_activity", "work_from_home",
      "driver_on_travel_day", "distance_to_work_miles", "work_state",
  };
  return names;
}

/// Survey-style column codes plus common label variants.
inline AliasTable default_profile_aliases() {
  return {
      {"r_age", "age_range"},
      {"age", "age_range"},
      {"r_sex", "gender"},
      {"sex", "gender"},
      {"r_race", "race"},
      {"educ", "education"},
      {"wkftpt", "employment_status"},
      {"worker", "employment_status"},
      {"wksched", "work_schedule"},
      {"schedule_type", "work_schedule"},
      {"occat", "occupation"},
      {"prmact", "primary_activity"},
      {"wrk_home", "work_from_home"},
      {"wkrmhm", "work_from_home"},
      {"works_from_home", "work_from_home"},
      {"driver", "driver_on_travel_day"},
      {"disttowk17", "distance_to_work_miles"},
      {"dist_to_work", "distance_to_work_miles"},
      {"commute_miles", "distance_to_work_miles"},
      {"wrkstate", "work_state"},
      {"wkstate", "work_state"},
      {"state", "work_state"},
  };
}

inline AliasTable parse_alias_table_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("alias table is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw IoError("alias table must be a JSON object of alias -> field");
  const auto& fields = profile_field_names();
  AliasTable table;
  for (const auto& [alias, value] : doc.items()) {
    if (!value.is_string()) throw IoError("alias '" + alias + "' must map to a field name string");
    const std::string target = value.get<std::string>();
    if (std::find(fields.begin(), fields.end(), target) == fields.end() && target != "user_id") {
      throw IoError("alias '" + alias + "' maps to unknown field '" + target + "'");
    }
    table.emplace_back(normalize_key(alias), target);
  }
  return table;
}

namespace detail {

/// Canonical field name for a header, or empty if unrecognized.
inline std::string resolve_field(std::string_view header, const AliasTable& aliases) {
  const std::string key = normalize_key(header);
  if (key == "user_id" || key == "person_id" || key == "personid" || key == "uid" || key == "id") {
    return "user_id";
  }
  const auto& fields = profile_field_names();
  if (std::find(fields.begin(), fields.end(), key) != fields.end()) return key;
  for (const auto& [alias, target] : aliases) {
    if (alias == key) return target;
  }
  return {};
}

inline void assign_profile_field(UserProfile& profile, const std::string& field,
                                 const std::string& raw, const std::string& where) {
  std::string value = raw;
  // Trim outer whitespace; blank means "not reported".
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!value.empty() && is_space(static_cast<unsigned char>(value.front()))) value.erase(0, 1);
  while (!value.empty() && is_space(static_cast<unsigned char>(value.back()))) value.pop_back();
  if (field == "distance_to_work_miles") {
    if (value.empty() || value == "unknown") {
      profile.distance_to_work_miles.reset();
      return;
    }
    double miles = 0.0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, miles);
    if (ec != std::errc() || ptr != last) {
      throw IoError(where + ": distance_to_work_miles '" + value + "' is not a number");
    }
    // Survey exports use negative codes for "not ascertained".
    if (miles < 0.0) {
      profile.distance_to_work_miles.reset();
    } else {
      profile.distance_to_work_miles = miles;
    }
    return;
  }
  if (value.empty()) value = "unknown";
  if (field == "age_range") profile.age_range = value;
  else if (field == "gender") profile.gender = value;
  else if (field == "race") profile.race = value;
  else if (field == "education") profile.education = value;
  else if (field == "employment_status") profile.employment_status = value;
  else if (field == "work_schedule") profile.work_schedule = value;
  else if (field == "occupation") profile.occupation = value;
  else if (field == "primary_activity") profile.primary_activity = value;
  else if (field == "work_from_home") profile.work_from_home = value;
  else if (field == "driver_on_travel_day") profile.driver_on_travel_day = value;
  else if (field == "work_state") profile.work_state = value;
  else throw IoError(where + ": unhandled profile field '" + field + "'");
}

inline std::string scalar_to_text(const json& value) {
  if (value.is_null()) return "";
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

}  // namespace detail

struct ProfileRecord {
  std::string user_id;
  UserProfile profile;
};

/// Parses profiles from CSV (header-keyed) or a JSON array of objects,
/// sniffed from the leading non-space character. Missing fields stay
/// "unknown"; a row with no recognized field at all is an error.
inline std::vector<ProfileRecord> profile_records_from_text(const std::string& text,
                                                            const AliasTable& aliases =
                                                                default_profile_aliases()) {
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<ProfileRecord> records;
  if (first == std::string::npos) return records;

  const auto finish_row = [&](UserProfile profile, std::string user_id, int recognized,
                              const std::string& where) {
    if (recognized == 0) throw IoError(where + ": no recognized profile fields");
    ProfileRecord rec;
    rec.profile = std::move(profile);
    if (user_id.empty()) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "u%04zu", records.size() + 1);
      user_id = buf;
    }
    rec.user_id = std::move(user_id);
    records.push_back(std::move(rec));
  };

  if (text[first] == '[' || text[first] == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw IoError(std::string("profile document is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw IoError("profile document must be a JSON array of objects");
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const std::string where = "profile " + std::to_string(i);
      if (!doc[i].is_object()) throw IoError(where + ": expected an object");
      UserProfile profile;
      std::string user_id;
      int recognized = 0;
      for (const auto& [key, value] : doc[i].items()) {
        const std::string field = detail::resolve_field(key, aliases);
        if (field.empty()) continue;
        if (field == "user_id") {
          user_id = detail::scalar_to_text(value);
          continue;
        }
        detail::assign_profile_field(profile, field, detail::scalar_to_text(value), where);
        ++recognized;
      }
      finish_row(std::move(profile), std::move(user_id), recognized, where);
    }
    return records;
  }

  const auto rows = parse_csv(text);
  if (rows.empty()) return records;
  std::vector<std::string> columns;  // canonical field per column; "" = ignored
  columns.reserve(rows[0].size());
  for (const auto& header : rows[0]) columns.push_back(detail::resolve_field(header, aliases));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;  // stray blank line
    const std::string where = "row " + std::to_string(r + 1);
    if (row.size() > columns.size()) {
      throw IoError(where + ": has " + std::to_string(row.size()) + " fields, header has " +
                    std::to_string(columns.size()));
    }
    UserProfile profile;
    std::string user_id;
    int recognized = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (columns[c].empty()) continue;
      if (columns[c] == "user_id") {
        user_id = row[c];
        continue;
      }
      detail::assign_profile_field(profile, columns[c], row[c], where);
      ++recognized;
    }
    finish_row(std::move(profile), std::move(user_id), recognized, where);
  }
  return records;
}

inline std::vector<ProfileRecord> load_profile_records(const std::string& path,
                                                       const AliasTable& aliases =
                                                           default_profile_aliases()) {
  try {
    return profile_records_from_text(read_text_file(path), aliases);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

inline std::vector<UserProfile> load_profiles(const std::string& path,
                                              const AliasTable& aliases =
                                                  default_profile_aliases()) {
  std::vector<UserProfile> profiles;
  for (auto& rec : load_profile_records(path, aliases)) profiles.push_back(std::move(rec.profile));
  return profiles;
}

// ---------------------------------------------------------------------------
// Population persistence (one array document keyed by user_id)
// ---------------------------------------------------------------------------

struct ScheduleRecord {
  std::string user_id;
  DaySchedule schedule;
};

using ScheduleSet = std::vector<ScheduleRecord>;

inline std::string population_json_text(const ScheduleSet& population) {
  if (population.empty()) return "[]\n";
  std::string out = "[\n";
  for (std::size_t i = 0; i < population.size(); ++i) {
    const auto& rec = population[i];
    out += "  {\n    \"user_id\": " + json(rec.user_id).dump() + ",\n    \"schedule\": ";
    out += schedule_json_text(rec.schedule, 4).substr(4);
    out += "\n  }";
    if (i + 1 < population.size()) out += ",";
    out += "\n";
  }
  out += "]\n";
  return out;
}

/// Parses a population document. With `require_hard_valid` every schedule must
/// pass the hard-constraint audit; the error names the offending user_id.
inline ScheduleSet population_from_text(const std::string& text, bool require_hard_valid = true) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("population document is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw IoError("population document must be a JSON array");
  ScheduleSet population;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "entry " + std::to_string(i);
    const auto& item = doc[i];
    if (!item.is_object()) throw IoError(where + ": expected an object");
    if (!item.contains("user_id") || !item["user_id"].is_string()) {
      throw IoError(where + ": missing string key 'user_id'");
    }
    if (!item.contains("schedule")) throw IoError(where + ": missing key 'schedule'");
    for (const auto& [key, value] : item.items()) {
      (void)value;
      if (key != "user_id" && key != "schedule") {
        throw IoError(where + ": unexpected key '" + key + "'");
      }
    }
    ScheduleRecord rec;
    rec.user_id = item["user_id"].get<std::string>();
    if (!seen.insert(rec.user_id).second) {
      throw IoError("duplicate user_id '" + rec.user_id + "'");
    }
    try {
      rec.schedule = schedule_from_json(item["schedule"]);
    } catch (const DocumentError& e) {
      throw IoError("user '" + rec.user_id + "': " + e.what());
    }
    if (require_hard_valid && !is_hard_valid(rec.schedule)) {
      throw IoError("user '" + rec.user_id + "': schedule violates hard constraints");
    }
    population.push_back(std::move(rec));
  }
  return population;
}

inline ScheduleSet load_population(const std::string& path, bool require_hard_valid = true) {
  try {
    return population_from_text(read_text_file(path), require_hard_valid);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

inline void save_population(const std::string& path, const ScheduleSet& population) {
  write_text_file(path, population_json_text(population));
}

// ---------------------------------------------------------------------------
// Roll-out scoring wire format
// ---------------------------------------------------------------------------

struct RolloutRecord {
  std::string prompt_id;
  std::string rollout_text;
  DaySchedule ground_truth;
};

inline RolloutRecord parse_rollout_line(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError(std::string("roll-out record is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw IoError("roll-out record must be a JSON object");
  for (const std::string key : {"prompt_id", "rollout_text", "ground_truth_schedule"}) {
    if (!doc.contains(key)) throw IoError("roll-out record missing key '" + key + "'");
  }
  RolloutRecord rec;
  if (!doc["prompt_id"].is_string()) throw IoError("'prompt_id' must be a string");
  if (!doc["rollout_text"].is_string()) throw IoError("'rollout_text' must be a string");
  rec.prompt_id = doc["prompt_id"].get<std::string>();
  rec.rollout_text = doc["rollout_text"].get<std::string>();
  try {
    rec.ground_truth = schedule_from_json(doc["ground_truth_schedule"]);
  } catch (const DocumentError& e) {
    throw IoError(std::string("'ground_truth_schedule': ") + e.what());
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Run configuration: flags > environment > config file
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string base_url = "http://localhost:8000/v1";
  std::string model_name = "editor";
  std::string api_key;        // settable via environment or key file only
  std::string api_key_file;
  std::string bounds_path;
  std::string rules_path;
  std::string profiles_path;
  std::string output_path;
  std::string provenance_path;
  int max_rounds = 3;
  int concurrency = 1;
  std::uint64_t seed = 0;
};

inline RunConfig parse_run_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw IoError("config must be a JSON object");
  RunConfig cfg;
  const auto as_string = [&](const json& v, const char* key) {
    if (!v.is_string()) throw IoError(std::string("config key '") + key + "' must be a string");
    return v.get<std::string>();
  };
  const auto as_int = [&](const json& v, const char* key) {
    if (!v.is_number_integer()) {
      throw IoError(std::string("config key '") + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "base_url") cfg.base_url = as_string(value, "base_url");
    else if (key == "model_name") cfg.model_name = as_string(value, "model_name");
    else if (key == "api_key_file") cfg.api_key_file = as_string(value, "api_key_file");
    else if (key == "bounds_path") cfg.bounds_path = as_string(value, "bounds_path");
    else if (key == "rules_path") cfg.rules_path = as_string(value, "rules_path");
    else if (key == "profiles_path") cfg.profiles_path = as_string(value, "profiles_path");
    else if (key == "output_path") cfg.output_path = as_string(value, "output_path");
    else if (key == "provenance_path") cfg.provenance_path = as_string(value, "provenance_path");
    else if (key == "max_rounds") cfg.max_rounds = static_cast<int>(as_int(value, "max_rounds"));
    else if (key == "concurrency") cfg.concurrency = static_cast<int>(as_int(value, "concurrency"));
    else if (key == "seed") {
      const auto s = as_int(value, "seed");
      if (s < 0) throw IoError("config key 'seed' must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "api_key") {
      // Forbidden on purpose: a key in a config file is one `cat` away from a
      // pasted shell command. Same policy as the flag parser.
      throw IoError("config key 'api_key' is not accepted; use the environment or a key file");
    } else {
      throw IoError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

/// Environment overrides (applied on top of a config file, below flags).
inline void apply_environment(RunConfig& cfg) {
  if (const char* v = std::getenv("ACTSCHED_BASE_URL")) cfg.base_url = v;
  if (const char* v = std::getenv("ACTSCHED_MODEL")) cfg.model_name = v;
  if (const char* v = std::getenv("ACTSCHED_API_KEY")) cfg.api_key = v;
  if (const char* v = std::getenv("ACTSCHED_API_KEY_FILE")) cfg.api_key_file = v;
}

/// Resolves the key file (if any) and checks invariants. Call after all
/// precedence layers are applied.
inline void finalize_run_config(RunConfig& cfg) {
  if (cfg.api_key.empty() && !cfg.api_key_file.empty()) {
    std::string key = read_text_file(cfg.api_key_file);
    while (!key.empty() && (key.back() == '\n' || key.back() == '\r')) key.pop_back();
    cfg.api_key = key;
  }
  if (cfg.max_rounds < 1) throw IoError("max_rounds must be at least 1");
  if (cfg.concurrency < 1) throw IoError("concurrency must be at least 1");
  if (cfg.base_url.empty()) throw IoError("base_url must not be empty");
}

}  // namespace actsched
