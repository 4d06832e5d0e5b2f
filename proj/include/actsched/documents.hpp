#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "actsched/constraints.hpp"
#include "actsched/edit.hpp"
#include "actsched/schedule.hpp"

namespace actsched {

struct DocumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Schedule documents. The wire shape is an array of one-line objects:
//   {"activity": "home", "start_time": "00:00", "end_time": "07:30"}
// and every emitter in the project sticks to it, byte for byte.
// ---------------------------------------------------------------------------

inline std::string segment_json_text(const ActivitySegment& seg) {
  std::string out = "{\"activity\": \"";
  out += activity_label(seg.activity);
  out += "\", \"start_time\": \"";
  out += format_time(seg.start);
  out += "\", \"end_time\": \"";
  out += format_time(seg.end);
  out += "\"}";
  return out;
}

/// `indent` shifts the whole block right (for embedding in larger documents).
inline std::string schedule_json_text(const DaySchedule& schedule, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (schedule.empty()) return pad + "[]";
  std::string out = pad + "[\n";
  for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
    out += pad + "  " + segment_json_text(schedule.segments[i]);
    if (i + 1 < schedule.segments.size()) out += ",";
    out += "\n";
  }
  out += pad + "]";
  return out;
}

inline DaySchedule schedule_from_json(const json& doc) {
  if (!doc.is_array()) throw DocumentError("schedule document must be a JSON array");
  DaySchedule schedule;
  schedule.segments.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "segment " + std::to_string(i);
    if (!item.is_object()) throw DocumentError(where + ": expected an object");
    for (const char* key : {"activity", "start_time", "end_time"}) {
      if (!item.contains(key) || !item[key].is_string()) {
        throw DocumentError(where + ": missing or non-string key '" + key + "'");
      }
    }
    try {
      schedule.segments.push_back(
          ActivitySegment(parse_activity(item["activity"].get<std::string>()),
                          parse_time(item["start_time"].get<std::string>()),
                          parse_time(item["end_time"].get<std::string>())));
    } catch (const std::exception& e) {
      throw DocumentError(where + ": " + e.what());
    }
  }
  return schedule;
}

inline DaySchedule parse_schedule_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw DocumentError(std::string("schedule document is not valid JSON: ") + e.what());
  }
  return schedule_from_json(doc);
}

// ---------------------------------------------------------------------------
// Profile documents: flat object, the twelve keys, "unknown" sentinels.
// ---------------------------------------------------------------------------

inline json profile_to_json(const UserProfile& p) {
  json doc;
  doc["age_range"] = p.age_range;
  doc["gender"] = p.gender;
  doc["race"] = p.race;
  doc["education"] = p.education;
  doc["employment_status"] = p.employment_status;
  doc["work_schedule"] = p.work_schedule;
  doc["occupation"] = p.occupation;
  doc["primary_activity"] = p.primary_activity;
  doc["work_from_home"] = p.work_from_home;
  doc["driver_on_travel_day"] = p.driver_on_travel_day;
  if (p.distance_to_work_miles.has_value()) {
    doc["distance_to_work_miles"] = *p.distance_to_work_miles;
  } else {
    doc["distance_to_work_miles"] = "unknown";
  }
  doc["work_state"] = p.work_state;
  return doc;
}

inline std::string profile_json_text(const UserProfile& p) { return profile_to_json(p).dump(2); }

inline UserProfile profile_from_json(const json& doc) {
  if (!doc.is_object()) throw DocumentError("profile document must be a JSON object");
  UserProfile p;
  const auto text_field = [&](const char* key, std::string& field) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_string()) throw DocumentError(std::string("profile key '") + key + "' must be text");
    field = doc[key].get<std::string>();
    if (field.empty()) field = "unknown";
  };
  text_field("age_range", p.age_range);
  text_field("gender", p.gender);
  text_field("race", p.race);
  text_field("education", p.education);
  text_field("employment_status", p.employment_status);
  text_field("work_schedule", p.work_schedule);
  text_field("occupation", p.occupation);
  text_field("primary_activity", p.primary_activity);
  text_field("work_from_home", p.work_from_home);
  text_field("driver_on_travel_day", p.driver_on_travel_day);
  text_field("work_state", p.work_state);
  if (doc.contains("distance_to_work_miles")) {
    const auto& v = doc["distance_to_work_miles"];
    if (v.is_number()) {
      const double miles = v.get<double>();
      if (miles < 0) throw DocumentError("distance_to_work_miles must be non-negative");
      p.distance_to_work_miles = miles;
    } else if (!(v.is_string() && v.get<std::string>() == "unknown") && !v.is_null()) {
      throw DocumentError("distance_to_work_miles must be a number or \"unknown\"");
    }
  }
  return p;
}

inline UserProfile parse_profile_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw DocumentError(std::string("profile document is not valid JSON: ") + e.what());
  }
  return profile_from_json(doc);
}

// ---------------------------------------------------------------------------
// Violation reports.
// ---------------------------------------------------------------------------

inline json violation_to_json(const Violation& v) {
  json doc;
  doc["category"] = std::string(category_label(v.category));
  doc["hardness"] = std::string(hardness_label(hardness_of(v.category)));
  doc["segment_indices"] = v.segment_indices;
  doc["description"] = v.description;
  return doc;
}

inline std::string violations_json_text(const std::vector<Violation>& violations) {
  if (violations.empty()) return "[]";
  std::string out = "[\n";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    out += "  " + violation_to_json(violations[i]).dump();
    if (i + 1 < violations.size()) out += ",";
    out += "\n";
  }
  out += "]";
  return out;
}

/// One human-readable line, e.g.
///   [Hard] Physical: overlap between ... (segments 2, 3)
inline std::string violation_line(const Violation& v) {
  std::string out = "[";
  out += hardness_label(hardness_of(v.category));
  out += "] ";
  out += category_label(v.category);
  out += ": ";
  out += v.description;
  if (!v.segment_indices.empty()) {
    out += " (segment";
    if (v.segment_indices.size() > 1) out += "s";
    out += " ";
    for (std::size_t i = 0; i < v.segment_indices.size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(v.segment_indices[i]);
    }
    out += ")";
  }
  return out;
}

/// The re-prompt payload appended to the editor's user message.
inline std::string violation_feedback(const std::vector<Violation>& violations) {
  return "VIOLATIONS DETECTED:\n" + violations_json_text(violations);
}

// ---------------------------------------------------------------------------
// Edit scripts: array of {op, index, params..., rationale}.
// ---------------------------------------------------------------------------

inline json edit_op_to_json(const EditOp& op) {
  json doc;
  doc["op"] = std::string(op_name(op.action));
  doc["index"] = op_index(op.action);
  if (const auto* add = std::get_if<AddOp>(&op.action)) {
    doc["activity"] = std::string(activity_label(add->segment.activity));
    doc["start_time"] = format_time(add->segment.start);
    doc["end_time"] = format_time(add->segment.end);
  } else if (const auto* shift = std::get_if<ShiftOp>(&op.action)) {
    doc["new_start"] = format_time(shift->new_start);
    doc["new_end"] = format_time(shift->new_end);
  } else if (const auto* repl = std::get_if<ReplaceOp>(&op.action)) {
    doc["new_activity"] = std::string(activity_label(repl->new_activity));
  } else if (const auto* split = std::get_if<SplitOp>(&op.action)) {
    doc["split_time"] = format_time(split->split_time);
    doc["second_activity"] = std::string(activity_label(split->second_activity));
  }
  doc["rationale"] = op.rationale;
  return doc;
}

inline json edit_script_to_json(const EditScript& script) {
  json doc = json::array();
  for (const EditOp& op : script.ops) doc.push_back(edit_op_to_json(op));
  return doc;
}

inline std::string edit_script_json_text(const EditScript& script) {
  if (script.empty()) return "[]";
  std::string out = "[\n";
  for (std::size_t i = 0; i < script.ops.size(); ++i) {
    out += "  " + edit_op_to_json(script.ops[i]).dump();
    if (i + 1 < script.ops.size()) out += ",";
    out += "\n";
  }
  out += "]";
  return out;
}

inline EditOp edit_op_from_json(const json& doc) {
  if (!doc.is_object()) throw DocumentError("edit op must be an object");
  const auto need = [&](const char* key) -> const json& {
    if (!doc.contains(key)) throw DocumentError(std::string("edit op missing key '") + key + "'");
    return doc[key];
  };
  std::string op;
  std::optional<EditAction> action;
  std::string rationale;
  try {
    op = need("op").get<std::string>();
    const int index = need("index").get<int>();
    rationale = doc.value("rationale", std::string());
    if (op == "add") {
      action = AddOp{index, ActivitySegment(parse_activity(need("activity").get<std::string>()),
                                            parse_time(need("start_time").get<std::string>()),
                                            parse_time(need("end_time").get<std::string>()))};
    } else if (op == "delete") {
      action = DeleteOp{index};
    } else if (op == "shift") {
      action = ShiftOp{index, parse_time(need("new_start").get<std::string>()),
                       parse_time(need("new_end").get<std::string>())};
    } else if (op == "replace") {
      action = ReplaceOp{index, parse_activity(need("new_activity").get<std::string>())};
    } else if (op == "split") {
      action = SplitOp{index, parse_time(need("split_time").get<std::string>()),
                       parse_activity(need("second_activity").get<std::string>())};
    } else {
      throw DocumentError("unknown edit op '" + op + "'");
    }
  } catch (const DocumentError&) {
    throw;
  } catch (const std::exception& e) {
    throw DocumentError("edit op '" + op + "': " + e.what());
  }
  return EditOp{*action, std::move(rationale)};
}

inline EditScript parse_edit_script_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw DocumentError(std::string("edit script is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw DocumentError("edit script must be a JSON array");
  EditScript script;
  for (const auto& item : doc) script.ops.push_back(edit_op_from_json(item));
  return script;
}

// ---------------------------------------------------------------------------
// Configurable tables: duration bounds and commonsense rules.
// ---------------------------------------------------------------------------

/// {"work": {"min_minutes": 30, "max_minutes": 960}, ...} — listed activities
/// override the defaults; unknown keys are rejected.
inline DurationBounds parse_duration_bounds_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw DocumentError(std::string("duration bounds document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DocumentError("duration bounds document must be a JSON object");
  DurationBounds bounds = DurationBounds::defaults();
  for (const auto& [key, value] : doc.items()) {
    const auto activity = try_parse_activity(key);
    if (!activity) throw DocumentError("duration bounds: unknown activity '" + key + "'");
    if (!value.is_object() || !value.contains("min_minutes") || !value.contains("max_minutes")) {
      throw DocumentError("duration bounds for '" + key +
                          "' must be {\"min_minutes\": ..., \"max_minutes\": ...}");
    }
    for (const auto& [k2, _] : value.items()) {
      if (k2 != "min_minutes" && k2 != "max_minutes") {
        throw DocumentError("duration bounds for '" + key + "': unknown key '" + k2 + "'");
      }
    }
    if (!value["min_minutes"].is_number_integer() || !value["max_minutes"].is_number_integer()) {
      throw DocumentError("duration bounds for '" + key + "' must be whole minutes");
    }
    bounds.min_minutes[activity_index(*activity)] = value["min_minutes"].get<int>();
    bounds.max_minutes[activity_index(*activity)] = value["max_minutes"].get<int>();
  }
  try {
    bounds.validate();
  } catch (const std::invalid_argument& e) {
    throw DocumentError(e.what());
  }
  return bounds;
}

inline std::vector<CommonsenseRule> parse_commonsense_rules_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw DocumentError(std::string("commonsense rules document is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw DocumentError("commonsense rules document must be a JSON array");
  std::vector<CommonsenseRule> rules;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "rule " + std::to_string(i);
    if (!item.is_object()) throw DocumentError(where + ": expected an object");
    CommonsenseRule rule;
    for (const auto& [key, value] : item.items()) {
      if (key == "fields") {
        rule.fields = value.get<std::vector<std::string>>();
      } else if (key == "patterns") {
        rule.patterns = value.get<std::vector<std::string>>();
      } else if (key == "fire_when_matched") {
        rule.fire_when_matched = value.get<bool>();
      } else if (key == "activity") {
        rule.activity = parse_activity(value.get<std::string>());
      } else if (key == "min_episode_minutes") {
        rule.min_episode_minutes = value.get<int>();
      } else if (key == "informational") {
        rule.informational = value.get<bool>();
      } else if (key == "message") {
        rule.message = value.get<std::string>();
      } else {
        throw DocumentError(where + ": unknown key '" + key + "'");
      }
    }
    if (rule.fields.empty() || rule.message.empty()) {
      throw DocumentError(where + ": 'fields' and 'message' are required");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace actsched
