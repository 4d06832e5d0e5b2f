#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "actsched/documents.hpp"
#include "actsched/schedule.hpp"

namespace actsched {

/// Parse result for [THOUGHT]/[JSON]-tagged model output. `json_block` is the
/// raw inner text of the first well-formed [JSON] block; `schedule` is set
/// only when that text also parses — the distinction feeds the format reward
/// (block present) vs. everything downstream (schedule usable).
struct TaggedOutput {
  std::optional<std::string> thought;
  std::optional<std::string> json_block;
  std::optional<DaySchedule> schedule;
  std::string raw;

  bool has_thought_block() const { return thought.has_value(); }
  bool has_json_block() const { return json_block.has_value(); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\n' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\n' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::optional<std::string> extract_block(std::string_view text, std::string_view open,
                                                std::string_view close) {
  const std::size_t at = text.find(open);
  if (at == std::string_view::npos) return std::nullopt;
  const std::size_t body = at + open.size();
  const std::size_t end = text.find(close, body);
  if (end == std::string_view::npos) return std::nullopt;
  return trim(text.substr(body, end - body));
}

}  // namespace detail

/// Total function: malformed or missing blocks become absent fields, never
/// exceptions. Content outside the blocks is ignored.
inline TaggedOutput parse_tagged_output(const std::string& raw) {
  TaggedOutput out;
  out.raw = raw;
  out.thought = detail::extract_block(raw, "[THOUGHT]", "[/THOUGHT]");
  out.json_block = detail::extract_block(raw, "[JSON]", "[/JSON]");
  if (out.json_block) {
    try {
      out.schedule = parse_schedule_json(*out.json_block);
    } catch (const DocumentError&) {
      // A [JSON] block whose body is an object carrying a "schedule" array is
      // accepted too; observed drift in otherwise well-formed outputs.
      try {
        const json doc = json::parse(*out.json_block);
        if (doc.is_object() && doc.contains("schedule")) {
          out.schedule = schedule_from_json(doc["schedule"]);
        }
      } catch (const std::exception&) {
      }
    }
  }
  return out;
}

/// Canonical assistant-message layout shared by the teacher rebuild, the mock
/// endpoint, and the SFT wire format.
inline std::string compose_tagged_output(const std::string& thought, const DaySchedule& schedule) {
  return "[THOUGHT]\n" + thought + "\n[/THOUGHT]\n\n[JSON]\n" + schedule_json_text(schedule) +
         "\n[/JSON]";
}

}  // namespace actsched
