#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "actsched/constraints.hpp"
#include "actsched/documents.hpp"
#include "actsched/edit.hpp"
#include "actsched/endpoint.hpp"
#include "actsched/prompts.hpp"
#include "actsched/schedule.hpp"
#include "actsched/tagged_text.hpp"

namespace actsched {

/// What the intention-driven agent hands over: free-text reasoning plus the
/// skeleton schedule.
struct Draft {
  std::string reasoning;
  DaySchedule schedule;
};

namespace detail {

/// First balanced {...} or [...] region, honoring strings and escapes.
inline std::optional<std::string> first_json_region(const std::string& text) {
  const std::size_t at = text.find_first_of("{[");
  if (at == std::string::npos) return std::nullopt;
  const char open = text[at];
  const char close = open == '{' ? '}' : ']';
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = at; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == open) {
      ++depth;
    } else if (c == close) {
      if (--depth == 0) return text.substr(at, i - at + 1);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Accepts the canonical {"reasoning", "schedule"} object, a bare schedule
/// array, or either of those wrapped in prose or [JSON] tags. Absence of a
/// usable schedule yields nullopt, never an exception.
inline std::optional<Draft> parse_intention_output(const std::string& raw) {
  const auto try_value = [](const json& doc) -> std::optional<Draft> {
    if (doc.is_array()) {
      try {
        return Draft{"", schedule_from_json(doc)};
      } catch (const DocumentError&) {
        return std::nullopt;
      }
    }
    if (doc.is_object() && doc.contains("schedule")) {
      try {
        Draft d{"", schedule_from_json(doc["schedule"])};
        if (doc.contains("reasoning") && doc["reasoning"].is_string()) {
          d.reasoning = doc["reasoning"].get<std::string>();
        }
        return d;
      } catch (const DocumentError&) {
        return std::nullopt;
      }
    }
    return std::nullopt;
  };

  for (const std::string& candidate : {raw, [&] {
         const TaggedOutput tagged = parse_tagged_output(raw);
         return tagged.json_block.value_or(std::string());
       }(),
                                       detail::first_json_region(raw).value_or(std::string())}) {
    if (candidate.empty()) continue;
    try {
      const auto draft = try_value(json::parse(candidate));
      if (draft && !draft->schedule.empty()) return draft;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// The generate-then-edit loop.
// ---------------------------------------------------------------------------

struct ProvenanceRound {
  int round = 0;            // 0 = intention stage; 1.. = editor rounds
  std::string stage;        // "intention" | "editor" | "repair"
  std::string raw_output;   // what the model said (or repair's result document)
  std::vector<Violation> violations;
  bool fallback_used = false;
};

struct GenerationResult {
  DaySchedule schedule;
  std::vector<ProvenanceRound> log;
  bool fallback_used = false;
  int editor_rounds = 0;
};

inline json provenance_round_to_json(const ProvenanceRound& r) {
  json doc;
  doc["round"] = r.round;
  doc["stage"] = r.stage;
  doc["raw_output"] = r.raw_output;
  doc["violations"] = json::array();
  for (const Violation& v : r.violations) doc["violations"].push_back(violation_to_json(v));
  doc["fallback_used"] = r.fallback_used;
  return doc;
}

struct TrajectoryOptions {
  int max_rounds = 3;
  int intention_attempts = 2;  // re-asks before the all-home default kicks in
  std::vector<CommonsenseRule> rules = default_commonsense_rules();
  CoherenceConfig coherence{};
};

inline DaySchedule all_home_default() {
  return DaySchedule{{ActivitySegment(ActivityType::Home, TimeOfDay(0), TimeOfDay(kMinutesPerDay))}};
}

/// Draft, then audit-and-reprompt the editor until hard-clean or out of
/// rounds; deterministic repair guarantees the result is hard-valid either
/// way. Endpoint errors propagate — unusable *content* does not.
inline GenerationResult generate_trajectory(const UserProfile& profile, ChatClient& client,
                                            const DurationBounds& bounds,
                                            const TrajectoryOptions& options = {}) {
  if (options.max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
  GenerationResult result;

  // Stage 1: intention-driven draft.
  const PromptPair intention = render_intention_prompt(profile);
  Draft draft{"", {}};
  bool draft_parsed = false;
  for (int attempt = 0; attempt < std::max(1, options.intention_attempts); ++attempt) {
    const std::string raw = client.complete(intention.system_text, intention.user_text);
    const auto parsed = parse_intention_output(raw);
    ProvenanceRound record{0, "intention", raw, {}, false};
    if (parsed) {
      draft = *parsed;
      draft_parsed = true;
      result.log.push_back(std::move(record));
      break;
    }
    record.violations.push_back(Violation{
        ConstraintCategory::Physical, {}, "intention output did not contain a parseable schedule"});
    result.log.push_back(std::move(record));
  }
  if (!draft_parsed) {
    draft.schedule = all_home_default();
    result.log.push_back(ProvenanceRound{0, "intention",
                                         "(fallback) default all-home draft substituted", {}, true});
  }

  // Stage 2: editor rounds.
  const PromptPair editor = render_editor_prompt(profile, draft.schedule);
  std::optional<DaySchedule> best_candidate;
  std::vector<Violation> feedback;
  for (int round = 1; round <= options.max_rounds; ++round) {
    std::string user = editor.user_text;
    if (!feedback.empty()) user += "\n\n" + violation_feedback(feedback);
    const std::string raw = client.complete(editor.system_text, user);
    const TaggedOutput out = parse_tagged_output(raw);
    ProvenanceRound record{round, "editor", raw, {}, false};
    result.editor_rounds = round;

    if (out.schedule && !out.schedule->empty()) {
      best_candidate = out.schedule;
      record.violations =
          audit(profile, *out.schedule, bounds, options.rules, options.coherence);
      const bool hard_clean =
          std::none_of(record.violations.begin(), record.violations.end(), [](const Violation& v) {
            return hardness_of(v.category) == Hardness::Hard;
          });
      feedback = record.violations;
      result.log.push_back(std::move(record));
      if (hard_clean) {
        result.schedule = normalize(*out.schedule);
        return result;
      }
    } else {
      record.violations.push_back(Violation{
          ConstraintCategory::Physical, {}, "editor output did not contain a parseable schedule"});
      feedback = record.violations;
      result.log.push_back(std::move(record));
    }
  }

  // Stage 3: deterministic repair of the best thing we saw.
  result.schedule = repair(best_candidate ? *best_candidate : draft.schedule);
  result.fallback_used = true;
  result.log.push_back(ProvenanceRound{options.max_rounds + 1, "repair",
                                       schedule_json_text(result.schedule), {}, true});
  return result;
}

inline GenerationResult generate_trajectory(const UserProfile& profile,
                                            const ChatEndpoint& endpoint,
                                            const DurationBounds& bounds, int max_rounds = 3) {
  HttpChatClient client(endpoint);
  TrajectoryOptions options;
  options.max_rounds = max_rounds;
  return generate_trajectory(profile, client, bounds, options);
}

// ---------------------------------------------------------------------------
// Teacher-driven SFT example synthesis.
// ---------------------------------------------------------------------------

struct SftExample {
  std::string system_text;     // student system prompt
  std::string user_text;       // PERSON PROFILE + INITIAL SCHEDULE
  std::string assistant_text;  // [THOUGHT]...[/THOUGHT]\n\n[JSON]...[/JSON]
  bool teacher_verbatim = false;
};

inline json sft_example_to_json(const SftExample& ex) {
  json doc;
  doc["messages"] = json::array();
  doc["messages"].push_back({{"role", "system"}, {"content", ex.system_text}});
  doc["messages"].push_back({{"role", "user"}, {"content", ex.user_text}});
  doc["messages"].push_back({{"role", "assistant"}, {"content", ex.assistant_text}});
  return doc;
}

/// Deterministic stand-in for a teacher trace: audit verdicts on the draft,
/// the diff script in the teacher template's operation notation, and the
/// ground truth. Used whenever the live teacher fails to match.
inline std::string build_teacher_thought(const UserProfile& profile, const DaySchedule& draft,
                                         const DaySchedule& ground_truth,
                                         const DurationBounds& bounds) {
  const DaySchedule norm_draft = normalize(draft);
  const auto yes_no = [](bool clean) { return clean ? "Yes" : "No"; };
  std::string thought = "Constraint Checking:\n";
  thought += "1. Physical (Hard): overlaps? 24h coverage? ends at 24:00? -> ";
  thought += yes_no(check_physical(norm_draft).empty());
  thought += "\n2. Logical (Hard): starts/ends home? starts at 00:00? -> ";
  thought += yes_no(check_logical(norm_draft).empty());
  thought += "\n3. Common Sense (Soft): activities match profile? -> ";
  thought += yes_no(check_commonsense(profile, norm_draft).empty());
  thought += "\n4. Temporal (Soft): realistic durations? -> ";
  thought += yes_no(check_temporal(norm_draft, bounds).empty());
  thought += "\n5. Coherence (Soft): logical flow? not fragmented? -> ";
  thought += yes_no(check_coherence(norm_draft).empty());
  thought += "\n\nEdits to Match Ground Truth:\n";

  const EditScript script = diff(norm_draft, ground_truth);
  if (script.empty()) {
    thought += "No edits needed\n";
  } else {
    for (const EditOp& op : script.ops) {
      if (const auto* del = std::get_if<DeleteOp>(&op.action)) {
        thought += "- DELETE: at idx " + std::to_string(del->index) + " (" + op.rationale + ")\n";
      } else if (const auto* add = std::get_if<AddOp>(&op.action)) {
        thought += "- ADD: '" + std::string(activity_label(add->segment.activity)) + "' at time " +
                   format_time(add->segment.start) + " (" + op.rationale + ")\n";
      } else if (const auto* shift = std::get_if<ShiftOp>(&op.action)) {
        thought += "- SHIFT: idx " + std::to_string(shift->index) + " to " +
                   format_time(shift->new_start) + "-" + format_time(shift->new_end) + " (" +
                   op.rationale + ")\n";
      } else if (const auto* repl = std::get_if<ReplaceOp>(&op.action)) {
        thought += "- REPLACE: idx " + std::to_string(repl->index) + " -> '" +
                   std::string(activity_label(repl->new_activity)) + "' (" + op.rationale + ")\n";
      } else if (const auto* split = std::get_if<SplitOp>(&op.action)) {
        thought += "- SPLIT: idx " + std::to_string(split->index) + " at " +
                   format_time(split->split_time) + " (" + op.rationale + ")\n";
      }
    }
  }
  thought += "\nFinal Result:\nAll constraints satisfied after edits? Yes";
  return thought;
}

struct SftOptions {
  bool deterministic_fallback_on_endpoint_failure = true;
  DurationBounds bounds = DurationBounds::defaults();
};

/// Asks the teacher for the reverse-engineered trace; keeps it verbatim when
/// its [JSON] schedule is slot-identical to the ground truth, otherwise
/// rebuilds the assistant message deterministically so every emitted label
/// is exact.
inline SftExample synthesize_sft_example(const UserProfile& profile, const DaySchedule& draft,
                                         const DaySchedule& ground_truth, ChatClient& client,
                                         const SftOptions& options = {}) {
  if (!is_hard_valid(ground_truth)) {
    throw std::invalid_argument("SFT synthesis requires a hard-valid ground truth");
  }
  const DaySchedule truth = normalize(ground_truth);
  const PromptPair teacher = render_teacher_prompt(profile, draft, truth);
  const PromptPair student = render_student_prompt(profile, draft);

  SftExample ex;
  ex.system_text = student.system_text;
  ex.user_text = student.user_text;

  std::optional<std::string> teacher_raw;
  try {
    teacher_raw = client.complete(teacher.system_text, teacher.user_text);
  } catch (const EndpointError&) {
    if (!options.deterministic_fallback_on_endpoint_failure) throw;
  }

  if (teacher_raw) {
    const TaggedOutput out = parse_tagged_output(*teacher_raw);
    if (out.schedule && out.has_thought_block() && is_hard_valid(*out.schedule) &&
        discretize(normalize(*out.schedule)) == discretize(truth)) {
      ex.assistant_text = *teacher_raw;
      ex.teacher_verbatim = true;
      return ex;
    }
  }

  ex.assistant_text = compose_tagged_output(
      build_teacher_thought(profile, draft, truth, options.bounds), truth);
  ex.teacher_verbatim = false;
  return ex;
}

}  // namespace actsched
