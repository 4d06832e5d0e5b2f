#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "actsched/documents.hpp"
#include "actsched/edit.hpp"
#include "actsched/endpoint.hpp"
#include "actsched/orchestrator.hpp"
#include "actsched/schedule.hpp"
#include "actsched/tagged_text.hpp"

namespace actsched {

namespace detail {

inline std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::optional<DaySchedule> schedule_after_marker(const std::string& text,
                                                        std::string_view marker) {
  const std::size_t at = text.find(marker);
  if (at == std::string::npos) return std::nullopt;
  const auto region = first_json_region(text.substr(at + marker.size()));
  if (!region) return std::nullopt;
  try {
    return parse_schedule_json(*region);
  } catch (const DocumentError&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Offline stand-in for a chat endpoint. Deterministic: the reply is a pure
/// function of (seed, system text, user text). Across varied inputs it mixes
/// well-formed, structurally flawed, and junk responses so the full fallback
/// chain gets exercised; it never needs a network.
class MockChatClient : public ChatClient {
 public:
  explicit MockChatClient(std::uint64_t seed = 0) : seed_(seed) {}

  std::string complete(const std::string& system_text, const std::string& user_text) override {
    if (system_text.rfind("You are a daily schedule planner", 0) == 0) {
      return intention_reply(user_text);
    }
    if (system_text.rfind("You are an Editor Agent", 0) == 0) {
      return editor_reply(user_text);
    }
    if (system_text.rfind("You are a schedule planning expert", 0) == 0) {
      return teacher_reply(user_text);
    }
    return "I can only help with daily schedules.";
  }

 private:
  static DaySchedule worker_day(std::uint64_t h) {
    const int wake = 330 + static_cast<int>(h % 16) * 15;               // 05:30..09:15
    const int work_len = 420 + static_cast<int>((h >> 8) % 8) * 15;     // 7h..8h45
    const int work_end = wake + 15 + work_len;
    DaySchedule day;
    day.segments.push_back(ActivitySegment(ActivityType::Home, TimeOfDay(0), TimeOfDay(wake)));
    day.segments.push_back(
        ActivitySegment(ActivityType::Work, TimeOfDay(wake), TimeOfDay(work_end)));
    if ((h >> 16) % 3 == 0 && work_end + 45 < kMinutesPerDay - 60) {
      day.segments.push_back(ActivitySegment(ActivityType::Shopping, TimeOfDay(work_end),
                                             TimeOfDay(work_end + 45)));
      day.segments.push_back(ActivitySegment(ActivityType::Home, TimeOfDay(work_end + 45),
                                             TimeOfDay(kMinutesPerDay)));
    } else {
      day.segments.push_back(
          ActivitySegment(ActivityType::Home, TimeOfDay(work_end), TimeOfDay(kMinutesPerDay)));
    }
    return day;
  }

  static DaySchedule flawed_day(std::uint64_t h) {
    DaySchedule day = worker_day(h >> 4);
    switch (h % 3) {
      case 0: {  // overlap: pull the closing home segment forward
        ActivitySegment& last = day.segments.back();
        last = ActivitySegment(last.activity, TimeOfDay(last.start.minutes() - 60), last.end);
        break;
      }
      case 1: {  // gap: push the closing home segment back
        ActivitySegment& last = day.segments.back();
        last = ActivitySegment(last.activity, TimeOfDay(last.start.minutes() + 40), last.end);
        break;
      }
      default: {  // late start: the day no longer begins at 00:00
        ActivitySegment& first = day.segments.front();
        first = ActivitySegment(first.activity, TimeOfDay(30), first.end);
        break;
      }
    }
    return day;
  }

  std::string intention_reply(const std::string& user_text) const {
    const std::uint64_t h = detail::fnv1a(user_text, seed_);
    switch (h % 5) {
      case 0:
        return "Sorry, I'd rather chat about the weather today.";
      case 1:  // key-less drift: bare schedule array
        return schedule_json_text(worker_day(h));
      case 2: {  // well-formed envelope around a structurally broken draft
        return "{\n  \"reasoning\": \"Busy day, roughly sketched.\",\n  \"schedule\": " +
               schedule_json_text(flawed_day(h), 2).substr(2) + "\n}";
      }
      default:
        return "{\n  \"reasoning\": \"Standard commute pattern for this profile.\",\n  \"schedule\": " +
               schedule_json_text(worker_day(h), 2).substr(2) + "\n}";
    }
  }

  std::string editor_reply(const std::string& user_text) const {
    const std::uint64_t h = detail::fnv1a(user_text, seed_ * 0x9e3779b97f4a7c15ull + 1);
    const auto draft = detail::schedule_after_marker(user_text, "INITIAL SCHEDULE");
    switch (h % 4) {
      case 0:
        return "Everything looks fine to me!";
      case 1:
        return "[THOUGHT]\nConstraint Checking: skipped.\n[/THOUGHT]\n\n[JSON]\nnot json at all\n[/JSON]";
      case 2:
        if (draft) {
          return compose_tagged_output(
              "Constraint Checking:\nNo blocking issues spotted on this pass.\n\nEdit Operations "
              "Applied:\n- none\n\nFinal Result: All constraints satisfied",
              *draft);
        }
        return "I could not read the schedule.";
      default:
        if (draft) {
          return compose_tagged_output(
              "Constraint Checking:\nFound structural problems; resolving overlaps and gaps.\n\n"
              "Edit Operations Applied:\n- SHIFT: boundary adjustments to restore continuity\n\n"
              "Final Result: All constraints satisfied",
              repair(*draft));
        }
        return "I could not read the schedule.";
    }
  }

  std::string teacher_reply(const std::string& user_text) const {
    const std::uint64_t h = detail::fnv1a(user_text, seed_ * 0xd6e8feb86659fd93ull + 2);
    const auto truth =
        detail::schedule_after_marker(user_text, "GROUND TRUTH REFERENCE (for comparison):");
    switch (h % 3) {
      case 0:
        return "As a teacher, I believe schedules are a social construct.";
      case 1: {  // near miss: one segment's activity swapped
        if (!truth || truth->segments.size() < 2) return "No schedule found.";
        DaySchedule off = *truth;
        auto& seg = off.segments[off.segments.size() / 2];
        const ActivityType swap = seg.activity == ActivityType::DineOut ? ActivityType::Shopping
                                                                        : ActivityType::DineOut;
        seg = ActivitySegment(swap, seg.start, seg.end);
        return compose_tagged_output(
            "Constraint Checking:\n1. Physical (Hard): overlaps? 24h coverage? ends at 24:00? -> "
            "Yes\n\nEdits to Match Ground Truth:\n- REPLACE: adjusted one stop\n\nFinal Result:\n"
            "All constraints satisfied after edits? Yes",
            off);
      }
      default:
        if (!truth) return "No schedule found.";
        return compose_tagged_output(
            "Constraint Checking:\n1. Physical (Hard): overlaps? 24h coverage? ends at 24:00? -> "
            "Yes\n2. Logical (Hard): starts/ends home? starts at 00:00? -> Yes\n3. Common Sense "
            "(Soft): activities match profile? -> Yes\n4. Temporal (Soft): realistic durations? -> "
            "Yes\n5. Coherence (Soft): logical flow? not fragmented? -> Yes\n\nEdits to Match "
            "Ground Truth:\nNo edits needed\n\nFinal Result:\nAll constraints satisfied after "
            "edits? Yes",
            *truth);
    }
  }

  std::uint64_t seed_;
};

}  // namespace actsched
