#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "actsched/schedule.hpp"

namespace actsched {

// ---------------------------------------------------------------------------
// Categories
// ---------------------------------------------------------------------------

enum class ConstraintCategory : std::uint8_t {
  Physical,
  Logical,
  Commonsense,
  Temporal,
  Coherence,
};

enum class Hardness : std::uint8_t { Hard, Soft };

// Physical and Logical are structurally mandatory; the rest are heuristics.
constexpr Hardness hardness_of(ConstraintCategory c) {
  return (c == ConstraintCategory::Physical || c == ConstraintCategory::Logical) ? Hardness::Hard
                                                                                 : Hardness::Soft;
}

constexpr std::string_view category_label(ConstraintCategory c) {
  switch (c) {
    case ConstraintCategory::Physical: return "Physical";
    case ConstraintCategory::Logical: return "Logical";
    case ConstraintCategory::Commonsense: return "Commonsense";
    case ConstraintCategory::Temporal: return "Temporal";
    case ConstraintCategory::Coherence: return "Coherence";
  }
  return "?";
}

constexpr std::string_view hardness_label(Hardness h) {
  return h == Hardness::Hard ? "Hard" : "Soft";
}

inline std::optional<ConstraintCategory> try_parse_category(std::string_view label) {
  for (auto c : {ConstraintCategory::Physical, ConstraintCategory::Logical,
                 ConstraintCategory::Commonsense, ConstraintCategory::Temporal,
                 ConstraintCategory::Coherence}) {
    if (category_label(c) == label) return c;
  }
  return std::nullopt;
}

/// One audited finding. An empty index list means the finding applies to the
/// schedule as a whole.
struct Violation {
  ConstraintCategory category;
  std::vector<int> segment_indices;
  std::string description;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// ---------------------------------------------------------------------------
// Configurable tables
// ---------------------------------------------------------------------------

/// Per-activity plausible duration range in minutes. Ships as data; the
/// defaults are deployment defaults, not ground truth.
struct DurationBounds {
  std::array<int, kActivityTypeCount> min_minutes{};
  std::array<int, kActivityTypeCount> max_minutes{};

  static DurationBounds defaults() {
    DurationBounds b;
    const auto set = [&](ActivityType a, int lo, int hi) {
      b.min_minutes[activity_index(a)] = lo;
      b.max_minutes[activity_index(a)] = hi;
    };
    set(ActivityType::Home, 15, 1440);
    set(ActivityType::Work, 30, 960);
    set(ActivityType::Education, 30, 720);
    set(ActivityType::Shopping, 5, 240);
    set(ActivityType::Service, 5, 240);
    set(ActivityType::Medical, 10, 480);
    set(ActivityType::DineOut, 10, 240);
    set(ActivityType::Socialize, 10, 480);
    set(ActivityType::Exercise, 10, 300);
    set(ActivityType::DropoffPickup, 5, 60);
    return b;
  }

  void validate() const {
    for (int i = 0; i < kActivityTypeCount; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      if (min_minutes[idx] <= 0 || min_minutes[idx] > max_minutes[idx] ||
          max_minutes[idx] > kMinutesPerDay) {
        throw std::invalid_argument("duration bounds for '" +
                                    std::string(kActivityLabels[idx]) +
                                    "' must satisfy 0 < min <= max <= 1440");
      }
    }
  }

  bool within(const ActivitySegment& seg) const {
    const std::size_t idx = activity_index(seg.activity);
    const int d = seg.duration_minutes();
    return d >= min_minutes[idx] && d <= max_minutes[idx];
  }
};

/// Declarative profile-consistency rule: fires on segments of `activity`
/// lasting at least `min_episode_minutes` when the pattern condition holds
/// on the named profile fields.
struct CommonsenseRule {
  std::vector<std::string> fields;    // profile field names to inspect
  std::vector<std::string> patterns;  // case-insensitive substrings
  bool fire_when_matched = true;      // false: fire when no pattern matches
  ActivityType activity = ActivityType::Work;
  int min_episode_minutes = 0;  // 0 = any duration
  bool informational = false;
  std::string message;
};

namespace detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string_view profile_field(const UserProfile& p, std::string_view name,
                                      std::string& distance_scratch) {
  if (name == "age_range") return p.age_range;
  if (name == "gender") return p.gender;
  if (name == "race") return p.race;
  if (name == "education") return p.education;
  if (name == "employment_status") return p.employment_status;
  if (name == "work_schedule") return p.work_schedule;
  if (name == "occupation") return p.occupation;
  if (name == "primary_activity") return p.primary_activity;
  if (name == "work_from_home") return p.work_from_home;
  if (name == "driver_on_travel_day") return p.driver_on_travel_day;
  if (name == "work_state") return p.work_state;
  if (name == "distance_to_work_miles") {
    distance_scratch = distance_text(p);
    return distance_scratch;
  }
  throw std::invalid_argument("unknown profile field '" + std::string(name) + "'");
}

inline std::string describe(const ActivitySegment& seg) {
  return std::string(activity_label(seg.activity)) + " " + format_time(seg.start) + "-" +
         format_time(seg.end);
}

}  // namespace detail

inline std::vector<CommonsenseRule> default_commonsense_rules() {
  std::vector<CommonsenseRule> rules;
  rules.push_back(CommonsenseRule{
      {"primary_activity", "employment_status"},
      {"retired", "unemployed"},
      true,
      ActivityType::Work,
      120,
      false,
      "prolonged work scheduled for a profile indicating retired/unemployed",
  });
  rules.push_back(CommonsenseRule{
      {"work_from_home"},
      {"yes", "true"},
      true,
      ActivityType::Work,
      0,
      true,
      "note: work scheduled although the profile works from home",
  });
  rules.push_back(CommonsenseRule{
      {"employment_status", "primary_activity", "occupation"},
      {"student"},
      false,
      ActivityType::Education,
      120,
      false,
      "prolonged education scheduled for a profile with no student indication",
  });
  return rules;
}

/// Knobs for the fragmentation check.
struct CoherenceConfig {
  int episode_cap = 12;
  int min_detour_minutes = 15;  // A->B->A with B shorter than this is flagged
};

// ---------------------------------------------------------------------------
// The five checks. All expect a normalized schedule except where noted.
// ---------------------------------------------------------------------------

/// Overlaps, gaps, and day-boundary coverage.
inline std::vector<Violation> check_physical(const DaySchedule& schedule) {
  std::vector<Violation> out;
  const auto& segs = schedule.segments;
  if (segs.empty()) return out;

  if (segs.front().start.minutes() != 0) {
    out.push_back(Violation{ConstraintCategory::Physical,
                            {0},
                            "first segment starts at " + format_time(segs.front().start) +
                                ", not 00:00"});
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      if (segs[j].start < segs[i].end && segs[i].start < segs[j].end) {
        out.push_back(Violation{ConstraintCategory::Physical,
                                {static_cast<int>(i), static_cast<int>(j)},
                                "overlap between segment " + std::to_string(i) + " (" +
                                    detail::describe(segs[i]) + ") and segment " +
                                    std::to_string(j) + " (" + detail::describe(segs[j]) + ")"});
      }
    }
  }
  int covered_until = segs.front().end.minutes();
  for (std::size_t i = 1; i < segs.size(); ++i) {
    if (segs[i].start.minutes() > covered_until) {
      out.push_back(Violation{
          ConstraintCategory::Physical,
          {static_cast<int>(i - 1), static_cast<int>(i)},
          "gap " + format_time(TimeOfDay(covered_until)) + "-" + format_time(segs[i].start) +
              " between segment " + std::to_string(i - 1) + " and segment " + std::to_string(i)});
    }
    covered_until = std::max(covered_until, segs[i].end.minutes());
  }
  if (segs.back().end.minutes() != kMinutesPerDay) {
    out.push_back(Violation{ConstraintCategory::Physical,
                            {static_cast<int>(segs.size() - 1)},
                            "last segment ends at " + format_time(segs.back().end) +
                                ", not 24:00"});
  }
  return out;
}

/// Home boundaries and the no-adjacent-duplicates mandate.
inline std::vector<Violation> check_logical(const DaySchedule& schedule) {
  std::vector<Violation> out;
  const auto& segs = schedule.segments;
  if (segs.empty()) return out;

  if (segs.front().activity != ActivityType::Home) {
    out.push_back(Violation{ConstraintCategory::Logical,
                            {0},
                            "day starts with " + std::string(activity_label(segs.front().activity)) +
                                ", not home"});
  }
  if (segs.back().activity != ActivityType::Home) {
    out.push_back(Violation{ConstraintCategory::Logical,
                            {static_cast<int>(segs.size() - 1)},
                            "day ends with " + std::string(activity_label(segs.back().activity)) +
                                ", not home"});
  }
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    if (segs[i].activity == segs[i + 1].activity) {
      out.push_back(Violation{ConstraintCategory::Logical,
                              {static_cast<int>(i), static_cast<int>(i + 1)},
                              "consecutive segments " + std::to_string(i) + " and " +
                                  std::to_string(i + 1) + " are both " +
                                  std::string(activity_label(segs[i].activity)) +
                                  " and must be merged"});
    }
  }
  return out;
}

/// Profile-consistency rules (table-driven).
inline std::vector<Violation> check_commonsense(
    const UserProfile& profile, const DaySchedule& schedule,
    const std::vector<CommonsenseRule>& rules = default_commonsense_rules()) {
  std::vector<Violation> out;
  for (const CommonsenseRule& rule : rules) {
    bool matched = false;
    std::string scratch;
    for (const std::string& field : rule.fields) {
      const std::string value = detail::to_lower(detail::profile_field(profile, field, scratch));
      for (const std::string& pattern : rule.patterns) {
        if (value.find(detail::to_lower(pattern)) != std::string::npos) {
          matched = true;
          break;
        }
      }
      if (matched) break;
    }
    if (matched != rule.fire_when_matched) continue;
    for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
      const ActivitySegment& seg = schedule.segments[i];
      if (seg.activity != rule.activity) continue;
      if (seg.duration_minutes() < rule.min_episode_minutes) continue;
      out.push_back(Violation{ConstraintCategory::Commonsense,
                              {static_cast<int>(i)},
                              rule.message + " (" + detail::describe(seg) + ")"});
    }
  }
  return out;
}

/// Duration realism against the bounds table; boundaries are inclusive.
inline std::vector<Violation> check_temporal(const DaySchedule& schedule,
                                             const DurationBounds& bounds) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
    const ActivitySegment& seg = schedule.segments[i];
    if (bounds.within(seg)) continue;
    const std::size_t idx = activity_index(seg.activity);
    out.push_back(Violation{ConstraintCategory::Temporal,
                            {static_cast<int>(i)},
                            detail::describe(seg) + " lasts " +
                                std::to_string(seg.duration_minutes()) + " min, outside [" +
                                std::to_string(bounds.min_minutes[idx]) + ", " +
                                std::to_string(bounds.max_minutes[idx]) + "]"});
  }
  return out;
}

/// Fragmentation: an episode-count cap and short A->B->A detours.
inline std::vector<Violation> check_coherence(const DaySchedule& schedule,
                                              const CoherenceConfig& config = {}) {
  std::vector<Violation> out;
  const auto& segs = schedule.segments;
  if (static_cast<int>(segs.size()) > config.episode_cap) {
    out.push_back(Violation{ConstraintCategory::Coherence,
                            {},
                            "schedule has " + std::to_string(segs.size()) +
                                " episodes, above the cap of " +
                                std::to_string(config.episode_cap)});
  }
  for (std::size_t i = 1; i + 1 < segs.size(); ++i) {
    if (segs[i - 1].activity == segs[i + 1].activity &&
        segs[i].duration_minutes() < config.min_detour_minutes) {
      out.push_back(Violation{
          ConstraintCategory::Coherence,
          {static_cast<int>(i - 1), static_cast<int>(i), static_cast<int>(i + 1)},
          "short detour " + std::string(activity_label(segs[i - 1].activity)) + " -> " +
              std::string(activity_label(segs[i].activity)) + " (" +
              std::to_string(segs[i].duration_minutes()) + " min) -> " +
              std::string(activity_label(segs[i + 1].activity))});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Combined audit
// ---------------------------------------------------------------------------

/// Runs all five checks on the normalized schedule, hard categories first.
/// Deterministic: identical inputs give identical reports.
inline std::vector<Violation> audit(
    const UserProfile& profile, const DaySchedule& schedule, const DurationBounds& bounds,
    const std::vector<CommonsenseRule>& rules = default_commonsense_rules(),
    const CoherenceConfig& coherence = {}) {
  const DaySchedule norm = normalize(schedule);
  std::vector<Violation> out = check_physical(norm);
  for (auto& v : check_logical(norm)) out.push_back(std::move(v));
  for (auto& v : check_commonsense(profile, norm, rules)) out.push_back(std::move(v));
  for (auto& v : check_temporal(norm, bounds)) out.push_back(std::move(v));
  for (auto& v : check_coherence(norm, coherence)) out.push_back(std::move(v));
  return out;
}

/// True iff the normalized schedule carries no hard violation.
inline bool is_hard_valid(const DaySchedule& schedule) {
  if (schedule.empty()) return false;
  const DaySchedule norm = normalize(schedule);
  return check_physical(norm).empty() && check_logical(norm).empty();
}

}  // namespace actsched
