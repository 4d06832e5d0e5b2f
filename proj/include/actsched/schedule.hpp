#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace actsched {

// ---------------------------------------------------------------------------
// Activity vocabulary
// ---------------------------------------------------------------------------

enum class ActivityType : std::uint8_t {
  Home,
  Work,
  Education,
  Shopping,
  Service,
  Medical,
  DineOut,
  Socialize,
  Exercise,
  DropoffPickup,
};

inline constexpr int kActivityTypeCount = 10;

inline constexpr std::array<std::string_view, kActivityTypeCount> kActivityLabels = {
    "home",      "work",     "education", "shopping", "service",
    "medical",   "dine_out", "socialize", "exercise", "dropoff_pickup",
};

constexpr std::size_t activity_index(ActivityType a) {
  return static_cast<std::size_t>(a);
}

constexpr std::string_view activity_label(ActivityType a) {
  return kActivityLabels[activity_index(a)];
}

inline std::optional<ActivityType> try_parse_activity(std::string_view label) {
  for (std::size_t i = 0; i < kActivityLabels.size(); ++i) {
    if (kActivityLabels[i] == label) return static_cast<ActivityType>(i);
  }
  return std::nullopt;
}

// The vocabulary is closed; any other label is an error.
inline ActivityType parse_activity(std::string_view label) {
  if (auto a = try_parse_activity(label)) return *a;
  throw std::invalid_argument("unknown activity type '" + std::string(label) + "'");
}

// ---------------------------------------------------------------------------
// Time of day
// ---------------------------------------------------------------------------

inline constexpr int kMinutesPerDay = 1440;

/// Minutes since midnight in [0, 1440]; 1440 encodes "24:00".
class TimeOfDay {
 public:
  constexpr TimeOfDay() = default;

  explicit constexpr TimeOfDay(int minutes) : minutes_(minutes) {
    if (minutes < 0 || minutes > kMinutesPerDay) {
      throw std::invalid_argument("time of day out of range: " + std::to_string(minutes) + " min");
    }
  }

  constexpr int minutes() const { return minutes_; }

  friend constexpr auto operator<=>(TimeOfDay, TimeOfDay) = default;

 private:
  int minutes_ = 0;
};

/// Parses "H:MM" or "HH:MM"; "24:00" is the only value past 23:59.
inline TimeOfDay parse_time(std::string_view text) {
  const auto fail = [&]() -> TimeOfDay {
    throw std::invalid_argument("invalid time of day '" + std::string(text) + "'");
  };
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return fail();
  const std::string_view hh = text.substr(0, colon);
  const std::string_view mm = text.substr(colon + 1);
  if (hh.empty() || hh.size() > 2 || mm.size() != 2) return fail();
  const auto all_digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!all_digits(hh) || !all_digits(mm)) return fail();
  int hour = 0;
  int minute = 0;
  std::from_chars(hh.data(), hh.data() + hh.size(), hour);
  std::from_chars(mm.data(), mm.data() + mm.size(), minute);
  if (hour > 24 || minute > 59) return fail();
  if (hour == 24 && minute != 0) return fail();
  return TimeOfDay(hour * 60 + minute);
}

/// Formats as zero-padded "HH:MM"; the inverse of parse_time over [0, 1440].
inline std::string format_time(TimeOfDay t) {
  char buf[6];
  const int h = t.minutes() / 60;
  const int m = t.minutes() % 60;
  buf[0] = static_cast<char>('0' + h / 10);
  buf[1] = static_cast<char>('0' + h % 10);
  buf[2] = ':';
  buf[3] = static_cast<char>('0' + m / 10);
  buf[4] = static_cast<char>('0' + m % 10);
  buf[5] = '\0';
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Segments and schedules
// ---------------------------------------------------------------------------

/// One typed, timed activity; duration is always strictly positive.
struct ActivitySegment {
  ActivitySegment(ActivityType activity_, TimeOfDay start_, TimeOfDay end_)
      : activity(activity_), start(start_), end(end_) {
    if (start >= end) {
      throw std::invalid_argument("segment start " + format_time(start) +
                                  " must precede end " + format_time(end));
    }
  }

  int duration_minutes() const { return end.minutes() - start.minutes(); }

  friend bool operator==(const ActivitySegment&, const ActivitySegment&) = default;

  ActivityType activity;
  TimeOfDay start;
  TimeOfDay end;
};

/// An ordered activity chain over one 24-hour day.
struct DaySchedule {
  std::vector<ActivitySegment> segments;

  bool empty() const { return segments.empty(); }
  std::size_t size() const { return segments.size(); }

  friend bool operator==(const DaySchedule&, const DaySchedule&) = default;
};

/// Sorts by start time and merges touching runs of the same activity.
/// Overlaps and gaps are left in place for the constraint checks to report.
inline DaySchedule normalize(const DaySchedule& schedule) {
  if (schedule.empty()) throw std::invalid_argument("cannot normalize an empty schedule");
  std::vector<ActivitySegment> segs = schedule.segments;
  std::stable_sort(segs.begin(), segs.end(), [](const ActivitySegment& a, const ActivitySegment& b) {
    return a.start < b.start;
  });
  std::vector<ActivitySegment> out;
  out.reserve(segs.size());
  for (const ActivitySegment& seg : segs) {
    if (!out.empty() && out.back().activity == seg.activity && out.back().end == seg.start) {
      out.back() = ActivitySegment(seg.activity, out.back().start, seg.end);
    } else {
      out.push_back(seg);
    }
  }
  return DaySchedule{std::move(out)};
}

/// True when segments are sorted, contiguous, and span 00:00-24:00.
inline bool covers_full_day(const DaySchedule& schedule) {
  if (schedule.empty()) return false;
  if (schedule.segments.front().start.minutes() != 0) return false;
  if (schedule.segments.back().end.minutes() != kMinutesPerDay) return false;
  for (std::size_t i = 0; i + 1 < schedule.segments.size(); ++i) {
    if (schedule.segments[i].end != schedule.segments[i + 1].start) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 96-slot discretization
// ---------------------------------------------------------------------------

inline constexpr int kSlotCount = 96;
inline constexpr int kSlotMinutes = 15;

/// A day as 96 fifteen-minute slots; slot t covers minutes [15t, 15t+15).
struct SlotSequence {
  std::array<ActivityType, kSlotCount> slots{};

  friend bool operator==(const SlotSequence&, const SlotSequence&) = default;
};

/// Labels each slot with the activity holding the most minutes inside it.
/// Ties go to the activity of the earlier-starting segment.
inline SlotSequence discretize(const DaySchedule& schedule) {
  if (!covers_full_day(schedule)) {
    throw std::invalid_argument("schedule must cover 00:00-24:00 contiguously to discretize");
  }
  const auto& segs = schedule.segments;
  SlotSequence out;
  std::size_t cursor = 0;
  for (int t = 0; t < kSlotCount; ++t) {
    const int lo = t * kSlotMinutes;
    const int hi = lo + kSlotMinutes;
    while (cursor < segs.size() && segs[cursor].end.minutes() <= lo) ++cursor;

    std::array<int, kActivityTypeCount> overlap{};
    std::array<int, kActivityTypeCount> seen_rank;
    seen_rank.fill(-1);
    int next_rank = 0;
    for (std::size_t k = cursor; k < segs.size() && segs[k].start.minutes() < hi; ++k) {
      const int ov = std::min(segs[k].end.minutes(), hi) - std::max(segs[k].start.minutes(), lo);
      if (ov <= 0) continue;
      const std::size_t idx = activity_index(segs[k].activity);
      if (seen_rank[idx] < 0) seen_rank[idx] = next_rank++;
      overlap[idx] += ov;
    }

    int best = -1;
    for (int idx = 0; idx < kActivityTypeCount; ++idx) {
      if (seen_rank[idx] < 0) continue;
      if (best < 0 || overlap[idx] > overlap[best] ||
          (overlap[idx] == overlap[best] && seen_rank[idx] < seen_rank[best])) {
        best = idx;
      }
    }
    out.slots[static_cast<std::size_t>(t)] = static_cast<ActivityType>(best);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Episodes (maximal runs)
// ---------------------------------------------------------------------------

/// A maximal run of one activity in a slot sequence.
struct Episode {
  ActivityType activity;
  int start_slot;
  int length_slots;

  friend bool operator==(const Episode&, const Episode&) = default;
};

/// Run-length encodes the sequence; lengths always sum to 96.
inline std::vector<Episode> episodes(const SlotSequence& seq) {
  std::vector<Episode> out;
  int run_start = 0;
  for (int t = 1; t <= kSlotCount; ++t) {
    if (t == kSlotCount || seq.slots[static_cast<std::size_t>(t)] !=
                               seq.slots[static_cast<std::size_t>(run_start)]) {
      out.push_back(Episode{seq.slots[static_cast<std::size_t>(run_start)], run_start, t - run_start});
      run_start = t;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// User profile
// ---------------------------------------------------------------------------

/// The 12 socio-demographic attributes that seed generation. Absent survey
/// values carry the sentinel text "unknown".
struct UserProfile {
  std::string age_range = "unknown";
  std::string gender = "unknown";
  std::string race = "unknown";
  std::string education = "unknown";
  std::string employment_status = "unknown";
  std::string work_schedule = "unknown";
  std::string occupation = "unknown";
  std::string primary_activity = "unknown";
  std::string work_from_home = "unknown";
  std::string driver_on_travel_day = "unknown";
  std::optional<double> distance_to_work_miles;  // non-negative when present
  std::string work_state = "unknown";

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

/// Shortest round-trip decimal text for the commute distance, or "unknown".
inline std::string distance_text(const UserProfile& profile) {
  if (!profile.distance_to_work_miles) return "unknown";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), *profile.distance_to_work_miles);
  return std::string(buf, res.ptr);
}

}  // namespace actsched
