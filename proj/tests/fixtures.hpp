#pragma once

// Shared hand-built fixtures: one worked day from a survey-style persona,
// its flawed first draft, the edited result, and the observed ground truth.

#include "actsched/schedule.hpp"

namespace fixtures {

using namespace actsched;

inline ActivitySegment seg(const char* activity, const char* start, const char* end) {
  return ActivitySegment(parse_activity(activity), parse_time(start), parse_time(end));
}

inline UserProfile case_profile() {
  UserProfile p;
  p.gender = "Female";
  p.employment_status = "employed full-time";
  p.occupation = "professional/managerial/technical";
  p.primary_activity = "working";
  p.work_from_home = "No";
  p.driver_on_travel_day = "Yes";
  p.distance_to_work_miles = 4.15;
  p.work_state = "California";
  return p;
}

/// Flawed first draft: the evening work block overlaps the home stay.
inline DaySchedule case_draft() {
  return DaySchedule{{
      seg("home", "00:00", "07:45"),
      seg("work", "07:45", "16:45"),
      seg("home", "16:45", "18:00"),
      seg("work", "17:45", "19:00"),
      seg("shopping", "19:00", "19:35"),
      seg("home", "19:35", "24:00"),
  }};
}

/// The refined day after editing: overlap resolved, errand moved before the
/// evening work block.
inline DaySchedule case_edited() {
  return DaySchedule{{
      seg("home", "00:00", "07:45"),
      seg("work", "07:45", "16:30"),
      seg("shopping", "16:30", "17:20"),
      seg("work", "17:20", "19:50"),
      seg("home", "19:50", "24:00"),
  }};
}

/// The observed day for the same persona.
inline DaySchedule case_truth() {
  return DaySchedule{{
      seg("home", "00:00", "07:45"),
      seg("work", "07:45", "16:30"),
      seg("shopping", "16:30", "17:30"),
      seg("service", "17:30", "17:45"),
      seg("work", "17:45", "20:30"),
      seg("home", "20:30", "24:00"),
  }};
}

inline DaySchedule all_day(const char* activity) {
  return DaySchedule{{seg(activity, "00:00", "24:00")}};
}

}  // namespace fixtures
