#pragma once

// Seeded random schedule builders for property tests.

#include <random>
#include <set>
#include <vector>

#include "actsched/metrics.hpp"
#include "actsched/schedule.hpp"

namespace testgen {

using namespace actsched;

/// Random schedule satisfying every hard constraint: home-bounded, contiguous
/// over the full day, no adjacent duplicates. Cut points land on arbitrary
/// minutes, not just slot boundaries.
inline DaySchedule random_hard_valid(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count_dist(1, 12);
  int n = count_dist(rng);
  if (n == 2) n = 3;  // two segments cannot be home-bounded without touching duplicates
  if (n == 1) {
    return DaySchedule{{ActivitySegment(ActivityType::Home, TimeOfDay(0), TimeOfDay(kMinutesPerDay))}};
  }
  std::set<int> cuts;
  std::uniform_int_distribution<int> minute_dist(1, kMinutesPerDay - 1);
  while (static_cast<int>(cuts.size()) < n - 1) cuts.insert(minute_dist(rng));
  std::vector<int> bounds{0};
  bounds.insert(bounds.end(), cuts.begin(), cuts.end());
  bounds.push_back(kMinutesPerDay);

  std::uniform_int_distribution<int> nonhome_dist(1, kActivityTypeCount - 1);
  DaySchedule day;
  int previous = 0;  // home
  for (int i = 0; i < n; ++i) {
    int label;
    if (i == 0 || i == n - 1) {
      label = 0;
    } else {
      do {
        label = nonhome_dist(rng);
      } while (label == previous);
    }
    day.segments.push_back(ActivitySegment(static_cast<ActivityType>(label),
                                           TimeOfDay(bounds[static_cast<std::size_t>(i)]),
                                           TimeOfDay(bounds[static_cast<std::size_t>(i) + 1])));
    previous = label;
  }
  return day;
}

/// Random mess: arbitrary segment order, overlaps, gaps, wrong boundaries,
/// adjacent duplicates. Only the per-segment invariant (start < end) holds.
inline DaySchedule random_malformed(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count_dist(1, 15);
  std::uniform_int_distribution<int> start_dist(0, kMinutesPerDay - 1);
  std::uniform_int_distribution<int> len_dist(1, 600);
  std::uniform_int_distribution<int> act_dist(0, kActivityTypeCount - 1);
  const int n = count_dist(rng);
  DaySchedule day;
  for (int i = 0; i < n; ++i) {
    const int start = start_dist(rng);
    const int end = std::min(kMinutesPerDay, start + len_dist(rng));
    day.segments.push_back(ActivitySegment(static_cast<ActivityType>(act_dist(rng)),
                                           TimeOfDay(start), TimeOfDay(std::max(end, start + 1))));
  }
  return day;
}

/// Paired populations with shared user ids, for metric cross-checks.
inline std::pair<Population, Population> random_population_pair(std::mt19937_64& rng,
                                                                int max_users = 8) {
  std::uniform_int_distribution<int> size_dist(1, max_users);
  const int n = size_dist(rng);
  Population gen, ref;
  for (int i = 0; i < n; ++i) {
    const std::string id = "user" + std::to_string(i);
    gen.add(id, discretize(random_hard_valid(rng)));
    ref.add(id, discretize(random_hard_valid(rng)));
  }
  return {gen, ref};
}

}  // namespace testgen
