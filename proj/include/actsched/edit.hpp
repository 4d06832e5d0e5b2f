#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "actsched/schedule.hpp"

namespace actsched {

// ---------------------------------------------------------------------------
// Action space: Add, Delete, Shift, Replace, Split
// ---------------------------------------------------------------------------

struct AddOp {
  int index = 0;  // insertion position, 0..size
  ActivitySegment segment;
};

struct DeleteOp {
  int index = 0;
};

struct ShiftOp {
  int index = 0;
  TimeOfDay new_start;
  TimeOfDay new_end;
};

struct ReplaceOp {
  int index = 0;
  ActivityType new_activity = ActivityType::Home;
};

struct SplitOp {
  int index = 0;
  TimeOfDay split_time;  // strictly inside the segment
  ActivityType second_activity = ActivityType::Home;
};

using EditAction = std::variant<AddOp, DeleteOp, ShiftOp, ReplaceOp, SplitOp>;

struct EditOp {
  EditAction action;
  std::string rationale;
};

struct EditScript {
  std::vector<EditOp> ops;

  bool empty() const { return ops.empty(); }
  std::size_t size() const { return ops.size(); }
};

constexpr std::string_view op_name(const EditAction& action) {
  switch (action.index()) {
    case 0: return "add";
    case 1: return "delete";
    case 2: return "shift";
    case 3: return "replace";
    case 4: return "split";
  }
  return "?";
}

inline int op_index(const EditAction& action) {
  return std::visit([](const auto& op) { return op.index; }, action);
}

/// Raised by apply_script; carries the position of the offending op.
struct EditError : std::runtime_error {
  std::size_t op_position;
  EditError(std::size_t pos, const std::string& what)
      : std::runtime_error("edit op at position " + std::to_string(pos) + ": " + what),
        op_position(pos) {}
};

// ---------------------------------------------------------------------------
// Application. Purely local: no sorting or merging happens here.
// ---------------------------------------------------------------------------

inline DaySchedule apply_op(const DaySchedule& schedule, const EditOp& op) {
  DaySchedule out = schedule;
  auto& segs = out.segments;
  const auto size = static_cast<int>(segs.size());
  const auto check_index = [&](int idx, int limit) {
    if (idx < 0 || idx >= limit) {
      throw std::out_of_range("index " + std::to_string(idx) + " out of range for " +
                              std::to_string(size) + " segments");
    }
  };

  if (const auto* add = std::get_if<AddOp>(&op.action)) {
    check_index(add->index, size + 1);
    segs.insert(segs.begin() + add->index, add->segment);
  } else if (const auto* del = std::get_if<DeleteOp>(&op.action)) {
    check_index(del->index, size);
    segs.erase(segs.begin() + del->index);
  } else if (const auto* shift = std::get_if<ShiftOp>(&op.action)) {
    check_index(shift->index, size);
    if (!(shift->new_start < shift->new_end)) {
      throw std::invalid_argument("shift would leave " +
                                  std::string(activity_label(segs[static_cast<std::size_t>(shift->index)].activity)) +
                                  " with non-positive duration");
    }
    auto& seg = segs[static_cast<std::size_t>(shift->index)];
    seg = ActivitySegment(seg.activity, shift->new_start, shift->new_end);
  } else if (const auto* repl = std::get_if<ReplaceOp>(&op.action)) {
    check_index(repl->index, size);
    auto& seg = segs[static_cast<std::size_t>(repl->index)];
    seg = ActivitySegment(repl->new_activity, seg.start, seg.end);
  } else if (const auto* split = std::get_if<SplitOp>(&op.action)) {
    check_index(split->index, size);
    const ActivitySegment seg = segs[static_cast<std::size_t>(split->index)];
    if (!(seg.start < split->split_time && split->split_time < seg.end)) {
      throw std::invalid_argument("split time " + format_time(split->split_time) +
                                  " is not strictly inside " + format_time(seg.start) + "-" +
                                  format_time(seg.end));
    }
    segs[static_cast<std::size_t>(split->index)] =
        ActivitySegment(seg.activity, seg.start, split->split_time);
    segs.insert(segs.begin() + split->index + 1,
                ActivitySegment(split->second_activity, split->split_time, seg.end));
  }
  return out;
}

inline DaySchedule apply_script(const DaySchedule& schedule, const EditScript& script) {
  DaySchedule current = schedule;
  for (std::size_t k = 0; k < script.ops.size(); ++k) {
    try {
      current = apply_op(current, script.ops[k]);
    } catch (const std::exception& e) {
      throw EditError(k, e.what());
    }
  }
  return current;
}

// ---------------------------------------------------------------------------
// diff: reverse-engineer a script turning source into target.
// ---------------------------------------------------------------------------

namespace detail {

inline int interval_overlap(const ActivitySegment& a, const ActivitySegment& b) {
  return std::max(0, std::min(a.end.minutes(), b.end.minutes()) -
                         std::max(a.start.minutes(), b.start.minutes()));
}

inline std::string segment_text(const ActivitySegment& seg) {
  return std::string(activity_label(seg.activity)) + " " + format_time(seg.start) + "-" +
         format_time(seg.end);
}

struct Match {
  int source_index;
  int target_index;
};

/// Largest subset of matches (given sorted by source index) whose target
/// indices are strictly increasing. Classic quadratic LIS; inputs are tiny.
inline std::vector<Match> monotone_subset(const std::vector<Match>& matches) {
  const std::size_t n = matches.size();
  if (n == 0) return {};
  std::vector<std::size_t> best_len(n, 1);
  std::vector<std::ptrdiff_t> prev(n, -1);
  std::size_t best_end = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (matches[j].target_index < matches[i].target_index && best_len[j] + 1 > best_len[i]) {
        best_len[i] = best_len[j] + 1;
        prev[i] = static_cast<std::ptrdiff_t>(j);
      }
    }
    if (best_len[i] > best_len[best_end]) best_end = i;
  }
  std::vector<Match> kept;
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(best_end); i >= 0;
       i = prev[static_cast<std::size_t>(i)]) {
    kept.push_back(matches[static_cast<std::size_t>(i)]);
  }
  std::reverse(kept.begin(), kept.end());
  return kept;
}

}  // namespace detail

/// Produces a script whose replay on `source` yields `target` exactly.
/// Alignment is greedy: same-activity pairs by descending interval overlap,
/// leftovers zipped chronologically per activity, then thinned to a monotone
/// subset so the shifted survivors land in target order. Replay is verified;
/// on any surprise the delete-all/add-all fallback is returned instead.
/// Emits Delete (descending index), Shift, Add (ascending time); a Replace
/// slot exists in the canonical ordering but same-activity alignment never
/// needs one.
inline EditScript diff(const DaySchedule& source_in, const DaySchedule& target_in) {
  const DaySchedule source = source_in.empty() ? source_in : normalize(source_in);
  const DaySchedule target = target_in.empty() ? target_in : normalize(target_in);
  const auto& src = source.segments;
  const auto& tgt = target.segments;

  // Greedy max-overlap matching among same-activity pairs.
  struct Candidate {
    int overlap;
    int i;
    int j;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < static_cast<int>(src.size()); ++i) {
    for (int j = 0; j < static_cast<int>(tgt.size()); ++j) {
      const auto iu = static_cast<std::size_t>(i);
      const auto ju = static_cast<std::size_t>(j);
      if (src[iu].activity != tgt[ju].activity) continue;
      const int ov = detail::interval_overlap(src[iu], tgt[ju]);
      if (ov > 0) candidates.push_back({ov, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<char> src_used(src.size(), 0), tgt_used(tgt.size(), 0);
  std::vector<detail::Match> matches;
  for (const Candidate& c : candidates) {
    if (src_used[static_cast<std::size_t>(c.i)] || tgt_used[static_cast<std::size_t>(c.j)]) continue;
    src_used[static_cast<std::size_t>(c.i)] = 1;
    tgt_used[static_cast<std::size_t>(c.j)] = 1;
    matches.push_back({c.i, c.j});
  }

  // Zip leftover same-activity segments chronologically: a Shift can move a
  // segment anywhere, so pairing beats a Delete+Add.
  for (int a = 0; a < kActivityTypeCount; ++a) {
    std::vector<int> free_src, free_tgt;
    for (int i = 0; i < static_cast<int>(src.size()); ++i) {
      if (!src_used[static_cast<std::size_t>(i)] &&
          activity_index(src[static_cast<std::size_t>(i)].activity) == static_cast<std::size_t>(a)) {
        free_src.push_back(i);
      }
    }
    for (int j = 0; j < static_cast<int>(tgt.size()); ++j) {
      if (!tgt_used[static_cast<std::size_t>(j)] &&
          activity_index(tgt[static_cast<std::size_t>(j)].activity) == static_cast<std::size_t>(a)) {
        free_tgt.push_back(j);
      }
    }
    for (std::size_t k = 0; k < std::min(free_src.size(), free_tgt.size()); ++k) {
      src_used[static_cast<std::size_t>(free_src[k])] = 1;
      tgt_used[static_cast<std::size_t>(free_tgt[k])] = 1;
      matches.push_back({free_src[k], free_tgt[k]});
    }
  }

  std::sort(matches.begin(), matches.end(), [](const detail::Match& a, const detail::Match& b) {
    return a.source_index < b.source_index;
  });
  const std::vector<detail::Match> kept = detail::monotone_subset(matches);
  std::vector<char> src_kept(src.size(), 0), tgt_kept(tgt.size(), 0);
  for (const detail::Match& m : kept) {
    src_kept[static_cast<std::size_t>(m.source_index)] = 1;
    tgt_kept[static_cast<std::size_t>(m.target_index)] = 1;
  }

  EditScript script;
  // Deletes, descending, so earlier indices stay valid.
  for (int i = static_cast<int>(src.size()) - 1; i >= 0; --i) {
    if (src_kept[static_cast<std::size_t>(i)]) continue;
    script.ops.push_back(EditOp{DeleteOp{i},
                                "remove " + detail::segment_text(src[static_cast<std::size_t>(i)])});
  }
  // Shifts: survivor rank == its index after the deletes.
  for (std::size_t rank = 0; rank < kept.size(); ++rank) {
    const auto& s = src[static_cast<std::size_t>(kept[rank].source_index)];
    const auto& t = tgt[static_cast<std::size_t>(kept[rank].target_index)];
    if (s.start == t.start && s.end == t.end) continue;
    script.ops.push_back(EditOp{ShiftOp{static_cast<int>(rank), t.start, t.end},
                                "move " + std::string(activity_label(s.activity)) + " " +
                                    format_time(s.start) + "-" + format_time(s.end) + " to " +
                                    format_time(t.start) + "-" + format_time(t.end)});
  }
  // Adds in target order; every earlier target is already in place, so the
  // insertion index is the target position itself.
  for (int j = 0; j < static_cast<int>(tgt.size()); ++j) {
    if (tgt_kept[static_cast<std::size_t>(j)]) continue;
    script.ops.push_back(EditOp{AddOp{j, tgt[static_cast<std::size_t>(j)]},
                                "insert " + detail::segment_text(tgt[static_cast<std::size_t>(j)])});
  }

  // Replay guard: correctness is the contract, so fall back rather than
  // ever returning a script that does not reproduce the target.
  bool ok = false;
  try {
    ok = apply_script(source, script) == target;
  } catch (const std::exception&) {
    ok = false;
  }
  if (!ok) {
    script.ops.clear();
    for (int i = static_cast<int>(src.size()) - 1; i >= 0; --i) {
      script.ops.push_back(EditOp{
          DeleteOp{i}, "remove " + detail::segment_text(src[static_cast<std::size_t>(i)])});
    }
    for (int j = 0; j < static_cast<int>(tgt.size()); ++j) {
      script.ops.push_back(EditOp{AddOp{j, tgt[static_cast<std::size_t>(j)]},
                                  "insert " + detail::segment_text(tgt[static_cast<std::size_t>(j)])});
    }
  }
  return script;
}

// ---------------------------------------------------------------------------
// repair: deterministic hard-validity fallback.
// ---------------------------------------------------------------------------

struct RepairConfig {
  // Interior gaps shorter than this extend the preceding activity (travel
  // slack); longer ones are filled with home.
  int extend_gap_max_minutes = 30;
  // Length of a home block carved from neighbors when a day boundary holds
  // a non-home activity.
  int boundary_home_minutes = 15;
};

namespace detail {

/// Clears [lo, hi) and plants a home block there, truncating straddlers and
/// dropping segments swallowed whole. Input must be sorted & non-overlapping.
inline void plant_home(std::vector<ActivitySegment>& segs, int lo, int hi) {
  std::vector<ActivitySegment> out;
  out.reserve(segs.size() + 1);
  bool planted = false;
  for (const ActivitySegment& seg : segs) {
    const int s = seg.start.minutes();
    const int e = seg.end.minutes();
    if (e <= lo) {
      out.push_back(seg);
      continue;
    }
    if (s < lo) out.push_back(ActivitySegment(seg.activity, seg.start, TimeOfDay(lo)));
    if (!planted) {
      out.push_back(ActivitySegment(ActivityType::Home, TimeOfDay(lo), TimeOfDay(hi)));
      planted = true;
    }
    if (e > hi) out.push_back(ActivitySegment(seg.activity, TimeOfDay(std::max(s, hi)), seg.end));
  }
  if (!planted) out.push_back(ActivitySegment(ActivityType::Home, TimeOfDay(lo), TimeOfDay(hi)));
  segs = std::move(out);
}

}  // namespace detail

/// Forces hard validity: resolve overlaps in favor of the earlier segment,
/// fill gaps, pin the 00:00/24:00 boundaries, home-bound both ends, merge.
/// Idempotent, and never invents activities beyond home.
inline DaySchedule repair(const DaySchedule& schedule, const RepairConfig& config = {}) {
  DaySchedule norm = normalize(schedule);  // throws on empty
  std::vector<ActivitySegment> segs;
  segs.reserve(norm.segments.size());

  // Overlaps: the later segment yields, shrinking from the front.
  int cover_end = 0;
  for (const ActivitySegment& seg : norm.segments) {
    const int s = std::max(seg.start.minutes(), cover_end);
    if (s >= seg.end.minutes()) continue;  // swallowed whole
    segs.push_back(ActivitySegment(seg.activity, TimeOfDay(s), seg.end));
    cover_end = std::max(cover_end, seg.end.minutes());
  }

  // Interior gaps: short ones read as travel slack around the preceding
  // activity; longer ones become home.
  std::vector<ActivitySegment> filled;
  filled.reserve(segs.size());
  for (const ActivitySegment& seg : segs) {
    if (!filled.empty() && filled.back().end < seg.start) {
      const int gap = seg.start.minutes() - filled.back().end.minutes();
      if (gap < config.extend_gap_max_minutes) {
        filled.back() = ActivitySegment(filled.back().activity, filled.back().start, seg.start);
      } else {
        filled.push_back(ActivitySegment(ActivityType::Home, filled.back().end, seg.start));
      }
    }
    filled.push_back(seg);
  }

  // Day boundaries: a missing morning becomes home; a missing evening
  // extends whatever the day ended with (home-bounding below cleans up).
  if (filled.front().start.minutes() != 0) {
    filled.insert(filled.begin(),
                  ActivitySegment(ActivityType::Home, TimeOfDay(0), filled.front().start));
  }
  if (filled.back().end.minutes() != kMinutesPerDay) {
    filled.back() =
        ActivitySegment(filled.back().activity, filled.back().start, TimeOfDay(kMinutesPerDay));
  }

  // Home-bound both ends.
  if (filled.front().activity != ActivityType::Home) {
    detail::plant_home(filled, 0, config.boundary_home_minutes);
  }
  if (filled.back().activity != ActivityType::Home) {
    detail::plant_home(filled, kMinutesPerDay - config.boundary_home_minutes, kMinutesPerDay);
  }

  return normalize(DaySchedule{std::move(filled)});
}

}  // namespace actsched
