#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "actsched/constraints.hpp"
#include "actsched/schedule.hpp"
#include "actsched/stats.hpp"
#include "actsched/tagged_text.hpp"

namespace actsched {

// ---------------------------------------------------------------------------
// Formatting reward: tag presence only, content immaterial.
// ---------------------------------------------------------------------------

inline double format_reward(const TaggedOutput& out) {
  const int tags = (out.has_thought_block() ? 1 : 0) + (out.has_json_block() ? 1 : 0);
  if (tags == 2) return 1.0;
  if (tags == 1) return 0.5;
  return 0.0;
}

inline double format_reward(const std::string& raw) {
  return format_reward(parse_tagged_output(raw));
}

// ---------------------------------------------------------------------------
// Constraint reward: mean of three indicators.
// ---------------------------------------------------------------------------

struct ConstraintIndicators {
  bool full_day = false;    // starts 00:00, ends 24:00
  bool continuous = false;  // no gaps, no overlaps
  bool durations_ok = false;
};

inline ConstraintIndicators constraint_indicators(const DaySchedule& schedule,
                                                  const DurationBounds& bounds) {
  ConstraintIndicators ind;
  if (schedule.empty()) return ind;
  std::vector<ActivitySegment> segs = schedule.segments;
  std::sort(segs.begin(), segs.end(), [](const ActivitySegment& a, const ActivitySegment& b) {
    return a.start < b.start;
  });
  ind.full_day =
      segs.front().start.minutes() == 0 && segs.back().end.minutes() == kMinutesPerDay;
  ind.continuous = true;
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    if (segs[i].end != segs[i + 1].start) {
      ind.continuous = false;
      break;
    }
  }
  ind.durations_ok = std::all_of(segs.begin(), segs.end(),
                                 [&](const ActivitySegment& s) { return bounds.within(s); });
  return ind;
}

inline double constraint_reward(const DaySchedule& schedule, const DurationBounds& bounds) {
  const ConstraintIndicators ind = constraint_indicators(schedule, bounds);
  return ((ind.full_day ? 1 : 0) + (ind.continuous ? 1 : 0) + (ind.durations_ok ? 1 : 0)) / 3.0;
}

// ---------------------------------------------------------------------------
// Fidelity reward over 96-slot sequences.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> activity_slot_counts(const SlotSequence& seq) {
  std::vector<double> counts(kActivityTypeCount, 0.0);
  for (ActivityType a : seq.slots) counts[activity_index(a)] += 1.0;
  return counts;
}

/// Joint (activity x run length) episode counts, flattened. Run lengths span
/// 1..96, one bin each, so identical length profiles with different activity
/// mixes still diverge — the distribution is over typed intervals.
inline std::vector<double> interval_counts(const SlotSequence& seq) {
  std::vector<double> counts(static_cast<std::size_t>(kActivityTypeCount) * kSlotCount, 0.0);
  for (const Episode& ep : episodes(seq)) {
    counts[activity_index(ep.activity) * kSlotCount +
           static_cast<std::size_t>(ep.length_slots - 1)] += 1.0;
  }
  return counts;
}

inline double slot_accuracy(const SlotSequence& gen, const SlotSequence& ref) {
  int hits = 0;
  for (int t = 0; t < kSlotCount; ++t) {
    if (gen.slots[static_cast<std::size_t>(t)] == ref.slots[static_cast<std::size_t>(t)]) ++hits;
  }
  return static_cast<double>(hits) / kSlotCount;
}

/// Unweighted mean of per-class F1 over the classes present in either
/// sequence; classes absent from both are skipped rather than scored 0/0.
inline double slot_macro_f1(const SlotSequence& gen, const SlotSequence& ref) {
  std::array<double, kActivityTypeCount> tp{}, fp{}, fn{};
  for (int t = 0; t < kSlotCount; ++t) {
    const std::size_t g = activity_index(gen.slots[static_cast<std::size_t>(t)]);
    const std::size_t r = activity_index(ref.slots[static_cast<std::size_t>(t)]);
    if (g == r) {
      tp[g] += 1.0;
    } else {
      fp[g] += 1.0;
      fn[r] += 1.0;
    }
  }
  double sum = 0.0;
  int classes = 0;
  for (std::size_t k = 0; k < kActivityTypeCount; ++k) {
    if (tp[k] + fp[k] + fn[k] == 0.0) continue;
    ++classes;
    const double denom_p = tp[k] + fp[k];
    const double denom_r = tp[k] + fn[k];
    const double prec = denom_p > 0.0 ? tp[k] / denom_p : 0.0;
    const double rec = denom_r > 0.0 ? tp[k] / denom_r : 0.0;
    if (prec + rec > 0.0) sum += 2.0 * prec * rec / (prec + rec);
  }
  return classes > 0 ? sum / classes : 0.0;
}

}  // namespace detail

inline double fidelity_reward(const SlotSequence& gen, const SlotSequence& gt) {
  const double acc = detail::slot_accuracy(gen, gt);
  const double f1 = detail::slot_macro_f1(gen, gt);
  const double jsd_act =
      jensen_shannon_divergence(Histogram::from_counts(detail::activity_slot_counts(gen)),
                                Histogram::from_counts(detail::activity_slot_counts(gt)));
  const double jsd_int =
      jensen_shannon_divergence(Histogram::from_counts(detail::interval_counts(gen)),
                                Histogram::from_counts(detail::interval_counts(gt)));
  return 0.40 * acc + 0.10 * f1 + 0.25 * (1.0 - jsd_act) + 0.25 * (1.0 - jsd_int);
}

/// Throws when either schedule cannot be discretized (not a full-day cover).
inline double fidelity_reward(const DaySchedule& gen, const DaySchedule& gt) {
  return fidelity_reward(discretize(gen), discretize(gt));
}

// ---------------------------------------------------------------------------
// Composite reward and group advantages.
// ---------------------------------------------------------------------------

struct RewardBreakdown {
  double r_fmt = 0.0;
  double r_con = 0.0;
  double r_sim = 0.0;
  double total = 0.0;
  bool schedule_parsed = false;  // [JSON] block yielded a usable schedule
  bool fidelity_scored = false;  // schedule was discretizable against the reference
};

/// Total on any roll-out text: anything unverifiable earns zero for that
/// component instead of raising.
inline RewardBreakdown total_reward(const std::string& raw_output, const DaySchedule& ground_truth,
                                    const DurationBounds& bounds) {
  const TaggedOutput parsed = parse_tagged_output(raw_output);
  RewardBreakdown b;
  b.r_fmt = format_reward(parsed);
  if (parsed.schedule && !parsed.schedule->empty()) {
    b.schedule_parsed = true;
    b.r_con = constraint_reward(*parsed.schedule, bounds);
    try {
      b.r_sim = fidelity_reward(*parsed.schedule, ground_truth);
      b.fidelity_scored = true;
    } catch (const std::exception&) {
      b.r_sim = 0.0;
    }
  }
  b.total = b.r_fmt + b.r_con + b.r_sim;
  return b;
}

/// Group-relative advantages: (r - mean) / (population std + 1e-8).
inline std::vector<double> group_advantages(const std::vector<double>& rewards) {
  if (rewards.size() < 2) {
    throw std::invalid_argument("group advantages need at least 2 roll-outs");
  }
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= n;
  const double denom = std::sqrt(var) + 1e-8;
  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) out.push_back((r - mean) / denom);
  return out;
}

}  // namespace actsched
