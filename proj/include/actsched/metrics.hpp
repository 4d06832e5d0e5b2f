#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "actsched/schedule.hpp"
#include "actsched/stats.hpp"

namespace actsched {

/// N discretized users. Rows align with user_ids; paired metrics join two
/// populations strictly by id.
struct Population {
  std::vector<std::string> user_ids;
  std::vector<SlotSequence> sequences;

  std::size_t size() const { return sequences.size(); }
  bool empty() const { return sequences.empty(); }

  void add(std::string user_id, SlotSequence seq) {
    user_ids.push_back(std::move(user_id));
    sequences.push_back(seq);
  }
};

namespace detail {

/// For each generated row, the index of the reference row with the same id.
inline std::vector<std::size_t> pair_rows(const Population& gen, const Population& ref) {
  if (gen.size() != ref.size()) {
    throw std::invalid_argument("paired metrics need equal population sizes (" +
                                std::to_string(gen.size()) + " vs " + std::to_string(ref.size()) +
                                ")");
  }
  if (gen.empty()) throw std::invalid_argument("paired metrics need a non-empty population");
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t r = 0; r < ref.size(); ++r) {
    if (!by_id.emplace(ref.user_ids[r], r).second) {
      throw std::invalid_argument("duplicate user_id '" + ref.user_ids[r] +
                                  "' in reference population");
    }
  }
  std::vector<std::size_t> pairing;
  pairing.reserve(gen.size());
  for (const std::string& id : gen.user_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw std::invalid_argument("user_id '" + id + "' has no reference row");
    }
    pairing.push_back(it->second);
  }
  return pairing;
}

inline void require_nonempty(const Population& gen, const Population& ref) {
  if (gen.empty() || ref.empty()) {
    throw std::invalid_argument("metrics need non-empty populations");
  }
}

inline std::vector<double> pooled_run_length_counts(const Population& p) {
  std::vector<double> counts(kSlotCount, 0.0);
  for (const SlotSequence& seq : p.sequences) {
    for (const Episode& ep : episodes(seq)) {
      counts[static_cast<std::size_t>(ep.length_slots - 1)] += 1.0;
    }
  }
  return counts;
}

inline std::vector<double> pooled_joint_int_counts(const Population& p) {
  std::vector<double> counts(static_cast<std::size_t>(kActivityTypeCount) * kSlotCount, 0.0);
  for (const SlotSequence& seq : p.sequences) {
    for (const Episode& ep : episodes(seq)) {
      counts[activity_index(ep.activity) * kSlotCount +
             static_cast<std::size_t>(ep.length_slots - 1)] += 1.0;
    }
  }
  return counts;
}

inline std::vector<double> pooled_onset_counts(const Population& p) {
  std::vector<double> counts(kSlotCount, 0.0);
  for (const SlotSequence& seq : p.sequences) {
    for (const Episode& ep : episodes(seq)) {
      counts[static_cast<std::size_t>(ep.start_slot)] += 1.0;
    }
  }
  return counts;
}

inline std::vector<double> pooled_joint_hour_counts(const Population& p) {
  std::vector<double> counts(static_cast<std::size_t>(kActivityTypeCount) * kSlotCount, 0.0);
  for (const SlotSequence& seq : p.sequences) {
    for (const Episode& ep : episodes(seq)) {
      counts[activity_index(ep.activity) * kSlotCount +
             static_cast<std::size_t>(ep.start_slot)] += 1.0;
    }
  }
  return counts;
}

inline std::vector<double> pooled_slot_budget_counts(const Population& p) {
  std::vector<double> counts(kActivityTypeCount, 0.0);
  for (const SlotSequence& seq : p.sequences) {
    for (ActivityType a : seq.slots) counts[activity_index(a)] += 1.0;
  }
  return counts;
}

inline std::vector<double> pooled_episode_class_counts(const Population& p) {
  std::vector<double> counts(kActivityTypeCount, 0.0);
  for (const SlotSequence& seq : p.sequences) {
    for (const Episode& ep : episodes(seq)) counts[activity_index(ep.activity)] += 1.0;
  }
  return counts;
}

inline std::vector<double> per_user_episode_count_counts(const Population& p) {
  std::vector<double> counts(kSlotCount, 0.0);  // a user has 1..96 episodes
  for (const SlotSequence& seq : p.sequences) {
    counts[episodes(seq).size() - 1] += 1.0;
  }
  return counts;
}

inline std::string sequence_token(const SlotSequence& seq) {
  std::string key;
  key.reserve(kSlotCount);
  for (ActivityType a : seq.slots) key.push_back(static_cast<char>(activity_index(a)));
  return key;
}

inline double pooled_jsd(const std::vector<double>& gen_counts,
                         const std::vector<double>& ref_counts) {
  return jensen_shannon_divergence(Histogram::from_counts(gen_counts),
                                   Histogram::from_counts(ref_counts));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sequence similarity metrics (paired).
// ---------------------------------------------------------------------------

inline double accuracy(const Population& gen, const Population& ref) {
  const auto pairing = detail::pair_rows(gen, ref);
  long hits = 0;
  for (std::size_t i = 0; i < gen.size(); ++i) {
    const SlotSequence& g = gen.sequences[i];
    const SlotSequence& t = ref.sequences[pairing[i]];
    for (std::size_t s = 0; s < kSlotCount; ++s) {
      if (g.slots[s] == t.slots[s]) ++hits;
    }
  }
  return static_cast<double>(hits) / (static_cast<double>(gen.size()) * kSlotCount);
}

inline double macro_f1(const Population& gen, const Population& ref) {
  const auto pairing = detail::pair_rows(gen, ref);
  std::array<double, kActivityTypeCount> tp{}, fp{}, fn{};
  for (std::size_t i = 0; i < gen.size(); ++i) {
    const SlotSequence& g = gen.sequences[i];
    const SlotSequence& t = ref.sequences[pairing[i]];
    for (std::size_t s = 0; s < kSlotCount; ++s) {
      const std::size_t gk = activity_index(g.slots[s]);
      const std::size_t tk = activity_index(t.slots[s]);
      if (gk == tk) {
        tp[gk] += 1.0;
      } else {
        fp[gk] += 1.0;
        fn[tk] += 1.0;
      }
    }
  }
  double sum = 0.0;
  int classes = 0;
  for (std::size_t k = 0; k < kActivityTypeCount; ++k) {
    if (tp[k] + fp[k] + fn[k] == 0.0) continue;  // absent from both populations
    ++classes;
    const double prec = tp[k] + fp[k] > 0.0 ? tp[k] / (tp[k] + fp[k]) : 0.0;
    const double rec = tp[k] + fn[k] > 0.0 ? tp[k] / (tp[k] + fn[k]) : 0.0;
    if (prec + rec > 0.0) sum += 2.0 * prec * rec / (prec + rec);
  }
  return classes > 0 ? sum / classes : 0.0;
}

/// Levenshtein over the 96-token rows, unit costs, rolling two-row DP.
inline int levenshtein_slots(const SlotSequence& a, const SlotSequence& b) {
  std::vector<int> prev(kSlotCount + 1), cur(kSlotCount + 1);
  for (int j = 0; j <= kSlotCount; ++j) prev[static_cast<std::size_t>(j)] = j;
  for (int i = 1; i <= kSlotCount; ++i) {
    cur[0] = i;
    for (int j = 1; j <= kSlotCount; ++j) {
      const int sub = a.slots[static_cast<std::size_t>(i - 1)] ==
                              b.slots[static_cast<std::size_t>(j - 1)]
                          ? 0
                          : 1;
      cur[static_cast<std::size_t>(j)] =
          std::min({prev[static_cast<std::size_t>(j)] + 1, cur[static_cast<std::size_t>(j - 1)] + 1,
                    prev[static_cast<std::size_t>(j - 1)] + sub});
    }
    std::swap(prev, cur);
  }
  return prev[kSlotCount];
}

inline double edit_dist(const Population& gen, const Population& ref) {
  const auto pairing = detail::pair_rows(gen, ref);
  double sum = 0.0;
  for (std::size_t i = 0; i < gen.size(); ++i) {
    sum += static_cast<double>(levenshtein_slots(gen.sequences[i], ref.sequences[pairing[i]])) /
           kSlotCount;
  }
  return sum / static_cast<double>(gen.size());
}

/// Sentence BLEU of one row: uniform 1..4-gram weights, clipped counts, and
/// add-1 smoothing on any zero precision with n >= 2 (a zero unigram
/// precision still zeroes the score). Rows share length 96 so the brevity
/// penalty is always 1.
inline double sentence_bleu_slots(const SlotSequence& hyp, const SlotSequence& ref) {
  double log_sum = 0.0;
  for (int n = 1; n <= 4; ++n) {
    std::map<std::string, int> ref_grams;
    for (int s = 0; s + n <= kSlotCount; ++s) {
      std::string gram;
      for (int k = 0; k < n; ++k) {
        gram.push_back(static_cast<char>(activity_index(ref.slots[static_cast<std::size_t>(s + k)])));
      }
      ++ref_grams[gram];
    }
    std::map<std::string, int> hyp_grams;
    for (int s = 0; s + n <= kSlotCount; ++s) {
      std::string gram;
      for (int k = 0; k < n; ++k) {
        gram.push_back(static_cast<char>(activity_index(hyp.slots[static_cast<std::size_t>(s + k)])));
      }
      ++hyp_grams[gram];
    }
    double clipped = 0.0;
    double total = 0.0;
    for (const auto& [gram, count] : hyp_grams) {
      total += count;
      const auto it = ref_grams.find(gram);
      if (it != ref_grams.end()) clipped += std::min(count, it->second);
    }
    double precision = clipped / total;
    if (clipped == 0.0) {
      if (n == 1) return 0.0;
      precision = 1.0 / (total + 1.0);
    }
    log_sum += 0.25 * std::log(precision);
  }
  return std::exp(log_sum);
}

inline double bleu(const Population& gen, const Population& ref) {
  const auto pairing = detail::pair_rows(gen, ref);
  double sum = 0.0;
  for (std::size_t i = 0; i < gen.size(); ++i) {
    sum += sentence_bleu_slots(gen.sequences[i], ref.sequences[pairing[i]]);
  }
  return sum / static_cast<double>(gen.size());
}

// ---------------------------------------------------------------------------
// Temporal alignment metrics (distributional, JSD base 2).
// ---------------------------------------------------------------------------

inline double macro_int(const Population& gen, const Population& ref) {
  detail::require_nonempty(gen, ref);
  return detail::pooled_jsd(detail::pooled_run_length_counts(gen),
                            detail::pooled_run_length_counts(ref));
}

inline double micro_int(const Population& gen, const Population& ref) {
  detail::require_nonempty(gen, ref);
  return detail::pooled_jsd(detail::pooled_joint_int_counts(gen),
                            detail::pooled_joint_int_counts(ref));
}

inline double macro_hour(const Population& gen, const Population& ref) {
  detail::require_nonempty(gen, ref);
  return detail::pooled_jsd(detail::pooled_onset_counts(gen), detail::pooled_onset_counts(ref));
}

inline double micro_hour(const Population& gen, const Population& ref) {
  detail::require_nonempty(gen, ref);
  return detail::pooled_jsd(detail::pooled_joint_hour_counts(gen),
                            detail::pooled_joint_hour_counts(ref));
}

// ---------------------------------------------------------------------------
// Distributional consistency metrics.
// ---------------------------------------------------------------------------

/// Whole 96-slot sequences as single tokens; support = union of observed
/// sequences.
inline double data_jsd(const Population& gen, const Population& ref) {
  detail::require_nonempty(gen, ref);
  std::map<std::string, std::pair<double, double>> support;
  for (const SlotSequence& seq : gen.sequences) support[detail::sequence_token(seq)].first += 1.0;
  for (const SlotSequence& seq : ref.sequences) support[detail::sequence_token(seq)].second += 1.0;
  std::vector<double> p, q;
  p.reserve(support.size());
  q.reserve(support.size());
  for (const auto& [token, counts] : support) {
    p.push_back(counts.first / static_cast<double>(gen.size()));
    q.push_back(counts.second / static_cast<double>(ref.size()));
  }
  return jensen_shannon_divergence(p, q);
}

inline double act_type(const Population& gen, const Population& ref) {
  detail::require_nonempty(gen, ref);
  return detail::pooled_jsd(detail::pooled_slot_budget_counts(gen),
                            detail::pooled_slot_budget_counts(ref));
}

inline double uni_act_type(const Population& gen, const Population& ref) {
  detail::require_nonempty(gen, ref);
  return detail::pooled_jsd(detail::pooled_episode_class_counts(gen),
                            detail::pooled_episode_class_counts(ref));
}

inline double traj_len(const Population& gen, const Population& ref) {
  detail::require_nonempty(gen, ref);
  return detail::pooled_jsd(detail::per_user_episode_count_counts(gen),
                            detail::per_user_episode_count_counts(ref));
}

// ---------------------------------------------------------------------------
// The full report.
// ---------------------------------------------------------------------------

struct MetricReport {
  double accuracy = 0.0;
  double f1_score = 0.0;
  double edit_dist = 0.0;
  double bleu_score = 0.0;
  double macro_hour = 0.0;
  double micro_hour = 0.0;
  double micro_int = 0.0;
  double macro_int = 0.0;
  double data_jsd = 0.0;
  double act_type = 0.0;
  double uni_act_type = 0.0;
  double traj_len = 0.0;
};

struct MetricField {
  const char* name;
  const char* alias;  // Table-style short name, empty when none
  bool higher_is_better;
  double MetricReport::* member;
};

inline const std::array<MetricField, 12>& metric_fields() {
  static const std::array<MetricField, 12> fields{{
      {"accuracy", "Acc", true, &MetricReport::accuracy},
      {"f1_score", "", true, &MetricReport::f1_score},
      {"edit_dist", "", false, &MetricReport::edit_dist},
      {"bleu_score", "", true, &MetricReport::bleu_score},
      {"macro_hour", "", false, &MetricReport::macro_hour},
      {"micro_hour", "", false, &MetricReport::micro_hour},
      {"micro_int", "", false, &MetricReport::micro_int},
      {"macro_int", "Mint", false, &MetricReport::macro_int},
      {"data_jsd", "", false, &MetricReport::data_jsd},
      {"act_type", "Atype", false, &MetricReport::act_type},
      {"uni_act_type", "", false, &MetricReport::uni_act_type},
      {"traj_len", "", false, &MetricReport::traj_len},
  }};
  return fields;
}

inline MetricReport evaluate(const Population& gen, const Population& ref) {
  MetricReport r;
  r.accuracy = accuracy(gen, ref);
  r.f1_score = macro_f1(gen, ref);
  r.edit_dist = edit_dist(gen, ref);
  r.bleu_score = bleu(gen, ref);
  r.macro_hour = macro_hour(gen, ref);
  r.micro_hour = micro_hour(gen, ref);
  r.micro_int = micro_int(gen, ref);
  r.macro_int = macro_int(gen, ref);
  r.data_jsd = data_jsd(gen, ref);
  r.act_type = act_type(gen, ref);
  r.uni_act_type = uni_act_type(gen, ref);
  r.traj_len = traj_len(gen, ref);
  return r;
}

// Aligned text table: the headline triplet first, then the rest.
inline std::string metric_table(const MetricReport& report) {
  std::vector<const MetricField*> order;
  for (const char* head : {"accuracy", "macro_int", "act_type"}) {
    for (const auto& f : metric_fields()) {
      if (std::string_view(f.name) == head) order.push_back(&f);
    }
  }
  for (const auto& f : metric_fields()) {
    if (std::string_view(f.name) == "accuracy" || std::string_view(f.name) == "macro_int" ||
        std::string_view(f.name) == "act_type") {
      continue;
    }
    order.push_back(&f);
  }
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (const MetricField* f : order) {
    std::string label = f->alias[0] ? std::string(f->alias) : std::string(f->name);
    label += f->higher_is_better ? " ↑" : " ↓";
    out << std::left << std::setw(16) << label << std::right << std::setw(8)
        << report.*(f->member) << "\n";
  }
  return out.str();
}

}  // namespace actsched
