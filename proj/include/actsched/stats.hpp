#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace actsched {

/// A normalized probability vector over a finite support.
/// Building one from an all-zero count vector is an error, not a zero vector.
struct Histogram {
  std::vector<double> probs;

  static Histogram from_counts(const std::vector<double>& counts) {
    double total = 0.0;
    for (double c : counts) {
      if (c < 0.0) throw std::invalid_argument("histogram counts must be non-negative");
      total += c;
    }
    if (total <= 0.0) throw std::invalid_argument("histogram has empty support");
    Histogram h;
    h.probs.reserve(counts.size());
    for (double c : counts) h.probs.push_back(c / total);
    return h;
  }

  double sum() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }
};

/// Jensen-Shannon divergence with base-2 logs, so the result lies in [0, 1].
/// Zero-probability bins contribute nothing (0 * log 0 == 0).
inline double jensen_shannon_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("distributions must share a support to compare");
  }
  double sum_p = 0.0;
  double sum_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) sum_p += p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) sum_q += q[i] * std::log2(q[i] / m);
  }
  const double jsd = 0.5 * sum_p + 0.5 * sum_q;
  return jsd < 0.0 ? 0.0 : jsd;
}

inline double jensen_shannon_divergence(const Histogram& p, const Histogram& q) {
  return jensen_shannon_divergence(p.probs, q.probs);
}

}  // namespace actsched
