#pragma once

// Exhaustive search over every table mechanism for two projects on a k x k
// profit grid. A monotone f_1 on the grid is a staircase: column i (profit
// index of project 1) is on from row t_i upward, with t non-increasing in i.
// Such sequences are lattice paths with k right and k up steps, so there are
// C(2k, k) of them.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "projsel/core.hpp"

namespace projsel {

inline constexpr std::size_t kMaxSearchResolution = 10;

class StaircaseIndicator {
 public:
  // thresholds[i] in [0, k], non-increasing.
  explicit StaircaseIndicator(std::vector<int> thresholds)
      : thresholds_(std::move(thresholds)) {
    const int k = static_cast<int>(thresholds_.size());
    if (k == 0) throw std::invalid_argument("staircase needs k >= 1");
    for (std::size_t i = 0; i < thresholds_.size(); ++i) {
      if (thresholds_[i] < 0 || thresholds_[i] > k ||
          (i > 0 && thresholds_[i] > thresholds_[i - 1])) {
        throw std::invalid_argument("staircase thresholds must be non-increasing in [0,k]");
      }
    }
  }

  std::size_t resolution() const { return thresholds_.size(); }
  std::span<const int> thresholds() const { return thresholds_; }

  // f_1 at profit indices (p1, p2).
  bool on(int p1, int p2) const { return p2 >= thresholds_[p1]; }

  // True iff f_1 depends only on p_1 through a threshold (every column is
  // fully on or fully off).
  bool is_threshold() const {
    const int k = static_cast<int>(resolution());
    for (int t : thresholds_) {
      if (t != 0 && t != k) return false;
    }
    return true;
  }

  // First fully-on column of a threshold indicator; nullopt for f_1 = 0 or
  // non-threshold shapes.
  std::optional<int> cutoff_index() const {
    if (!is_threshold()) return std::nullopt;
    for (std::size_t i = 0; i < thresholds_.size(); ++i) {
      if (thresholds_[i] == 0) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  MonotoneIndicator to_indicator() const {
    const GridShape shape(2, resolution());
    std::vector<std::uint8_t> bits(shape.points());
    const int k = static_cast<int>(resolution());
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) bits[static_cast<std::size_t>(i * k + j)] = on(i, j);
    }
    return MonotoneIndicator::from_dense(shape, std::move(bits));
  }

  TableMechanismGrid to_table() const {
    const GridShape shape(2, resolution());
    return TableMechanismGrid(shape, {to_indicator(), MonotoneIndicator::constant(shape, true)});
  }

  bool operator==(const StaircaseIndicator&) const = default;

 private:
  std::vector<int> thresholds_;
};

// Visits every monotone f_1 on the k x k grid once, in lexicographic order of
// the threshold sequence (f_1 = 1 first).
template <class Visitor>
void for_each_monotone_indicator(std::size_t k, Visitor&& visit) {
  if (k == 0) throw std::invalid_argument("resolution must be >= 1");
  if (k > kMaxSearchResolution) {
    throw ResourceLimitError("monotone enumeration is limited to k <= " +
                             std::to_string(kMaxSearchResolution));
  }
  const int top = static_cast<int>(k);
  std::vector<int> t(k, 0);
  while (true) {
    visit(StaircaseIndicator(t));
    // Next non-increasing sequence: bump the last position that can grow
    // (bounded by its predecessor) and reset the tail to zero.
    std::size_t i = k;
    while (i-- > 0) {
      const int cap = i == 0 ? top : t[i - 1];
      if (t[i] < cap) break;
    }
    if (i == static_cast<std::size_t>(-1)) return;
    ++t[i];
    for (std::size_t j = i + 1; j < k; ++j) t[j] = 0;
  }
}

inline std::uint64_t count_monotone_indicators(std::size_t k) {
  std::uint64_t count = 0;
  for_each_monotone_indicator(k, [&](const StaircaseIndicator&) { ++count; });
  return count;
}

// Discrete principal profit at profit indices (p1, p2), in units of
// 1/(2(k-1)): (p1 + p2)/2 if project 1 is on the table (each project is then
// the agent's favorite half the time), else p2.
inline std::int64_t profile_contribution(const StaircaseIndicator& f, int p1,
                                         int p2) {
  return f.on(p1, p2) ? p1 + p2 : 2 * p2;
}

struct DiscreteValue {
  std::int64_t numerator;
  std::int64_t denominator;
  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

// Exact mean of the contribution over the k x k grid.
inline DiscreteValue discrete_eu_n2(const StaircaseIndicator& f) {
  const int k = static_cast<int>(f.resolution());
  if (k < 2) throw std::invalid_argument("discrete EU needs k >= 2");
  std::int64_t total = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) total += profile_contribution(f, i, j);
  }
  return {total, 2 * static_cast<std::int64_t>(k - 1) * k * k};
}

// Threshold mechanism at the first diagonal point where f_1 is on:
// f'(p) = 1 iff p_1 > max{p_1 : f_1(p_1, p_1) = 0}.
inline StaircaseIndicator threshold_replacement(const StaircaseIndicator& f) {
  const int k = static_cast<int>(f.resolution());
  int first_on = k;
  for (int d = k - 1; d >= 0 && f.on(d, d); --d) first_on = d;
  std::vector<int> t(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) t[static_cast<std::size_t>(i)] = i >= first_on ? 0 : k;
  return StaircaseIndicator(std::move(t));
}

struct TableSearchResult {
  std::size_t resolution;
  std::uint64_t candidates;
  DiscreteValue best_value;
  // Every candidate attaining best_value, in enumeration order.
  std::vector<StaircaseIndicator> maximizers;
  // Lowest-index maximizer.
  StaircaseIndicator best;
  // True iff any maximizer is threshold-shaped.
  bool is_cutoff_shaped;
  // Grid cutoff of the first threshold-shaped maximizer.
  std::optional<double> cutoff;
};

inline TableSearchResult best_table_mechanism_n2(std::size_t k) {
  if (k < 2) throw std::invalid_argument("search needs k >= 2");
  std::uint64_t candidates = 0;
  std::int64_t best_numerator = -1;
  std::vector<StaircaseIndicator> maximizers;
  DiscreteValue value{0, 1};
  for_each_monotone_indicator(k, [&](const StaircaseIndicator& f) {
    ++candidates;
    const auto v = discrete_eu_n2(f);
    if (v.numerator > best_numerator) {
      best_numerator = v.numerator;
      value = v;
      maximizers.clear();
    }
    if (v.numerator == best_numerator) maximizers.push_back(f);
  });
  TableSearchResult out{k, candidates, value, maximizers, maximizers.front(),
                        false, std::nullopt};
  for (const auto& m : maximizers) {
    if (auto idx = m.cutoff_index()) {
      out.is_cutoff_shaped = true;
      out.cutoff = static_cast<double>(*idx) / static_cast<double>(k - 1);
      break;
    }
  }
  return out;
}

}  // namespace projsel
