#pragma once

// Sequential selection without recall: project i is accepted iff
// p_i >= c_i and a_i >= c_i, where c_i is the value of continuing.

#include <span>
#include <stdexcept>
#include <vector>

#include "projsel/monte_carlo.hpp"

namespace projsel {

// Expected profit of facing a project with cutoff c and continuation value c.
inline double continuation_value(double c) {
  const double gap = 1.0 - c;
  return c + 0.5 * gap * gap * gap;
}

// c_0..c_{N-1} in project order, run backward from c_{N-1} = 0.
inline std::vector<double> dynamic_cutoffs(std::size_t n) {
  if (n == 0) throw std::invalid_argument("need N >= 1");
  std::vector<double> c(n, 0.0);
  for (std::size_t i = n - 1; i > 0; --i) c[i - 1] = continuation_value(c[i]);
  return c;
}

// 1/2 (1 - c_1 + 3c_1^2 - c_1^3) at the first project's cutoff.
inline double dynamic_profit(std::size_t n) {
  const double c = dynamic_cutoffs(n).front();
  return 0.5 * (1.0 - c + 3.0 * c * c - c * c * c);
}

// The accept/reject process as a decision rule on a full profile.
inline auto sequential_rule(std::vector<double> cutoffs) {
  return [c = std::move(cutoffs)](std::span<const double> p,
                                  std::span<const double> a) {
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      if (p[i] >= c[i] && a[i] >= c[i]) return i;
    }
    return c.size() - 1;
  };
}

inline EstimateWithError simulate_dynamic_profit(std::size_t n,
                                                 std::uint64_t n_samples,
                                                 std::uint64_t seed,
                                                 std::size_t threads = 0) {
  return estimate_eu(n, sequential_rule(dynamic_cutoffs(n)), n_samples, seed,
                     threads);
}

}  // namespace projsel
