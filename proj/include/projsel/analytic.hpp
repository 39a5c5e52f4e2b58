#pragma once

// Closed forms for cutoff mechanisms under iid Uniform[0,1] profits and
// payoffs: decision probabilities, expected profit, and the optimal single
// cutoff.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "projsel/core.hpp"

namespace projsel {

// Thrown when no sign change of phi_N can be bracketed away from c = 1.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// phi_N(c) = N(1-c)(1-c+c^N) - (1-c^N). Its interior root on (0,1) is the
// optimal single cutoff; c = 1 is always a spurious root.
inline double phi(std::size_t n, double c) {
  const double dn = static_cast<double>(n);
  const double cn = std::pow(c, dn);
  return dn * (1.0 - c) * (1.0 - c + cn) - (1.0 - cn);
}

// (1 - c^N) / (N(1 - c)), the probability the default project is chosen
// under a single cutoff c. The removable singularity at c = 1 is handled by
// the geometric sum when 1 - c < 1e-6.
inline double default_choice_probability(std::size_t n, double c) {
  const double dn = static_cast<double>(n);
  if (1.0 - c < 1e-6) {
    double sum = 0.0;
    double power = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += power;
      power *= c;
    }
    return sum / dn;
  }
  return (1.0 - std::pow(c, dn)) / (dn * (1.0 - c));
}

inline double single_cutoff_eu(std::size_t n, double c) {
  if (n == 0) throw std::invalid_argument("need N >= 1");
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("cutoff outside [0,1]");
  return 0.5 + 0.5 * c * (1.0 - default_choice_probability(n, c));
}

// 1/2 + (c/2)(c - c^N): the expected profit at a root of phi_N.
inline double optimal_value_formula(std::size_t n, double c) {
  return 0.5 + 0.5 * c * (c - std::pow(c, static_cast<double>(n)));
}

// e_0..e_m of x_1..x_m by the product-expansion recurrence
// prod (1 + x_i t) = sum e_j t^j.
inline std::vector<double> elementary_symmetric(std::span<const double> x) {
  std::vector<double> e(x.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j > 0; --j) e[j] += x[i] * e[j - 1];
  }
  return e;
}

// C(n, k): exact integer arithmetic for n <= 60, log-gamma above.
inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  if (n <= 60) {
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
      result = result * (n - k + i) / i;  // exact: divides at every step
    }
    return static_cast<double>(result);
  }
  return std::exp(std::lgamma(static_cast<double>(n) + 1) -
                  std::lgamma(static_cast<double>(k) + 1) -
                  std::lgamma(static_cast<double>(n - k) + 1));
}

namespace detail {

// P(d = N-1) given all N cutoffs (the last of which is ignored): condition on
// the default project's payoff rank k; it wins iff every one of the k-1
// projects ranked above it is off the table.
inline double default_probability(std::span<const double> leading_cutoffs) {
  const std::size_t n = leading_cutoffs.size() + 1;
  const auto e = elementary_symmetric(leading_cutoffs);
  double sum = 0.0;
  for (std::size_t k = 1; k <= n; ++k) sum += e[k - 1] / binomial(n - 1, k - 1);
  return sum / static_cast<double>(n);
}

}  // namespace detail

// P(d = i) for every project. A non-default project i is chosen with
// probability (1 - c_i) P(d = default | c_i = 0).
inline std::vector<double> prob_decision(const CutoffVector& cutoffs) {
  const std::size_t n = cutoffs.n_projects();
  std::vector<double> leading(cutoffs.values().begin(), cutoffs.values().end());
  std::vector<double> probs(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double saved = leading[i];
    leading[i] = 0.0;
    probs[i] = (1.0 - saved) * detail::default_probability(leading);
    leading[i] = saved;
  }
  probs[n - 1] = detail::default_probability(leading);
  return probs;
}

// sum_i (1 + c_i)/2 P(d = i), with the default cutoff 0.
inline double multi_cutoff_eu(const CutoffVector& cutoffs) {
  const auto probs = prob_decision(cutoffs);
  double eu = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    eu += 0.5 * (1.0 + cutoffs.cutoff(i)) * probs[i];
  }
  return eu;
}

struct OptimalCutoffResult {
  std::size_t n_projects;
  double cutoff;
  double expected_utility;
  double residual;  // phi_N(cutoff)
  int iterations;
  // Sign changes of phi_N seen on a uniform sample of the bracket; 1 is the
  // expected value, anything else is reported rather than assumed away.
  int bracket_sign_changes;
};

// Interior root of phi_N by bisection on [0, 1 - 1/(8N)]. phi_N(0) = N-1 > 0;
// if phi_N is not negative at the right end, the end moves toward 1 along
// 1 - 2^-j / N. Never returns the spurious root c = 1.
inline OptimalCutoffResult optimal_single_cutoff(std::size_t n,
                                                 double tol = 1e-15) {
  if (n < 2) throw std::invalid_argument("optimal cutoff needs N >= 2");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  const double dn = static_cast<double>(n);

  double lo = 0.0;
  double hi = 1.0 - 1.0 / (8.0 * dn);
  for (int j = 4; !(phi(n, hi) < 0.0); ++j) {
    if (j > 60) {
      throw BracketError("no sign change of phi_N found below c = 1 for N = " +
                         std::to_string(n));
    }
    hi = 1.0 - std::ldexp(1.0, -j) / dn;
    if (!(hi < 1.0)) {
      throw BracketError("bracket collapsed onto c = 1 for N = " +
                         std::to_string(n));
    }
  }
  if (!(phi(n, lo) > 0.0)) {
    throw BracketError("phi_N(0) is not positive for N = " + std::to_string(n));
  }

  constexpr int kSamples = 256;
  int sign_changes = 0;
  double prev = phi(n, lo);
  for (int s = 1; s <= kSamples; ++s) {
    const double cur = phi(n, lo + (hi - lo) * s / kSamples);
    if ((prev > 0) != (cur > 0)) ++sign_changes;
    prev = cur;
  }

  int iterations = 0;
  double mid = 0.5 * (lo + hi);
  double value = phi(n, mid);
  while ((hi - lo > tol || std::fabs(value) > tol) && iterations < 2000) {
    if (value > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
    const double next = 0.5 * (lo + hi);
    ++iterations;
    if (next == mid || next <= lo || next >= hi) break;
    mid = next;
    value = phi(n, mid);
  }
  return {n,     mid, optimal_value_formula(n, mid), value, iterations,
          sign_changes};
}

// Argmax of single_cutoff_eu(N, .) over the m-point grid {j/(m-1)}; ties go
// to the smallest cutoff. Independent check on the root finder.
inline double grid_scan_argmax(std::size_t n, std::size_t m) {
  if (m < 2) throw std::invalid_argument("grid scan needs m >= 2");
  double best_c = 0.0;
  double best = single_cutoff_eu(n, 0.0);
  for (std::size_t j = 1; j < m; ++j) {
    const double c = static_cast<double>(j) / static_cast<double>(m - 1);
    const double v = single_cutoff_eu(n, c);
    if (v > best) {
      best = v;
      best_c = c;
    }
  }
  return best_c;
}

// EU with c_i = base + t, c_j = base - t (others at base), and with the signs
// of t swapped. The two agree because projects are exchangeable.
inline std::pair<double, double> symmetry_in_perturbation(std::size_t n,
                                                          double base, double t,
                                                          std::size_t i,
                                                          std::size_t j) {
  if (n < 3) throw std::invalid_argument("perturbation needs two non-default projects");
  if (i == j || i + 1 >= n || j + 1 >= n) {
    throw std::invalid_argument("i and j must be distinct non-default projects");
  }
  std::vector<double> c(n - 1, base);
  c[i] = base + t;
  c[j] = base - t;
  const double plus = multi_cutoff_eu(CutoffVector(c));
  c[i] = base - t;
  c[j] = base + t;
  const double minus = multi_cutoff_eu(CutoffVector(c));
  return {plus, minus};
}

}  // namespace projsel
