#pragma once

// Comparison baselines: no partial verifiability (any report is feasible)
// and transfers with ex-post verifiable profits.

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "projsel/analytic.hpp"
#include "projsel/ic_audit.hpp"
#include "projsel/monte_carlo.hpp"

namespace projsel {

// Without the no-overselling constraint every IC mechanism picks the agent's
// favorite from a fixed menu, so the principal earns E[p_i] = 1/2.
inline double no_verifiability_eu(std::size_t n) {
  if (n == 0) throw std::invalid_argument("need N >= 1");
  return 0.5;
}

inline std::vector<std::size_t> checked_menu(const std::set<std::size_t>& menu,
                                             std::size_t n) {
  if (menu.empty()) throw std::invalid_argument("menu must be nonempty");
  if (*menu.rbegin() >= n) throw std::invalid_argument("menu project out of range");
  return {menu.begin(), menu.end()};
}

// d(p, a) = argmax{a_i : i in menu}, ignoring profits.
inline auto menu_rule(const std::set<std::size_t>& menu, std::size_t n) {
  return [m = checked_menu(menu, n)](std::span<const double>,
                                     std::span<const double> a) {
    return agent_favorite(m, a);
  };
}

// Monte Carlo certificate that a menu mechanism earns 1/2.
inline EstimateWithError menu_profit_certificate(const std::set<std::size_t>& menu,
                                                 std::size_t n,
                                                 std::uint64_t n_samples,
                                                 std::uint64_t seed) {
  return estimate_eu(n, menu_rule(menu, n), n_samples, seed);
}

inline GridMechanism menu_mechanism(const std::set<std::size_t>& menu,
                                    std::size_t n, std::size_t resolution) {
  const auto m = checked_menu(menu, n);
  const GridShape shape(n, resolution);
  return GridMechanism::tabulate(
      shape, [&](std::span<const int>, std::span<const int> a) {
        std::size_t best = m.front();
        for (std::size_t i : m) {
          if (a[i] > a[best]) best = i;
        }
        return best;
      });
}

inline AuditReport audit_unrestricted(const GridMechanism& mech) {
  AuditOptions options;
  options.rule = MessageRule::kUnrestricted;
  return audit_ic(mech, options);
}

inline bool menu_mechanism_is_ic(const std::set<std::size_t>& menu, std::size_t n,
                                 std::size_t resolution) {
  return audit_unrestricted(menu_mechanism(menu, n, resolution)).is_ic();
}

// E[max_i (p_i + a_i)] for iid Uniform[0,1] values, i.e.
// integral over [0,2] of 1 - F(s)^N with F the triangular CDF:
//   2 - int_0^1 (s^2/2)^N ds - int_0^1 (1 - v^2/2)^N dv.
inline double expected_max_surplus(std::size_t n) {
  if (n == 0) throw std::invalid_argument("need N >= 1");
  const double dn = static_cast<double>(n);
  const double lower = 1.0 / (std::pow(2.0, dn) * (2.0 * dn + 1.0));
  double upper = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    upper += binomial(n, j) * std::pow(-0.5, static_cast<double>(j)) /
             (2.0 * static_cast<double>(j) + 1.0);
  }
  return 2.0 - lower - upper;
}

struct TransfersEstimate {
  EstimateWithError principal;  // E[max_i (p_i + a_i)]
  EstimateWithError agent_net;  // a_d + p_d - fee, expected 0
  double fee;
};

// The efficient rule d = argmax (p_i + a_i) with the transfer
// t = p_d - E[max (p_i + a_i)]: the principal keeps the expected surplus.
inline TransfersEstimate transfers_eu(std::size_t n, std::uint64_t n_samples,
                                      std::uint64_t seed) {
  const double fee = expected_max_surplus(n);
  auto surplus = [](std::span<const double> p, std::span<const double> a) {
    double best = p[0] + a[0];
    for (std::size_t i = 1; i < p.size(); ++i) best = std::max(best, p[i] + a[i]);
    return best;
  };
  TransfersEstimate out{
      estimate_statistic(n, surplus, n_samples, seed),
      estimate_statistic(
          n,
          [&](std::span<const double> p, std::span<const double> a) {
            return surplus(p, a) - fee;
          },
          n_samples, seed),
      fee};
  return out;
}

}  // namespace projsel
