#pragma once

// Incentive-compatibility auditing of grid mechanisms and extraction of the
// table structure from IC mechanisms.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "projsel/core.hpp"
#include "projsel/mechanism_eval.hpp"
#include "projsel/random.hpp"

namespace projsel {

struct AuditOptions {
  MessageRule rule = MessageRule::kNoOverselling;
  // Upper bound on (profile, report) pairs the scan may visit.
  std::uint64_t max_evaluations = 2'000'000'000ULL;
  // 0 audits every profile; otherwise this many profiles are drawn and each
  // is checked against its full message space.
  std::uint64_t sampled_profiles = 0;
  std::uint64_t seed = 0x5eed;
};

namespace detail {

struct ProfitReports {
  std::vector<std::size_t> flats;  // feasible reported-profit points, ascending
  std::uint64_t reachable = 0;     // bitmask of decisions reachable from them
};

inline ProfitReports feasible_reports(const GridMechanism& mech,
                                      std::span<const int> truth,
                                      MessageRule rule) {
  const GridShape& shape = mech.shape();
  MessageSpace space(shape, std::vector<int>(truth.begin(), truth.end()), rule);
  ProfitReports out;
  std::vector<int> digits(shape.n_projects(), 0);
  const auto bound = space.profit_bound();
  do {
    out.flats.push_back(shape.flatten(digits));
  } while (next_bounded(digits, bound));
  for (std::size_t rp : out.flats) {
    for (std::size_t ra = 0; ra < shape.points(); ++ra) {
      out.reachable |= std::uint64_t{1} << mech.decision(rp, ra);
    }
  }
  return out;
}

// First profitable deviation at (pf, af) in lexicographic report order.
inline std::optional<AuditWitness> first_deviation(const GridMechanism& mech,
                                                   std::size_t pf,
                                                   std::size_t af,
                                                   const ProfitReports& reports,
                                                   std::span<const double> a) {
  const GridShape& shape = mech.shape();
  const std::size_t truthful = mech.decision(pf, af);
  double best_reachable = a[truthful];
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((reports.reachable >> i) & 1U) best_reachable = std::max(best_reachable, a[i]);
  }
  if (!(best_reachable > a[truthful])) return std::nullopt;
  for (std::size_t rp : reports.flats) {
    for (std::size_t ra = 0; ra < shape.points(); ++ra) {
      const std::size_t dev = mech.decision(rp, ra);
      if (a[dev] > a[truthful]) {
        return AuditWitness{
            ValueProfile(shape.values(shape.unflatten(pf)),
                         std::vector<double>(a.begin(), a.end())),
            to_report(shape, {rp, ra}), truthful, dev, a[dev] - a[truthful]};
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Nominal count of (profile, report) pairs an exhaustive audit covers.
inline long double audit_evaluation_count(const GridShape& shape,
                                          MessageRule rule) {
  const long double k = static_cast<long double>(shape.resolution());
  const long double per_coordinate =
      rule == MessageRule::kNoOverselling ? k * (k + 1) / 2 : k * k;
  long double total = 1;
  for (std::size_t i = 0; i < shape.n_projects(); ++i) total *= per_coordinate * k * k;
  return total;
}

// IC holds iff no feasible report gives the agent a strictly higher payoff
// than truth. On failure the witness is the first (profile, report) pair in
// lexicographic scan order (among the sampled profiles when sampling).
inline AuditReport audit_ic(const GridMechanism& mech,
                            const AuditOptions& options = {}) {
  const GridShape& shape = mech.shape();
  const std::size_t n = shape.n_projects();
  if (n > 64) throw std::invalid_argument("audit supports at most 64 projects");
  const std::size_t points = shape.points();

  std::vector<std::pair<std::size_t, std::size_t>> sampled;
  if (options.sampled_profiles == 0) {
    if (audit_evaluation_count(shape, options.rule) >
        static_cast<long double>(options.max_evaluations)) {
      throw ResourceLimitError("exhaustive audit exceeds evaluation budget");
    }
  } else {
    // At most k^N reported profits times k^N reported payoffs per profile.
    const long double per_profile =
        static_cast<long double>(points) * static_cast<long double>(points);
    if (per_profile * static_cast<long double>(options.sampled_profiles) >
        static_cast<long double>(options.max_evaluations)) {
      throw ResourceLimitError("sampled audit exceeds evaluation budget");
    }
    for (std::uint64_t s = 0; s < options.sampled_profiles; ++s) {
      CounterRng rng(options.seed, s);
      sampled.emplace_back(rng.below(points), rng.below(points));
    }
    std::sort(sampled.begin(), sampled.end());
    sampled.erase(std::unique(sampled.begin(), sampled.end()), sampled.end());
  }

  std::vector<int> p(n), a_idx(n);
  std::vector<double> a(n);
  auto check = [&](std::size_t pf, std::size_t af,
                   const detail::ProfitReports& reports) {
    shape.unflatten(af, a_idx);
    for (std::size_t i = 0; i < n; ++i) a[i] = shape.value(a_idx[i]);
    return detail::first_deviation(mech, pf, af, reports, a);
  };

  if (sampled.empty()) {
    for (std::size_t pf = 0; pf < points; ++pf) {
      shape.unflatten(pf, p);
      const auto reports = detail::feasible_reports(mech, p, options.rule);
      for (std::size_t af = 0; af < points; ++af) {
        if (auto w = check(pf, af, reports)) return AuditReport::violated(*w);
      }
    }
    return AuditReport::incentive_compatible();
  }

  std::optional<std::size_t> cached_pf;
  detail::ProfitReports reports;
  for (auto [pf, af] : sampled) {
    if (cached_pf != pf) {
      shape.unflatten(pf, p);
      reports = detail::feasible_reports(mech, p, options.rule);
      cached_pf = pf;
    }
    if (auto w = check(pf, af, reports)) return AuditReport::violated(*w);
  }
  return AuditReport::incentive_compatible();
}

// Replays a witness through the mechanism: true iff reporting the deviation
// strictly raises the agent's payoff and the deviation is feasible under
// `rule`.
inline bool witness_certifies(const GridMechanism& mech, const AuditWitness& w,
                              MessageRule rule = MessageRule::kNoOverselling) {
  if (rule == MessageRule::kNoOverselling && !w.deviation.undersells_only(w.truth)) {
    return false;
  }
  const std::size_t truthful = mech.decide(w.truth);
  const std::size_t deviant = mech.decide(w.deviation);
  const auto a = w.truth.payoffs();
  return truthful == w.truthful_decision && deviant == w.deviation_decision &&
         a[deviant] > a[truthful];
}

struct TableExtraction {
  // f_i(p) = 1 iff some (p', a') with p' <= p has d(p', a') = i.
  std::vector<MonotoneIndicator> indicators;
  std::vector<std::size_t> always_on;
  // First profile (lexicographic) where d is not an agent-argmax over the
  // extracted table; empty when the mechanism is a table mechanism.
  std::optional<ValueProfile> failure;

  bool ok() const { return !failure.has_value(); }

  // The extracted structure as a TableMechanismGrid, available when the
  // argmax check passed and the default project is always on.
  std::optional<TableMechanismGrid> as_table() const {
    if (!ok() || indicators.empty() || !indicators.back().is_constant(true)) {
      return std::nullopt;
    }
    return TableMechanismGrid(indicators.front().shape(), indicators);
  }
};

inline TableExtraction extract_table_structure(const GridMechanism& mech) {
  const GridShape& shape = mech.shape();
  const std::size_t n = shape.n_projects();
  const std::size_t points = shape.points();

  // Which projects appear at each profit point, then up-closure one axis at a
  // time.
  std::vector<std::vector<std::uint8_t>> bits(n, std::vector<std::uint8_t>(points, 0));
  for (std::size_t pf = 0; pf < points; ++pf) {
    for (std::size_t af = 0; af < points; ++af) bits[mech.decision(pf, af)][pf] = 1;
  }
  std::vector<int> idx(n);
  for (std::size_t axis = 0; axis < n; ++axis) {
    for (std::size_t pf = 0; pf < points; ++pf) {
      shape.unflatten(pf, idx);
      if (idx[axis] == 0) continue;
      --idx[axis];
      const std::size_t below = shape.flatten(idx);
      for (std::size_t i = 0; i < n; ++i) bits[i][pf] |= bits[i][below];
    }
  }

  TableExtraction out;
  for (std::size_t i = 0; i < n; ++i) {
    out.indicators.push_back(MonotoneIndicator::from_dense(shape, bits[i]));
    if (out.indicators.back().is_constant(true)) out.always_on.push_back(i);
  }

  std::vector<int> a_idx(n);
  for (std::size_t pf = 0; pf < points && !out.failure; ++pf) {
    for (std::size_t af = 0; af < points; ++af) {
      shape.unflatten(af, a_idx);
      const std::size_t d = mech.decision(pf, af);
      bool argmax = true;
      for (std::size_t i = 0; i < n && argmax; ++i) {
        if (bits[i][pf] && a_idx[i] > a_idx[d]) argmax = false;
      }
      if (!argmax) {
        out.failure = ValueProfile(shape.values(shape.unflatten(pf)),
                                   shape.values(a_idx));
        break;
      }
    }
  }
  return out;
}

}  // namespace projsel
