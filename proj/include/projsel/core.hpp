#pragma once

// Domain types shared by every projsel module: value profiles, reports, the
// uniform profit grid, monotone indicators, table and cutoff mechanisms.
//
// Projects are indexed 0..N-1. Project N-1 is the default project and is on
// the table at every profile.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace projsel {

// Thrown when an enumeration would exceed its configured budget.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_unit_interval(std::span<const double> values,
                                const char* what) {
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string(what) +
                                  " entries must lie in [0,1]");
    }
  }
}

// k^n with overflow detection.
inline std::size_t checked_power(std::size_t base, std::size_t exponent) {
  std::size_t result = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && result > SIZE_MAX / base) {
      throw ResourceLimitError("grid size overflows size_t");
    }
    result *= base;
  }
  return result;
}

}  // namespace detail

// Realized profits p and agent payoffs a for N projects.
class ValueProfile {
 public:
  ValueProfile(std::vector<double> profits, std::vector<double> payoffs)
      : profits_(std::move(profits)), payoffs_(std::move(payoffs)) {
    if (profits_.empty() || profits_.size() != payoffs_.size()) {
      throw std::invalid_argument(
          "profile needs N >= 1 profits and N payoffs");
    }
    detail::check_unit_interval(profits_, "profit");
    detail::check_unit_interval(payoffs_, "payoff");
  }

  std::size_t size() const { return profits_.size(); }
  std::span<const double> profits() const { return profits_; }
  std::span<const double> payoffs() const { return payoffs_; }

  bool operator==(const ValueProfile&) const = default;

 private:
  std::vector<double> profits_;
  std::vector<double> payoffs_;
};

// A report (pi, alpha). Feasibility against a true profile is checked by the
// message correspondence, not here.
class Report {
 public:
  Report(std::vector<double> reported_profits,
         std::vector<double> reported_payoffs)
      : profits_(std::move(reported_profits)),
        payoffs_(std::move(reported_payoffs)) {
    if (profits_.empty() || profits_.size() != payoffs_.size()) {
      throw std::invalid_argument("report needs matching N >= 1 vectors");
    }
    detail::check_unit_interval(profits_, "reported profit");
    detail::check_unit_interval(payoffs_, "reported payoff");
  }

  std::size_t size() const { return profits_.size(); }
  std::span<const double> profits() const { return profits_; }
  std::span<const double> payoffs() const { return payoffs_; }

  // No overselling: every reported profit is at most the true one.
  bool undersells_only(const ValueProfile& truth) const {
    if (truth.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      if (profits_[i] > truth.profits()[i]) return false;
    }
    return true;
  }

  bool operator==(const Report&) const = default;

 private:
  std::vector<double> profits_;
  std::vector<double> payoffs_;
};

// The uniform lattice {0, 1/(k-1), ..., 1}^N. Points are flattened row-major
// with coordinate 0 most significant, so flat order is lexicographic order.
class GridShape {
 public:
  GridShape(std::size_t n_projects, std::size_t resolution)
      : n_(n_projects), k_(resolution) {
    if (n_ == 0) throw std::invalid_argument("grid needs N >= 1");
    if (k_ < 2) throw std::invalid_argument("grid resolution must be >= 2");
    points_ = detail::checked_power(k_, n_);
  }

  std::size_t n_projects() const { return n_; }
  std::size_t resolution() const { return k_; }
  std::size_t points() const { return points_; }

  double value(int index) const {
    return static_cast<double>(index) / static_cast<double>(k_ - 1);
  }

  // Grid index of v; throws if v is not a lattice value.
  int snap(double v) const {
    const double scaled = v * static_cast<double>(k_ - 1);
    const double nearest = std::round(scaled);
    if (!(std::fabs(scaled - nearest) <= 1e-9) || nearest < 0 ||
        nearest > static_cast<double>(k_ - 1)) {
      throw std::invalid_argument("value " + std::to_string(v) +
                                  " is not on the grid of resolution " +
                                  std::to_string(k_));
    }
    return static_cast<int>(nearest);
  }

  std::vector<int> snap_all(std::span<const double> values) const {
    if (values.size() != n_) {
      throw std::invalid_argument("dimension mismatch against grid");
    }
    std::vector<int> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = snap(values[i]);
    return out;
  }

  std::size_t flatten(std::span<const int> index) const {
    std::size_t flat = 0;
    for (int digit : index) flat = flat * k_ + static_cast<std::size_t>(digit);
    return flat;
  }

  void unflatten(std::size_t flat, std::span<int> out) const {
    for (std::size_t i = n_; i-- > 0;) {
      out[i] = static_cast<int>(flat % k_);
      flat /= k_;
    }
  }

  std::vector<int> unflatten(std::size_t flat) const {
    std::vector<int> out(n_);
    unflatten(flat, out);
    return out;
  }

  std::vector<double> values(std::span<const int> index) const {
    std::vector<double> out(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) out[i] = value(index[i]);
    return out;
  }

  bool operator==(const GridShape&) const = default;

 private:
  std::size_t n_;
  std::size_t k_;
  std::size_t points_ = 1;
};

// Advance an odometer whose digit i runs over [0, bound[i]]; returns false
// after the last state. The last digit moves fastest.
inline bool next_bounded(std::span<int> digits, std::span<const int> bound) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (digits[i] < bound[i]) {
      ++digits[i];
      return true;
    }
    digits[i] = 0;
  }
  return false;
}

inline bool componentwise_leq(std::span<const int> a, std::span<const int> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

// A weakly increasing 0/1 function on the profit grid. Stored densely for
// N <= kDenseMaxProjects, otherwise as the antichain of minimal on-points.
class MonotoneIndicator {
 public:
  static constexpr std::size_t kDenseMaxProjects = 3;

  static MonotoneIndicator constant(const GridShape& shape, bool on) {
    if (shape.n_projects() <= kDenseMaxProjects) {
      return MonotoneIndicator(shape,
                               std::vector<std::uint8_t>(shape.points(), on),
                               {});
    }
    std::vector<std::vector<int>> gens;
    if (on) gens.emplace_back(shape.n_projects(), 0);
    return MonotoneIndicator(shape, {}, std::move(gens));
  }

  // Throws std::invalid_argument if `bits` is not monotone.
  static MonotoneIndicator from_dense(const GridShape& shape,
                                      std::vector<std::uint8_t> bits) {
    if (bits.size() != shape.points()) {
      throw std::invalid_argument("indicator size does not match grid");
    }
    for (auto& b : bits) {
      if (b > 1) throw std::invalid_argument("indicator entries must be 0/1");
    }
    if (auto bad = first_monotonicity_violation(shape, bits)) {
      throw std::invalid_argument("indicator is not monotone at grid point " +
                                  std::to_string(*bad));
    }
    if (shape.n_projects() <= kDenseMaxProjects) {
      return MonotoneIndicator(shape, std::move(bits), {});
    }
    return MonotoneIndicator(shape, {}, minimal_points_of(shape, bits));
  }

  // The up-set generated by `points`.
  static MonotoneIndicator from_generators(const GridShape& shape,
                                           std::vector<std::vector<int>> points) {
    for (const auto& g : points) {
      if (g.size() != shape.n_projects()) {
        throw std::invalid_argument("generator has wrong dimension");
      }
      for (int d : g) {
        if (d < 0 || d >= static_cast<int>(shape.resolution())) {
          throw std::invalid_argument("generator lies outside the grid");
        }
      }
    }
    std::vector<std::vector<int>> minimal;
    for (std::size_t i = 0; i < points.size(); ++i) {
      bool dominated = false;
      for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
        if (i == j) continue;
        if (componentwise_leq(points[j], points[i]) &&
            (points[j] != points[i] || j < i)) {
          dominated = true;
        }
      }
      if (!dominated) minimal.push_back(points[i]);
    }
    std::sort(minimal.begin(), minimal.end());
    if (shape.n_projects() <= kDenseMaxProjects) {
      std::vector<std::uint8_t> bits(shape.points(), 0);
      std::vector<int> idx(shape.n_projects());
      for (std::size_t f = 0; f < bits.size(); ++f) {
        shape.unflatten(f, idx);
        for (const auto& g : minimal) {
          if (componentwise_leq(g, idx)) {
            bits[f] = 1;
            break;
          }
        }
      }
      return MonotoneIndicator(shape, std::move(bits), {});
    }
    return MonotoneIndicator(shape, {}, std::move(minimal));
  }

  const GridShape& shape() const { return shape_; }
  bool is_dense() const { return !dense_.empty(); }

  bool at(std::span<const int> index) const {
    if (is_dense()) return dense_[shape_.flatten(index)] != 0;
    for (const auto& g : generators_) {
      if (componentwise_leq(g, index)) return true;
    }
    return false;
  }

  bool at_flat(std::size_t flat) const {
    if (is_dense()) return dense_[flat] != 0;
    return at(shape_.unflatten(flat));
  }

  bool is_constant(bool on) const {
    if (is_dense()) {
      return std::all_of(dense_.begin(), dense_.end(),
                         [on](std::uint8_t b) { return (b != 0) == on; });
    }
    if (!on) return generators_.empty();
    return std::any_of(generators_.begin(), generators_.end(), [](const auto& g) {
      return std::all_of(g.begin(), g.end(), [](int d) { return d == 0; });
    });
  }

  std::vector<std::uint8_t> to_dense() const {
    if (is_dense()) return dense_;
    std::vector<std::uint8_t> bits(shape_.points());
    for (std::size_t f = 0; f < bits.size(); ++f) bits[f] = at_flat(f);
    return bits;
  }

  std::vector<std::vector<int>> minimal_points() const {
    if (!is_dense()) return generators_;
    return minimal_points_of(shape_, dense_);
  }

  bool operator==(const MonotoneIndicator& other) const {
    if (!(shape_ == other.shape_)) return false;
    if (!is_dense() && !other.is_dense()) {
      return generators_ == other.generators_;
    }
    return to_dense() == other.to_dense();
  }

  // Flat index of the first grid point whose +1 successor in some coordinate
  // has a smaller value, if any.
  static std::optional<std::size_t> first_monotonicity_violation(
      const GridShape& shape, std::span<const std::uint8_t> bits) {
    std::vector<int> idx(shape.n_projects());
    const int top = static_cast<int>(shape.resolution()) - 1;
    for (std::size_t f = 0; f < bits.size(); ++f) {
      if (!bits[f]) continue;
      shape.unflatten(f, idx);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] == top) continue;
        ++idx[i];
        const bool up = bits[shape.flatten(idx)] != 0;
        --idx[i];
        if (!up) return f;
      }
    }
    return std::nullopt;
  }

 private:
  MonotoneIndicator(GridShape shape, std::vector<std::uint8_t> dense,
                    std::vector<std::vector<int>> generators)
      : shape_(std::move(shape)),
        dense_(std::move(dense)),
        generators_(std::move(generators)) {}

  static std::vector<std::vector<int>> minimal_points_of(
      const GridShape& shape, std::span<const std::uint8_t> bits) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(shape.n_projects());
    for (std::size_t f = 0; f < bits.size(); ++f) {
      if (!bits[f]) continue;
      shape.unflatten(f, idx);
      bool minimal = true;
      for (std::size_t i = 0; i < idx.size() && minimal; ++i) {
        if (idx[i] == 0) continue;
        --idx[i];
        if (bits[shape.flatten(idx)]) minimal = false;
        ++idx[i];
      }
      if (minimal) out.push_back(idx);
    }
    return out;
  }

  GridShape shape_;
  std::vector<std::uint8_t> dense_;
  std::vector<std::vector<int>> generators_;
};

// f_0..f_{N-1} over a common profit grid, f_{N-1} identically 1.
class TableMechanismGrid {
 public:
  TableMechanismGrid(GridShape shape, std::vector<MonotoneIndicator> indicators)
      : shape_(std::move(shape)), indicators_(std::move(indicators)) {
    if (indicators_.size() != shape_.n_projects()) {
      throw std::invalid_argument("need exactly N indicators");
    }
    for (const auto& f : indicators_) {
      if (!(f.shape() == shape_)) {
        throw std::invalid_argument("indicator grid does not match mechanism");
      }
    }
    if (!indicators_.back().is_constant(true)) {
      throw std::invalid_argument(
          "the default project's indicator must be identically 1");
    }
  }

  const GridShape& shape() const { return shape_; }
  std::size_t n_projects() const { return shape_.n_projects(); }
  std::size_t grid_resolution() const { return shape_.resolution(); }
  const MonotoneIndicator& indicator(std::size_t i) const {
    return indicators_.at(i);
  }
  std::span<const MonotoneIndicator> indicators() const { return indicators_; }

  std::vector<std::size_t> on_table(std::span<const int> profit_index) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < indicators_.size(); ++i) {
      if (indicators_[i].at(profit_index)) out.push_back(i);
    }
    return out;
  }

  bool operator==(const TableMechanismGrid&) const = default;

 private:
  GridShape shape_;
  std::vector<MonotoneIndicator> indicators_;
};

// c_0..c_{N-2}; the default project's cutoff is 0.
class CutoffVector {
 public:
  explicit CutoffVector(std::vector<double> cutoffs)
      : cutoffs_(std::move(cutoffs)) {
    detail::check_unit_interval(cutoffs_, "cutoff");
  }

  static CutoffVector single(std::size_t n_projects, double c) {
    if (n_projects == 0) throw std::invalid_argument("need N >= 1");
    return CutoffVector(std::vector<double>(n_projects - 1, c));
  }

  std::size_t n_projects() const { return cutoffs_.size() + 1; }
  std::span<const double> values() const { return cutoffs_; }

  double cutoff(std::size_t project) const {
    if (project == cutoffs_.size()) return 0.0;
    return cutoffs_.at(project);
  }

  // All N cutoffs including the trailing zero.
  std::vector<double> with_default() const {
    std::vector<double> out = cutoffs_;
    out.push_back(0.0);
    return out;
  }

  bool operator==(const CutoffVector&) const = default;

 private:
  std::vector<double> cutoffs_;
};

struct AuditWitness {
  ValueProfile truth;
  Report deviation;
  std::size_t truthful_decision;
  std::size_t deviation_decision;
  double gain;  // a[deviation_decision] - a[truthful_decision] > 0
};

// IC verdict; a witness is present exactly when the verdict is negative.
class AuditReport {
 public:
  static AuditReport incentive_compatible() { return AuditReport(); }
  static AuditReport violated(AuditWitness witness) {
    if (!(witness.gain > 0)) {
      throw std::invalid_argument("witness gain must be positive");
    }
    AuditReport r;
    r.witness_ = std::move(witness);
    return r;
  }

  bool is_ic() const { return !witness_.has_value(); }
  const std::optional<AuditWitness>& witness() const { return witness_; }

 private:
  AuditReport() = default;
  std::optional<AuditWitness> witness_;
};

// Agent's favorite among `candidates` (ascending indices); lowest index wins
// ties.
inline std::size_t agent_favorite(std::span<const std::size_t> candidates,
                                  std::span<const double> payoffs) {
  std::size_t best = candidates.front();
  for (std::size_t i : candidates) {
    if (payoffs[i] > payoffs[best]) best = i;
  }
  return best;
}

inline std::size_t decide_table_at(const TableMechanismGrid& mech,
                                   std::span<const int> profit_index,
                                   std::span<const double> payoffs) {
  const std::size_t n = mech.n_projects();
  std::size_t best = n - 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!mech.indicator(i).at(profit_index)) continue;
    if (payoffs[i] > payoffs[best] ||
        (payoffs[i] == payoffs[best] && i < best)) {
      best = i;
    }
  }
  return best;
}

// d(p,a) in argmax{a_i : f_i(p) = 1}, ties to the lowest index. Profits must
// be grid values.
inline std::size_t decide_table(const TableMechanismGrid& mech,
                                const ValueProfile& profile) {
  if (profile.size() != mech.n_projects()) {
    throw std::invalid_argument("profile dimension does not match mechanism");
  }
  const auto idx = mech.shape().snap_all(profile.profits());
  return decide_table_at(mech, idx, profile.payoffs());
}

// First grid index whose value is >= c.
inline int threshold_index(const GridShape& shape, double c) {
  const double scaled = c * static_cast<double>(shape.resolution() - 1);
  return static_cast<int>(std::ceil(scaled - 1e-9));
}

inline TableMechanismGrid cutoff_to_grid(const CutoffVector& cutoffs,
                                         std::size_t resolution) {
  const GridShape shape(cutoffs.n_projects(), resolution);
  const std::size_t n = shape.n_projects();
  std::vector<MonotoneIndicator> indicators;
  indicators.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> generator(n, 0);
    generator[i] = threshold_index(shape, cutoffs.cutoff(i));
    indicators.push_back(MonotoneIndicator::from_generators(shape, {generator}));
  }
  return TableMechanismGrid(shape, std::move(indicators));
}

}  // namespace projsel
