#pragma once

// Arbitrary deterministic mechanisms on the (profit grid x payoff grid), the
// message correspondences, and exact discrete expected profit.

#include <cstdint>
#include <iterator>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "projsel/core.hpp"
#include "projsel/numeric.hpp"

namespace projsel {

// Largest decision table a GridMechanism may hold (k^{2N} entries).
inline constexpr std::size_t kMaxGridMechanismEntries = std::size_t{1} << 26;

// A full decision table d: grid^N x grid^N -> project. Entry
// (profit_flat, payoff_flat) lives at profit_flat * k^N + payoff_flat.
class GridMechanism {
 public:
  GridMechanism(GridShape shape, std::vector<std::uint16_t> decisions)
      : shape_(std::move(shape)), decisions_(std::move(decisions)) {
    const std::size_t expected = entries_for(shape_);
    if (decisions_.size() != expected) {
      throw std::invalid_argument("decision table must have k^(2N) entries");
    }
    for (auto d : decisions_) {
      if (d >= shape_.n_projects()) {
        throw std::invalid_argument("decision out of range");
      }
    }
  }

  // Builds d from rule(profit_index, payoff_index) -> project.
  template <class Rule>
  static GridMechanism tabulate(const GridShape& shape, Rule&& rule) {
    const std::size_t points = shape.points();
    std::vector<std::uint16_t> decisions(entries_for(shape));
    std::vector<int> p(shape.n_projects()), a(shape.n_projects());
    for (std::size_t pf = 0; pf < points; ++pf) {
      shape.unflatten(pf, p);
      for (std::size_t af = 0; af < points; ++af) {
        shape.unflatten(af, a);
        decisions[pf * points + af] =
            static_cast<std::uint16_t>(rule(std::span<const int>(p),
                                            std::span<const int>(a)));
      }
    }
    return GridMechanism(shape, std::move(decisions));
  }

  static GridMechanism from_table(const TableMechanismGrid& table) {
    const GridShape& shape = table.shape();
    std::vector<double> payoff(shape.n_projects());
    return tabulate(shape, [&](std::span<const int> p, std::span<const int> a) {
      for (std::size_t i = 0; i < a.size(); ++i) payoff[i] = shape.value(a[i]);
      return decide_table_at(table, p, payoff);
    });
  }

  const GridShape& shape() const { return shape_; }
  std::size_t n_projects() const { return shape_.n_projects(); }
  std::size_t grid_resolution() const { return shape_.resolution(); }
  std::span<const std::uint16_t> decisions() const { return decisions_; }

  std::size_t decision(std::size_t profit_flat, std::size_t payoff_flat) const {
    return decisions_[profit_flat * shape_.points() + payoff_flat];
  }

  std::size_t decide(std::span<const double> profits,
                     std::span<const double> payoffs) const {
    const auto p = shape_.snap_all(profits);
    const auto a = shape_.snap_all(payoffs);
    return decision(shape_.flatten(p), shape_.flatten(a));
  }
  std::size_t decide(const ValueProfile& v) const {
    return decide(v.profits(), v.payoffs());
  }
  std::size_t decide(const Report& r) const {
    return decide(r.profits(), r.payoffs());
  }

  bool operator==(const GridMechanism&) const = default;

 private:
  static std::size_t entries_for(const GridShape& shape) {
    const std::size_t points = shape.points();
    if (points > kMaxGridMechanismEntries / points) {
      throw ResourceLimitError("grid mechanism table exceeds " +
                               std::to_string(kMaxGridMechanismEntries) +
                               " entries");
    }
    return points * points;
  }

  GridShape shape_;
  std::vector<std::uint16_t> decisions_;
};

enum class MessageRule {
  kNoOverselling,  // pi_i <= p_i, alpha free
  kUnrestricted,   // any grid report
};

struct GridReport {
  std::size_t profit_flat;
  std::size_t payoff_flat;
  bool operator==(const GridReport&) const = default;
};

// Streaming enumeration of the feasible grid reports at a true profit point,
// in lexicographic (reported profit, reported payoff) order.
class MessageSpace {
 public:
  MessageSpace(GridShape shape, std::vector<int> true_profit, MessageRule rule)
      : shape_(std::move(shape)), bound_(std::move(true_profit)) {
    if (bound_.size() != shape_.n_projects()) {
      throw std::invalid_argument("dimension mismatch against grid");
    }
    if (rule == MessageRule::kUnrestricted) {
      for (auto& b : bound_) b = static_cast<int>(shape_.resolution()) - 1;
    }
    full_.assign(bound_.size(), static_cast<int>(shape_.resolution()) - 1);
  }

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = GridReport;
    using difference_type = std::ptrdiff_t;
    using pointer = const GridReport*;
    using reference = GridReport;

    iterator() = default;
    explicit iterator(const MessageSpace* space)
        : space_(space),
          profit_(space->bound_.size(), 0),
          payoff_(space->bound_.size(), 0) {}

    GridReport operator*() const {
      return {space_->shape_.flatten(profit_), space_->shape_.flatten(payoff_)};
    }
    std::span<const int> profit_index() const { return profit_; }
    std::span<const int> payoff_index() const { return payoff_; }

    iterator& operator++() {
      if (!next_bounded(payoff_, space_->full_) &&
          !next_bounded(profit_, space_->bound_)) {
        space_ = nullptr;
      }
      return *this;
    }
    void operator++(int) { ++*this; }

    bool operator==(const iterator& other) const {
      if (space_ == nullptr || other.space_ == nullptr) {
        return space_ == other.space_;
      }
      return profit_ == other.profit_ && payoff_ == other.payoff_;
    }

   private:
    const MessageSpace* space_ = nullptr;
    std::vector<int> profit_;
    std::vector<int> payoff_;
  };

  iterator begin() const { return iterator(this); }
  iterator end() const { return iterator(); }

  // prod_i (bound_i + 1) * k^N
  std::size_t size() const {
    std::size_t count = shape_.points();
    for (int b : bound_) count *= static_cast<std::size_t>(b + 1);
    return count;
  }

  std::span<const int> profit_bound() const { return bound_; }
  const GridShape& shape() const { return shape_; }

 private:
  GridShape shape_;
  std::vector<int> bound_;
  std::vector<int> full_;
};

inline MessageSpace message_space(const ValueProfile& profile,
                                  std::size_t resolution,
                                  MessageRule rule = MessageRule::kNoOverselling) {
  GridShape shape(profile.size(), resolution);
  auto truth = shape.snap_all(profile.profits());
  shape.snap_all(profile.payoffs());
  return MessageSpace(shape, std::move(truth), rule);
}

inline Report to_report(const GridShape& shape, GridReport r) {
  return Report(shape.values(shape.unflatten(r.profit_flat)),
                shape.values(shape.unflatten(r.payoff_flat)));
}

// Uniform average of p_d over every (profit, payoff) grid point.
inline double exact_discrete_eu(const GridMechanism& mech) {
  const GridShape& shape = mech.shape();
  const std::size_t points = shape.points();
  std::vector<int> p(shape.n_projects());
  // Profit values are integers over (k-1), so the sum is exact in integers.
  std::uint64_t total = 0;
  for (std::size_t pf = 0; pf < points; ++pf) {
    shape.unflatten(pf, p);
    for (std::size_t af = 0; af < points; ++af) {
      total += static_cast<std::uint64_t>(p[mech.decision(pf, af)]);
    }
  }
  return static_cast<double>(total) /
         (static_cast<double>(shape.resolution() - 1) *
          static_cast<double>(points) * static_cast<double>(points));
}

// Payoffs integrated out analytically: under continuous iid payoffs every
// on-table project is the agent's favorite with probability 1/|table|.
inline double exact_discrete_eu(const TableMechanismGrid& mech) {
  const GridShape& shape = mech.shape();
  std::vector<int> p(shape.n_projects());
  NeumaierSum sum;
  for (std::size_t pf = 0; pf < shape.points(); ++pf) {
    shape.unflatten(pf, p);
    const auto table = mech.on_table(p);
    double local = 0;
    for (std::size_t i : table) local += shape.value(p[i]);
    sum.add(local / static_cast<double>(table.size()));
  }
  return sum.value() / static_cast<double>(shape.points());
}

// One row per (profit, payoff) grid point: p_1..p_N, a_1..a_N, decision.
inline void write_decisions_csv(std::ostream& out, const GridMechanism& mech) {
  const GridShape& shape = mech.shape();
  const std::size_t n = shape.n_projects();
  for (std::size_t i = 0; i < n; ++i) out << 'p' << (i + 1) << ',';
  for (std::size_t i = 0; i < n; ++i) out << 'a' << (i + 1) << ',';
  out << "decision\n";
  std::vector<int> p(n), a(n);
  for (std::size_t pf = 0; pf < shape.points(); ++pf) {
    shape.unflatten(pf, p);
    for (std::size_t af = 0; af < shape.points(); ++af) {
      shape.unflatten(af, a);
      for (int v : p) out << format_real(shape.value(v)) << ',';
      for (int v : a) out << format_real(shape.value(v)) << ',';
      out << mech.decision(pf, af) << '\n';
    }
  }
}

}  // namespace projsel
