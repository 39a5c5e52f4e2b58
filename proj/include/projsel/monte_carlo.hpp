#pragma once

// Seeded Monte Carlo estimation of expected principal profit and agent payoff
// under iid Uniform[0,1] profiles. Sample s always draws its 2N uniforms from
// CounterRng(seed, s), and chunk statistics are merged in chunk order, so the
// estimate is bit-identical for any thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "projsel/core.hpp"
#include "projsel/random.hpp"

namespace projsel {

struct EstimateWithError {
  double mean;
  double std_error;
  std::uint64_t n_samples;
  std::uint64_t seed;
};

// Environment variable capping the worker threads used by estimators.
inline constexpr const char* kThreadsEnvVar = "PROJSEL_THREADS";

inline std::size_t worker_count() {
  if (const char* env = std::getenv(kThreadsEnvVar)) {
    const long requested = std::strtol(env, nullptr, 10);
    if (requested >= 1) return static_cast<std::size_t>(requested);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

// Welford accumulator with Chan's pairwise merge.
class RunningStats {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(count_ + other.count_);
    const double delta = other.mean_ - mean_;
    mean_ += delta * static_cast<double>(other.count_) / total;
    m2_ += other.m2_ + delta * delta * static_cast<double>(count_) *
                           static_cast<double>(other.count_) / total;
    count_ += other.count_;
  }

  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double std_error() const {
    return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline constexpr std::uint64_t kSamplesPerChunk = 1 << 15;

// Mean and standard error of statistic(p, a) over n_samples iid uniform
// profiles of dimension n. `threads` = 0 picks worker_count().
template <class Statistic>
EstimateWithError estimate_statistic(std::size_t n, Statistic&& statistic,
                                     std::uint64_t n_samples, std::uint64_t seed,
                                     std::size_t threads = 0) {
  if (n == 0) throw std::invalid_argument("need N >= 1");
  if (n_samples < 2) throw std::invalid_argument("need at least 2 samples");
  const std::uint64_t chunks = (n_samples + kSamplesPerChunk - 1) / kSamplesPerChunk;
  std::vector<RunningStats> partial(chunks);

  auto run_chunk = [&](std::uint64_t chunk) {
    std::vector<double> p(n), a(n);
    RunningStats stats;
    const std::uint64_t begin = chunk * kSamplesPerChunk;
    const std::uint64_t end = std::min(n_samples, begin + kSamplesPerChunk);
    for (std::uint64_t s = begin; s < end; ++s) {
      CounterRng rng(seed, s);
      for (auto& x : p) x = rng.uniform();
      for (auto& x : a) x = rng.uniform();
      stats.add(statistic(std::span<const double>(p), std::span<const double>(a)));
    }
    partial[chunk] = stats;
  };

  const std::size_t workers =
      std::min<std::uint64_t>(threads == 0 ? worker_count() : threads, chunks);
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) run_chunk(c);
      });
    }
  }

  RunningStats total;
  for (const auto& s : partial) total.merge(s);
  return {total.mean(), total.std_error(), n_samples, seed};
}

// Continuous-space cutoff rule: the agent's favorite among
// {i < N-1 : p_i >= c_i} and the default project.
inline auto cutoff_rule(const CutoffVector& cutoffs) {
  return [c = cutoffs.with_default()](std::span<const double> p,
                                      std::span<const double> a) {
    std::size_t best = c.size() - 1;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      if (p[i] >= c[i] && (a[i] > a[best] || (a[i] == a[best] && i < best))) {
        best = i;
      }
    }
    return best;
  };
}

// A grid table evaluated as a step function: continuous profits are floored
// to the grid before the indicators are read.
inline auto table_rule(const TableMechanismGrid& table) {
  return [&table](std::span<const double> p, std::span<const double> a) {
    const auto k = static_cast<double>(table.grid_resolution() - 1);
    std::vector<int> idx(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      idx[i] = static_cast<int>(std::floor(p[i] * k));
    }
    return decide_table_at(table, idx, a);
  };
}

// rule(p, a) -> chosen project; estimates E[p_d].
template <class Rule>
EstimateWithError estimate_eu(std::size_t n, Rule&& rule, std::uint64_t n_samples,
                              std::uint64_t seed, std::size_t threads = 0) {
  return estimate_statistic(
      n,
      [&rule](std::span<const double> p, std::span<const double> a) {
        return p[rule(p, a)];
      },
      n_samples, seed, threads);
}

inline EstimateWithError estimate_eu(const CutoffVector& cutoffs,
                                     std::uint64_t n_samples, std::uint64_t seed,
                                     std::size_t threads = 0) {
  return estimate_eu(cutoffs.n_projects(), cutoff_rule(cutoffs), n_samples, seed,
                     threads);
}

inline EstimateWithError estimate_eu(const TableMechanismGrid& table,
                                     std::uint64_t n_samples, std::uint64_t seed,
                                     std::size_t threads = 0) {
  return estimate_eu(table.n_projects(), table_rule(table), n_samples, seed,
                     threads);
}

// Estimates E[a_d].
template <class Rule>
EstimateWithError estimate_agent_payoff(std::size_t n, Rule&& rule,
                                        std::uint64_t n_samples, std::uint64_t seed,
                                        std::size_t threads = 0) {
  return estimate_statistic(
      n,
      [&rule](std::span<const double> p, std::span<const double> a) {
        return a[rule(p, a)];
      },
      n_samples, seed, threads);
}

inline EstimateWithError estimate_agent_payoff(const CutoffVector& cutoffs,
                                               std::uint64_t n_samples,
                                               std::uint64_t seed,
                                               std::size_t threads = 0) {
  return estimate_agent_payoff(cutoffs.n_projects(), cutoff_rule(cutoffs),
                               n_samples, seed, threads);
}

inline EstimateWithError estimate_agent_payoff(const TableMechanismGrid& table,
                                               std::uint64_t n_samples,
                                               std::uint64_t seed,
                                               std::size_t threads = 0) {
  return estimate_agent_payoff(table.n_projects(), table_rule(table), n_samples,
                               seed, threads);
}

}  // namespace projsel
