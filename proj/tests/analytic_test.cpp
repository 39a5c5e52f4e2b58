#include "projsel/analytic.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace projsel {
namespace {

// Test-only oracle: P(d = default) by the subset double sum, literally
// (1/N) sum_k sum_{|S| = k-1} prod_{i in S} c_i / C(N-1, k-1).
double default_probability_by_subsets(const std::vector<double>& leading) {
  const std::size_t m = leading.size();
  const std::size_t n = m + 1;
  std::vector<double> by_size(n, 0.0);
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    double prod = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) prod *= leading[i];
    }
    by_size[static_cast<std::size_t>(__builtin_popcount(mask))] += prod;
  }
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double choose = 1.0;
    for (std::size_t j = 1; j <= s; ++j) choose = choose * static_cast<double>(m - s + j) / j;
    total += by_size[s] / choose;
  }
  return total / static_cast<double>(n);
}

std::vector<double> prob_decision_by_subsets(const CutoffVector& c) {
  std::vector<double> lead(c.values().begin(), c.values().end());
  std::vector<double> out;
  for (std::size_t i = 0; i < lead.size(); ++i) {
    auto zeroed = lead;
    zeroed[i] = 0.0;
    out.push_back((1.0 - lead[i]) * default_probability_by_subsets(zeroed));
  }
  out.push_back(default_probability_by_subsets(lead));
  return out;
}

TEST(PhiTest, ValueAtZeroIsNMinusOne) {
  for (std::size_t n = 2; n <= 50; ++n) EXPECT_DOUBLE_EQ(phi(n, 0.0), n - 1.0);
}

TEST(PhiTest, HalfIsTheRootForTwoProjects) { EXPECT_DOUBLE_EQ(phi(2, 0.5), 0.0); }

TEST(PhiTest, UnitIsASpuriousRoot) {
  for (std::size_t n = 2; n <= 50; ++n) EXPECT_DOUBLE_EQ(phi(n, 1.0), 0.0);
}

TEST(SingleCutoffEuTest, Endpoints) {
  for (std::size_t n = 1; n <= 20; ++n) {
    EXPECT_DOUBLE_EQ(single_cutoff_eu(n, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(single_cutoff_eu(n, 1.0), 0.5);
  }
}

TEST(SingleCutoffEuTest, TwoProjectsAtHalf) {
  EXPECT_NEAR(single_cutoff_eu(2, 0.5), 0.5625, 1e-15);
}

TEST(SingleCutoffEuTest, SeriesBranchIsContinuous) {
  for (std::size_t n : {2u, 10u, 1000u}) {
    const double below = default_choice_probability(n, 1.0 - 1.0001e-6);
    const double above = default_choice_probability(n, 1.0 - 0.9999e-6);
    EXPECT_NEAR(below, above, 1e-6 * n);
    EXPECT_LE(above, 1.0 + 1e-15);
  }
}

TEST(SingleCutoffEuTest, RejectsBadCutoff) {
  EXPECT_THROW(single_cutoff_eu(3, 1.1), std::invalid_argument);
}

TEST(ElementarySymmetricTest, SmallCase) {
  const std::vector<double> x{2.0, 3.0, 5.0};
  const auto e = elementary_symmetric(x);
  ASSERT_EQ(e.size(), 4u);
  EXPECT_DOUBLE_EQ(e[0], 1.0);
  EXPECT_DOUBLE_EQ(e[1], 10.0);
  EXPECT_DOUBLE_EQ(e[2], 31.0);
  EXPECT_DOUBLE_EQ(e[3], 30.0);
}

TEST(BinomialTest, ExactAndLogGammaRegimesAgree) {
  EXPECT_DOUBLE_EQ(binomial(10, 5), 252.0);
  EXPECT_DOUBLE_EQ(binomial(60, 30), 118264581564861424.0);
  for (std::size_t k = 0; k <= 61; ++k) {
    const double pascal = binomial(60, k) + (k > 0 ? binomial(60, k - 1) : 0.0);
    EXPECT_NEAR(binomial(61, k) / pascal, 1.0, 1e-12) << k;
  }
}

TEST(ProbDecisionTest, ZeroCutoffsAreUniform) {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (double p : prob_decision(CutoffVector::single(n, 0.0))) {
      EXPECT_NEAR(p, 1.0 / n, 1e-15);
    }
  }
}

TEST(ProbDecisionTest, SingleCutoffDefaultProbability) {
  for (std::size_t n = 2; n <= 10; ++n) {
    for (double c : {0.1, 0.5, 0.9}) {
      const auto probs = prob_decision(CutoffVector::single(n, c));
      EXPECT_NEAR(probs.back(), (1.0 - std::pow(c, n)) / (n * (1.0 - c)), 1e-13);
    }
  }
}

TEST(ProbDecisionTest, TwoProjectsAtHalf) {
  const auto probs = prob_decision(CutoffVector({0.5}));
  EXPECT_NEAR(probs[0], 0.25, 1e-15);
  EXPECT_NEAR(probs[1], 0.75, 1e-15);
}

TEST(ProbDecisionPropertyTest, MatchesSubsetOracleAndSumsToOne) {
  std::mt19937_64 rng(41);
  for (std::size_t n = 2; n <= 10; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto c = testing::random_cutoffs(n, rng);
      const auto probs = prob_decision(c);
      const auto oracle = prob_decision_by_subsets(c);
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_GE(probs[i], 0.0);
        EXPECT_NEAR(probs[i], oracle[i], 1e-13);
        sum += probs[i];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(MultiCutoffEuTest, EqualCutoffsReduceToSingleCutoff) {
  for (std::size_t n = 2; n <= 10; ++n) {
    for (int j = 0; j <= 100; ++j) {
      const double c = j / 100.0;
      EXPECT_NEAR(multi_cutoff_eu(CutoffVector::single(n, c)), single_cutoff_eu(n, c), 1e-12)
          << "n=" << n << " c=" << c;
    }
  }
}

TEST(MultiCutoffEuTest, ZeroCutoffsGiveHalf) {
  EXPECT_NEAR(multi_cutoff_eu(CutoffVector({0.0, 0.0, 0.0})), 0.5, 1e-15);
}

TEST(MultiCutoffEuTest, HeterogeneousRegression) {
  // Frozen before implementation: subset double sum gives 0.5375; a 10^7
  // sample Monte Carlo run gave 0.537565 (std. error 9.0e-5).
  const double eu = multi_cutoff_eu(CutoffVector({0.9, 0.1}));
  EXPECT_NEAR(eu, 0.5375, 1e-12);
  EXPECT_NEAR(eu, 0.537565, 4 * 9.0e-5);
}

TEST(OptimalCutoffTest, TwoProjects) {
  const auto r = optimal_single_cutoff(2);
  EXPECT_NEAR(r.cutoff, 0.5, 1e-12);
  EXPECT_NEAR(r.expected_utility, 0.5625, 1e-12);
  EXPECT_EQ(r.bracket_sign_changes, 1);
  // The value formula and the direct EU agree at the root.
  EXPECT_NEAR(optimal_value_formula(2, 0.5), single_cutoff_eu(2, 0.5), 1e-15);
}

TEST(OptimalCutoffTest, ToleranceSemantics) {
  const auto coarse = optimal_single_cutoff(2, 1e-3);
  const auto fine = optimal_single_cutoff(2, 1e-12);
  EXPECT_NEAR(coarse.cutoff, fine.cutoff, 1e-3);
  EXPECT_LE(std::fabs(coarse.residual), 1e-3);
  EXPECT_LT(coarse.iterations, fine.iterations);
}

TEST(OptimalCutoffTest, LargeNAsymptotics) {
  const std::size_t n = 10'000;
  const auto r = optimal_single_cutoff(n);
  const double scaled = std::sqrt(static_cast<double>(n)) * (1.0 - r.cutoff);
  EXPECT_GE(scaled, 0.9);
  EXPECT_LE(scaled, 1.1);
  EXPECT_LT(r.cutoff, 1.0);
}

TEST(OptimalCutoffTest, RejectsInvalidInput) {
  EXPECT_THROW(optimal_single_cutoff(1), std::invalid_argument);
  EXPECT_THROW(optimal_single_cutoff(5, 0.0), std::invalid_argument);
}

TEST(OptimalCutoffTest, DerivativeVanishesAtRoot) {
  // Central finite difference of the expected profit, independent of phi.
  for (std::size_t n : {2u, 3u, 7u, 25u, 80u}) {
    const double c = optimal_single_cutoff(n).cutoff;
    const double h = 1e-5;
    const double slope = (single_cutoff_eu(n, c + h) - single_cutoff_eu(n, c - h)) / (2 * h);
    EXPECT_NEAR(slope, 0.0, 1e-7) << n;
    EXPECT_GT(single_cutoff_eu(n, c), single_cutoff_eu(n, c + 1e-3));
    EXPECT_GT(single_cutoff_eu(n, c), single_cutoff_eu(n, c - 1e-3));
  }
}

TEST(GridScanTest, Examples) {
  EXPECT_NEAR(grid_scan_argmax(2, 10'000), 0.5, 1e-4);
  EXPECT_NEAR(grid_scan_argmax(5, 10'000), optimal_single_cutoff(5).cutoff, 2.0 / 10'000);
  EXPECT_DOUBLE_EQ(grid_scan_argmax(2, 3), 0.5);
}

TEST(SymmetryTest, Examples) {
  const auto [a0, b0] = symmetry_in_perturbation(3, 0.4, 0.0, 0, 1);
  EXPECT_NEAR(a0, single_cutoff_eu(3, 0.4), 1e-12);
  EXPECT_NEAR(b0, single_cutoff_eu(3, 0.4), 1e-12);
  const auto [a1, b1] = symmetry_in_perturbation(3, 0.5, 0.2, 0, 1);
  EXPECT_NEAR(a1, b1, 1e-12);
  const auto [a2, b2] = symmetry_in_perturbation(4, 0.3, 0.3, 0, 2);
  EXPECT_NEAR(a2, b2, 1e-12);
  EXPECT_THROW(symmetry_in_perturbation(4, 0.3, 0.1, 1, 1), std::invalid_argument);
  EXPECT_THROW(symmetry_in_perturbation(4, 0.3, 0.1, 0, 3), std::invalid_argument);
}

TEST(SymmetryTest, PerturbationIsQuadraticInT) {
  // EU(t) = a t^2 + b: the second difference is constant and the odd part
  // vanishes.
  for (std::size_t n : {3u, 5u}) {
    auto eu = [n](double t) { return symmetry_in_perturbation(n, 0.5, t, 0, 1).first; };
    const double d1 = eu(0.2) - 2 * eu(0.1) + eu(0.0);
    const double d2 = eu(0.3) - 2 * eu(0.2) + eu(0.1);
    EXPECT_NEAR(d1, d2, 1e-12);
    EXPECT_NEAR(eu(0.17), eu(-0.17), 1e-12);
  }
}

TEST(AnalyticPropertyTest, OptimalCutoffAndValueIncreaseInN) {
  double prev_c = 0.0;
  double prev_eu = 0.0;
  for (std::size_t n = 2; n <= 100; ++n) {
    const auto r = optimal_single_cutoff(n);
    EXPECT_GT(r.cutoff, prev_c) << n;
    EXPECT_GT(r.expected_utility, prev_eu) << n;
    EXPECT_NEAR(r.expected_utility, single_cutoff_eu(n, r.cutoff), 1e-10) << n;
    EXPECT_EQ(r.bracket_sign_changes, 1) << n;
    prev_c = r.cutoff;
    prev_eu = r.expected_utility;
  }
  EXPECT_GT(optimal_single_cutoff(100'000).expected_utility, 0.99);
}

}  // namespace
}  // namespace projsel
