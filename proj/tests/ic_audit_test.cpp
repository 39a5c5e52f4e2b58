#include "projsel/ic_audit.hpp"

#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace projsel {
namespace {

// Project 0 is on the table iff p_0 <= .5; the agent picks among the table.
GridMechanism reverse_cutoff(std::size_t k) {
  const GridShape shape(2, k);
  return GridMechanism::tabulate(shape, [&](std::span<const int> p, std::span<const int> a) {
    const bool first_on = shape.value(p[0]) <= 0.5;
    return (first_on && a[0] > a[1]) ? 0 : 1;
  });
}

GridMechanism constant(std::size_t n, std::size_t k, std::size_t project) {
  return GridMechanism::tabulate(GridShape(n, k),
                                 [&](auto, auto) { return project; });
}

TEST(AuditTest, CutoffMechanismIsIc) {
  const auto mech = GridMechanism::from_table(cutoff_to_grid(CutoffVector({0.5}), 5));
  const auto report = audit_ic(mech);
  EXPECT_TRUE(report.is_ic());
  EXPECT_FALSE(report.witness().has_value());
}

TEST(AuditTest, ConstantMechanismIsIc) {
  EXPECT_TRUE(audit_ic(constant(2, 5, 1)).is_ic());
  EXPECT_TRUE(audit_ic(constant(3, 3, 2)).is_ic());
}

TEST(AuditTest, ReverseCutoffFailsWithUndersellingWitness) {
  const auto mech = reverse_cutoff(5);
  const auto report = audit_ic(mech);
  ASSERT_FALSE(report.is_ic());
  const auto& w = *report.witness();
  EXPECT_GT(w.truth.profits()[0], 0.5);
  EXPECT_GT(w.truth.payoffs()[0], w.truth.payoffs()[1]);
  EXPECT_LE(w.deviation.profits()[0], 0.5);
  EXPECT_EQ(w.truthful_decision, 1u);
  EXPECT_EQ(w.deviation_decision, 0u);
  EXPECT_GT(w.gain, 0.0);
  EXPECT_TRUE(w.deviation.undersells_only(w.truth));
  EXPECT_TRUE(witness_certifies(mech, w));
  // First in scan order: smallest profit above .5, p_2 = 0, a = (.25, 0),
  // reporting p_1 = 0 with the same payoffs.
  EXPECT_EQ(w.truth, ValueProfile({0.75, 0.0}, {0.25, 0.0}));
  EXPECT_EQ(w.deviation, Report({0.0, 0.0}, {0.25, 0.0}));
}

TEST(AuditTest, BudgetIsEnforced) {
  AuditOptions options;
  options.max_evaluations = 1000;
  EXPECT_THROW(audit_ic(reverse_cutoff(5), options), ResourceLimitError);
  options.sampled_profiles = 100;
  EXPECT_THROW(audit_ic(reverse_cutoff(5), options), ResourceLimitError);
}

TEST(AuditTest, SampledAuditFindsViolationsAndAcceptsIc) {
  AuditOptions options;
  options.sampled_profiles = 400;
  const auto bad = audit_ic(reverse_cutoff(5), options);
  ASSERT_FALSE(bad.is_ic());
  EXPECT_TRUE(witness_certifies(reverse_cutoff(5), *bad.witness()));
  const auto table = GridMechanism::from_table(cutoff_to_grid(CutoffVector({0.25, 0.5}), 4));
  EXPECT_TRUE(audit_ic(table, options).is_ic());
}

TEST(AuditPropertyTest, TableMechanismsAreIc) {
  std::mt19937_64 rng(17);
  for (std::size_t k = 2; k <= 9; ++k) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto table = testing::random_staircase(k, rng).to_table();
      ASSERT_TRUE(audit_ic(GridMechanism::from_table(table)).is_ic()) << "k=" << k;
    }
  }
  for (int trial = 0; trial < 5; ++trial) {
    const auto table = testing::random_table(3, 3, rng);
    ASSERT_TRUE(audit_ic(GridMechanism::from_table(table)).is_ic());
  }
}

TEST(AuditPropertyTest, EveryWitnessIsSelfCertifying) {
  std::mt19937_64 rng(23);
  const GridShape shape(2, 4);
  std::uniform_int_distribution<int> coin(0, 1);
  int failures = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto base = GridMechanism::from_table(testing::random_staircase(4, rng).to_table());
    std::vector<std::uint16_t> flipped(base.decisions().begin(), base.decisions().end());
    for (int f = 0; f < 3; ++f) {
      auto& d = flipped[rng() % flipped.size()];
      d = static_cast<std::uint16_t>(1 - d);
    }
    const GridMechanism mech(shape, flipped);
    const auto report = audit_ic(mech);
    if (!report.is_ic()) {
      ++failures;
      ASSERT_TRUE(witness_certifies(mech, *report.witness()));
    }
  }
  EXPECT_GT(failures, 0);
}

TEST(ExtractTableTest, RecoversCutoff) {
  const auto table = cutoff_to_grid(CutoffVector({0.5}), 5);
  const auto extraction = extract_table_structure(GridMechanism::from_table(table));
  ASSERT_TRUE(extraction.ok());
  EXPECT_EQ(extraction.indicators[0], table.indicator(0));
  EXPECT_TRUE(extraction.indicators[1].is_constant(true));
  const auto recovered = extraction.as_table();
  ASSERT_TRUE(recovered.has_value());
  EXPECT_EQ(*recovered, table);
}

TEST(ExtractTableTest, ConstantMechanism) {
  const auto extraction = extract_table_structure(constant(2, 4, 1));
  ASSERT_TRUE(extraction.ok());
  EXPECT_TRUE(extraction.indicators[0].is_constant(false));
  EXPECT_TRUE(extraction.indicators[1].is_constant(true));
  EXPECT_EQ(extraction.always_on, std::vector<std::size_t>{1});
}

TEST(ExtractTableTest, ConstantNonDefaultProjectIsStillATable) {
  const auto extraction = extract_table_structure(constant(2, 3, 0));
  EXPECT_TRUE(extraction.ok());
  EXPECT_EQ(extraction.always_on, std::vector<std::size_t>{0});
  EXPECT_FALSE(extraction.as_table().has_value());
}

TEST(ExtractTableTest, ReverseCutoffFails) {
  const auto extraction = extract_table_structure(reverse_cutoff(5));
  ASSERT_FALSE(extraction.ok());
  // Extraction puts project 0 on the table everywhere (it is chosen at
  // p = 0), so the first failure is where project 0 is denied despite a
  // higher payoff.
  const auto& bad = *extraction.failure;
  EXPECT_GT(bad.profits()[0], 0.5);
  EXPECT_GT(bad.payoffs()[0], bad.payoffs()[1]);
}

// An IC grid mechanism always yields a successful extraction with monotone
// indicators and some project always on.
TEST(ExtractTablePropertyTest, IcImpliesTable) {
  std::mt19937_64 rng(31);
  for (std::size_t k = 2; k <= 7; ++k) {
    for (int trial = 0; trial < 6; ++trial) {
      const auto table = testing::random_staircase(k, rng).to_table();
      // Break ties toward the highest index instead: still IC, still a table.
      const auto& shape = table.shape();
      const auto mech = GridMechanism::tabulate(
          shape, [&](std::span<const int> p, std::span<const int> a) {
            std::size_t best = 1;
            if (table.indicator(0).at(p) && a[0] > a[1]) best = 0;
            return best;
          });
      ASSERT_TRUE(audit_ic(mech).is_ic());
      const auto extraction = extract_table_structure(mech);
      ASSERT_TRUE(extraction.ok());
      EXPECT_FALSE(extraction.always_on.empty());
    }
  }
}

}  // namespace
}  // namespace projsel
