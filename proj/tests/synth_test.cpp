#include "histmatch/synth.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "gtest/gtest.h"
#include "histmatch/accuracy.hpp"
#include "histmatch/error.hpp"
#include "histmatch/matcher.hpp"
#include "histmatch/metrics.hpp"

namespace histmatch {
namespace {

double dense_entropy(const UserDistribution& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

TEST(SamplePopulationTest, DistributionsSumToOne) {
  for (double alpha : {0.05, 0.1, 1.0, 5.0}) {
    const auto pop = sample_population({40, 30, alpha, 9});
    ASSERT_EQ(pop.size(), 40u);
    for (const auto& p : pop) {
      EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
      for (double x : p) EXPECT_GE(x, 0.0);
    }
  }
}

TEST(SamplePopulationTest, Deterministic) {
  const PopulationSpec spec{25, 50, 0.1, 1234};
  EXPECT_EQ(sample_population(spec), sample_population(spec));
  EXPECT_NE(sample_population(spec), sample_population({25, 50, 0.1, 1235}));
}

TEST(SamplePopulationTest, PerUserDrawsDoNotDependOnPopulationSize) {
  const auto small = sample_population({10, 20, 0.3, 77});
  const auto large = sample_population({30, 20, 0.3, 77});
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i], large[i]);
}

TEST(SamplePopulationTest, PairwiseDistinct) {
  // Two symbols with a tiny alpha often collide at the point masses.
  const auto pop = sample_population({2, 2, 0.01, 5});
  EXPECT_NE(pop[0], pop[1]);
  const auto many = sample_population({200, 20, 0.1, 6});
  EXPECT_EQ(std::set<UserDistribution>(many.begin(), many.end()).size(), many.size());
}

TEST(SamplePopulationTest, SparseHabitRegime) {
  // The expected entropy of a symmetric Dirichlet(0.1) draw over 100 symbols
  // is digamma(11) - digamma(1.1) = 2.7755075...
  constexpr double kExpected = 2.775507529477798;
  const auto pop = sample_population({1000, 100, 0.1, 2024});
  double mean = 0.0;
  for (const auto& p : pop) mean += dense_entropy(p) / 1000.0;
  EXPECT_NEAR(mean, kExpected, 0.05);
  EXPECT_LT(mean, 0.7 * std::log(100.0));
}

TEST(SamplePopulationTest, RejectsBadSpec) {
  EXPECT_THROW(sample_population({0, 10, 0.1, 1}), Error);
  EXPECT_THROW(sample_population({5, 0, 0.1, 1}), Error);
  EXPECT_THROW(sample_population({5, 10, 0.0, 1}), Error);
  EXPECT_THROW(sample_population({2, 1, 0.1, 1}), Error);
}

TEST(GeneratePairTest, LongStringsAreFullyMatched) {
  const auto pop = sample_population({5, 50, 0.1, 3});
  const auto pair = generate_pair(pop, 1000000, 1000000, {5, 5, 5}, 8);
  const auto inst = BipartiteInstance::build(pair.unlabeled, pair.labeled, MetricKind::kProposed, false);
  const auto acc = user_level_accuracy(match_min_weight(inst), pair.unlabeled, pair.labeled, pair.truth);
  EXPECT_EQ(acc.user_level_pct, 100.0);
}

TEST(GeneratePairTest, SingleSampleIsPointMass) {
  const auto pop = sample_population({20, 1000, 0.5, 4});
  const auto pair = generate_pair(pop, 1, 30, {20, 20, 20}, 1);
  for (const auto& item : pair.unlabeled.items()) {
    EXPECT_EQ(item.histogram.support_count(), 1u);
    EXPECT_EQ(item.histogram.sample_count(), 1u);
  }
}

TEST(GeneratePairTest, NoOverlapMeansEmptyTruth) {
  const auto pop = sample_population({10, 20, 0.1, 4});
  const auto pair = generate_pair(pop, 10, 10, {5, 5, 0}, 1);
  EXPECT_TRUE(pair.truth.empty());
  EXPECT_EQ(pair.unlabeled.size(), 5u);
  EXPECT_EQ(pair.labeled.size(), 5u);
  for (const auto& item : pair.unlabeled.items()) EXPECT_FALSE(pair.labeled.index_of(item.owner).has_value());
}

TEST(GeneratePairTest, TruthIsInjectiveWithSizeR) {
  const auto pop = sample_population({70, 40, 0.1, 11});
  for (std::size_t r : {1, 10, 25, 30}) {
    const auto pair = generate_pair(pop, 20, 20, {30, 40, r}, r);
    EXPECT_EQ(pair.truth.size(), r);
    EXPECT_FALSE(pair.unlabeled.labeled());
    EXPECT_TRUE(pair.labeled.labeled());
    std::set<OwnerId> targets;
    for (const auto& [l, lab] : pair.truth.mapping()) {
      EXPECT_TRUE(pair.unlabeled.index_of(l).has_value());
      EXPECT_TRUE(pair.labeled.index_of(lab).has_value());
      targets.insert(lab);
    }
    EXPECT_EQ(targets.size(), r);
  }
}

TEST(GeneratePairTest, InfeasibleOverlap) {
  const auto pop = sample_population({10, 20, 0.1, 4});
  for (const OverlapSpec spec : {OverlapSpec{6, 6, 1}, OverlapSpec{4, 4, 5}, OverlapSpec{0, 3, 0}}) {
    try {
      generate_pair(pop, 10, 10, spec, 1);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidOverlap);
    }
  }
}

TEST(GeneratePairTest, Deterministic) {
  const auto pop = sample_population({30, 40, 0.1, 11});
  const auto a = generate_pair(pop, 50, 70, {20, 25, 15}, 99);
  const auto b = generate_pair(pop, 50, 70, {20, 25, 15}, 99);
  ASSERT_EQ(a.unlabeled.size(), b.unlabeled.size());
  for (std::size_t i = 0; i < a.unlabeled.size(); ++i) {
    EXPECT_EQ(a.unlabeled.owner(i), b.unlabeled.owner(i));
    EXPECT_EQ(a.unlabeled.histogram(i), b.unlabeled.histogram(i));
  }
  for (std::size_t i = 0; i < a.labeled.size(); ++i) EXPECT_EQ(a.labeled.histogram(i), b.labeled.histogram(i));
  EXPECT_EQ(a.truth.mapping(), b.truth.mapping());
}

TEST(GeneratePairTest, HistogramsConvergeWithLength) {
  const auto pop = sample_population({50, 100, 0.1, 12});
  double previous = INFINITY;
  for (std::uint64_t t : {100u, 1000u, 10000u}) {
    const auto pair = generate_pair(pop, t, t, {50, 50, 50}, 5);
    double mean = 0.0;
    for (const auto& [l, r] : pair.truth.mapping())
      mean += weight_l1(pair.unlabeled.histogram(*pair.unlabeled.index_of(l)),
                        pair.labeled.histogram(*pair.labeled.index_of(r))) /
              50.0;
    EXPECT_LT(mean, previous) << "T=" << t;
    previous = mean;
  }
}

TEST(SampleHistogramTest, CountsSumToLength) {
  const UserDistribution p{0.5, 0.0, 0.25, 0.25};
  const auto h = sample_histogram(p, 400, 3);
  EXPECT_EQ(h.sample_count(), 400u);
  EXPECT_FALSE(h.contains(synthetic_location(1)));
  EXPECT_NEAR(h.total_mass(), 1.0, 1e-12);
  EXPECT_THROW(sample_histogram(p, 0, 3), Error);
}

}  // namespace
}  // namespace histmatch
