#include "histmatch/histogram.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "histmatch/error.hpp"
#include "test_util.hpp"

namespace histmatch {
namespace {

using testutil::H;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

TEST(BuildHistogramTest, CountsFourSymbols) {
  const std::vector<LocationId> s{"S1", "S1", "S2", "S3"};
  const auto h = build_histogram(s);
  EXPECT_EQ(h, H({{"S1", 0.5}, {"S2", 0.25}, {"S3", 0.25}}));
  EXPECT_EQ(h.sample_count(), 4u);
}

TEST(BuildHistogramTest, SingleSymbolIsPointMass) {
  const std::vector<LocationId> s{"S1"};
  const auto h = build_histogram(s);
  EXPECT_EQ(h.support_count(), 1u);
  EXPECT_EQ(h.mass("S1"), 1.0);
  EXPECT_EQ(h.sample_count(), 1u);
}

TEST(BuildHistogramTest, EmptyStringFails) {
  const std::vector<LocationId> s;
  EXPECT_EQ(code_of([&] { build_histogram(s); }), ErrorCode::kEmptyString);
}

TEST(BuildHistogramTest, MassEqualsIndependentCount) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, 4);
  std::vector<LocationId> s;
  std::map<LocationId, int> counts;
  for (int i = 0; i < 1000; ++i) {
    s.push_back("S" + std::to_string(pick(rng)));
    ++counts[s.back()];
  }
  const auto h = build_histogram(s);
  for (const auto& [loc, c] : counts) EXPECT_EQ(h.mass(loc), static_cast<double>(c) / 1000.0) << loc;
  EXPECT_EQ(h.support_count(), counts.size());
}

TEST(BuildHistogramTest, PermutationInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(0, 30);
  std::vector<LocationId> s;
  for (int i = 0; i < 400; ++i) s.push_back("S" + std::to_string(pick(rng)));
  const auto h = build_histogram(s);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(s.begin(), s.end(), rng);
    EXPECT_EQ(build_histogram(s), h);
  }
}

TEST(BuildHistogramTest, SumsToOneWithPositiveEntries) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> len(1, 300), sym(0, 50);
    std::vector<LocationId> s(static_cast<std::size_t>(len(rng)));
    for (auto& x : s) x = "S" + std::to_string(sym(rng));
    const auto h = build_histogram(s);
    EXPECT_NEAR(h.total_mass(), 1.0, 1e-9);
    for (const auto& e : h.entries()) EXPECT_GT(e.mass, 0.0);
  }
}

TEST(HistogramTest, FromMassesValidates) {
  EXPECT_EQ(code_of([] { H({{"A", 0.5}, {"B", 0.4}}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { H({{"A", -0.5}, {"B", 1.5}}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { H({{"A", 0.5}, {"A", 0.5}}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { H({{"A", 0.0}}); }), ErrorCode::kEmptyString);
  const auto h = H({{"B", 0.5}, {"Z", 0.0}, {"A", 0.5}});
  ASSERT_EQ(h.support_count(), 2u);
  EXPECT_EQ(h.entries()[0].location, "A");
  EXPECT_FALSE(h.contains("Z"));
  EXPECT_EQ(h.mass("Q"), 0.0);
}

TEST(HistogramTest, SquaredNormIsCached) {
  const auto h = H({{"A", 0.75}, {"B", 0.25}});
  EXPECT_DOUBLE_EQ(h.squared_norm(), 0.625);
}

TEST(HistogramSetTest, RejectsDuplicateOwners) {
  HistogramSet set;
  set.add("u1", H({{"A", 1.0}}));
  EXPECT_EQ(code_of([&] { set.add("u1", H({{"B", 1.0}})); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(set.index_of("u1"), 0u);
  EXPECT_FALSE(set.index_of("u2").has_value());
}

TEST(AlphabetTest, UnionOfSupports) {
  HistogramSet a, b;
  a.add("x", H({{"C", 0.5}, {"A", 0.5}}));
  b.add("y", H({{"B", 1.0}}));
  b.add("z", H({{"A", 1.0}}));
  const auto alphabet = Alphabet::from_sets({&a, &b});
  ASSERT_EQ(alphabet.size(), 3u);
  EXPECT_EQ(alphabet.symbols()[0], "A");
  EXPECT_EQ(alphabet.index_of("C"), 2u);
  EXPECT_FALSE(alphabet.index_of("D").has_value());
}

TEST(GroundTruthTest, Injective) {
  GroundTruth t;
  t.add("anon0", "u1");
  EXPECT_EQ(code_of([&] { t.add("anon0", "u2"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { t.add("anon1", "u1"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(t.labeled_for("anon0"), "u1");
  EXPECT_FALSE(t.labeled_for("anon1").has_value());
}

}  // namespace
}  // namespace histmatch
