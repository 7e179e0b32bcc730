#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "histmatch/histogram.hpp"

namespace histmatch {

/// Name of the random number generation scheme, recorded in output metadata:
/// per-user seeds are derived with SplitMix64 and drive std::mt19937_64.
inline constexpr std::string_view kGeneratorName = "splitmix64-derived mt19937_64";

struct PopulationSpec {
  std::size_t n_users = 0;
  std::size_t alphabet_size = 0;
  double concentration = 0.1;  // symmetric Dirichlet parameter
  std::uint64_t seed = 0;
};

struct OverlapSpec {
  std::size_t n_left = 0;
  std::size_t n_right = 0;
  std::size_t r = 0;  // users present in both sets
};

/// Dense per-user location distribution over `synthetic_location(0..M-1)`.
using UserDistribution = std::vector<double>;

/// Location token of the i-th synthetic symbol.
LocationId synthetic_location(std::size_t index);

/// Deterministic seed for (stream, index), independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Draws `n_users` pairwise distinct Dirichlet(alpha, ..., alpha)
/// distributions. Throws InvalidArgument for a non-positive field or when
/// distinct draws cannot be found (e.g. a one-symbol alphabet).
std::vector<UserDistribution> sample_population(const PopulationSpec& spec);

struct SyntheticPair {
  HistogramSet unlabeled;  // left, owners "anon<k>" in random order
  HistogramSet labeled;    // right, owners "user<i>"
  GroundTruth truth;
};

/// Samples independent i.i.d. strings of lengths `t_left` / `t_right` for the
/// chosen users and returns their histograms. `overlap.r` users appear on
/// both sides. Throws InvalidOverlap when the overlap does not fit the
/// population.
SyntheticPair generate_pair(const std::vector<UserDistribution>& population, std::uint64_t t_left,
                            std::uint64_t t_right, const OverlapSpec& overlap, std::uint64_t seed);

/// Histogram of one i.i.d. string of length `length` drawn from
/// `distribution` with the given seed.
Histogram sample_histogram(const UserDistribution& distribution, std::uint64_t length, std::uint64_t seed);

}  // namespace histmatch
