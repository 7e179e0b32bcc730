#include "histmatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "histmatch/error.hpp"

namespace histmatch {

namespace {

constexpr std::uint64_t kPopulationStream = 0;
constexpr std::uint64_t kLeftStream = 1;
constexpr std::uint64_t kRightStream = 2;
constexpr std::uint64_t kSelectionStream = 3;
constexpr std::uint64_t kMaxRedraws = 1000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

UserDistribution draw_dirichlet(std::size_t m, double alpha, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  UserDistribution p(m);
  for (;;) {
    double total = 0.0;
    for (auto& x : p) {
      x = gamma(rng);
      total += x;
    }
    if (total > 0.0 && std::isfinite(total)) {
      for (auto& x : p) x /= total;
      return p;
    }
  }
}

}  // namespace

LocationId synthetic_location(std::size_t index) { return "s" + std::to_string(index); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

std::vector<UserDistribution> sample_population(const PopulationSpec& spec) {
  if (spec.n_users == 0 || spec.alphabet_size == 0 || !(spec.concentration > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "population spec fields must be positive");

  std::vector<UserDistribution> population;
  population.reserve(spec.n_users);
  std::set<UserDistribution> seen;
  for (std::size_t i = 0; i < spec.n_users; ++i) {
    // Re-draw on an exact collision with an earlier user.
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt == kMaxRedraws)
        throw Error(ErrorCode::kInvalidArgument, "cannot draw " + std::to_string(spec.n_users) +
                                                     " distinct distributions for this spec");
      std::mt19937_64 rng(derive_seed(spec.seed, kPopulationStream, (attempt << 32) ^ i));
      auto p = draw_dirichlet(spec.alphabet_size, spec.concentration, rng);
      if (seen.insert(p).second) {
        population.push_back(std::move(p));
        break;
      }
    }
  }
  return population;
}

Histogram sample_histogram(const UserDistribution& distribution, std::uint64_t length, std::uint64_t seed) {
  if (length == 0) throw Error(ErrorCode::kEmptyString, "string length must be positive");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> draw(distribution.begin(), distribution.end());
  std::vector<std::uint64_t> counts(distribution.size(), 0);
  for (std::uint64_t t = 0; t < length; ++t) ++counts[draw(rng)];

  std::vector<std::pair<LocationId, std::uint64_t>> flat;
  for (std::size_t l = 0; l < counts.size(); ++l)
    if (counts[l] > 0) flat.emplace_back(synthetic_location(l), counts[l]);
  return Histogram::from_counts(flat);
}

SyntheticPair generate_pair(const std::vector<UserDistribution>& population, std::uint64_t t_left,
                            std::uint64_t t_right, const OverlapSpec& overlap, std::uint64_t seed) {
  const std::size_t n = population.size();
  if (overlap.r > std::min(overlap.n_left, overlap.n_right) ||
      overlap.n_left + overlap.n_right - overlap.r > n)
    throw Error(ErrorCode::kInvalidOverlap, "overlap does not fit a population of " + std::to_string(n));
  if (overlap.n_left == 0 || overlap.n_right == 0)
    throw Error(ErrorCode::kInvalidOverlap, "both sides need at least one user");
  if (t_left == 0 || t_right == 0) throw Error(ErrorCode::kEmptyString, "string lengths must be positive");

  std::mt19937_64 rng(derive_seed(seed, kSelectionStream, 0));
  std::vector<std::size_t> users(n);
  for (std::size_t i = 0; i < n; ++i) users[i] = i;
  std::shuffle(users.begin(), users.end(), rng);

  const std::size_t r = overlap.r;
  std::vector<std::size_t> left_users(users.begin(), users.begin() + static_cast<std::ptrdiff_t>(overlap.n_left));
  std::vector<std::size_t> right_users(users.begin(), users.begin() + static_cast<std::ptrdiff_t>(r));
  right_users.insert(right_users.end(), users.begin() + static_cast<std::ptrdiff_t>(overlap.n_left),
                     users.begin() + static_cast<std::ptrdiff_t>(overlap.n_left + overlap.n_right - r));
  std::sort(right_users.begin(), right_users.end());
  // The unlabeled side is released in random order.
  std::shuffle(left_users.begin(), left_users.end(), rng);
  const std::set<std::size_t> common(users.begin(), users.begin() + static_cast<std::ptrdiff_t>(r));

  SyntheticPair out;
  out.unlabeled.set_labeled(false);
  out.labeled.set_labeled(true);
  for (std::size_t pos = 0; pos < left_users.size(); ++pos) {
    const std::size_t u = left_users[pos];
    const std::string anon = "anon" + std::to_string(pos);
    out.unlabeled.add(anon, sample_histogram(population[u], t_left, derive_seed(seed, kLeftStream, u)));
    if (common.contains(u)) out.truth.add(anon, "user" + std::to_string(u));
  }
  for (std::size_t u : right_users)
    out.labeled.add("user" + std::to_string(u), sample_histogram(population[u], t_right, derive_seed(seed, kRightStream, u)));
  return out;
}

}  // namespace histmatch
