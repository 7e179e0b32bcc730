#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "histmatch/histogram.hpp"

namespace histmatch::testutil {

inline Histogram H(std::initializer_list<std::pair<const char*, double>> masses) {
  std::vector<Histogram::Entry> entries;
  for (const auto& [loc, mass] : masses) entries.push_back({loc, mass});
  return Histogram::from_masses(std::move(entries));
}

inline std::string symbol(std::size_t i) { return "L" + std::to_string(i); }

/// Random point of the simplex over `alphabet` symbols. Each symbol is dropped
/// with probability `zero_prob`; at least one survives.
inline Histogram random_histogram(std::mt19937_64& rng, std::size_t alphabet, double zero_prob = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(alphabet, 0.0);
  bool any = false;
  for (auto& x : w) {
    if (u(rng) >= zero_prob) {
      x = u(rng) + 1e-3;
      any = true;
    }
  }
  if (!any) w[std::uniform_int_distribution<std::size_t>(0, alphabet - 1)(rng)] = 1.0;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<Histogram::Entry> entries;
  for (std::size_t i = 0; i < alphabet; ++i)
    if (w[i] > 0.0) entries.push_back({symbol(i), w[i] / total});
  return Histogram::from_masses(std::move(entries));
}

/// Histogram with support of exactly `support` symbols drawn from `alphabet`.
inline Histogram random_sparse_histogram(std::mt19937_64& rng, std::size_t alphabet, std::size_t support) {
  std::vector<std::size_t> idx(alphabet);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<Histogram::Entry> entries;
  double total = 0.0;
  for (std::size_t k = 0; k < support; ++k) {
    const double w = u(rng);
    entries.push_back({symbol(idx[k]), w});
    total += w;
  }
  for (auto& e : entries) e.mass /= total;
  return Histogram::from_masses(std::move(entries));
}

inline HistogramSet random_set(std::mt19937_64& rng, std::size_t n, std::size_t alphabet, const std::string& prefix,
                               double zero_prob = 0.3) {
  HistogramSet set;
  for (std::size_t i = 0; i < n; ++i) set.add(prefix + std::to_string(i), random_histogram(rng, alphabet, zero_prob));
  return set;
}

/// Dense mass vector over the union of both supports, in a shared order.
inline std::pair<std::vector<double>, std::vector<double>> dense_pair(const Histogram& p, const Histogram& q) {
  std::map<std::string, std::pair<double, double>> all;
  for (const auto& e : p.entries()) all[e.location].first = e.mass;
  for (const auto& e : q.entries()) all[e.location].second = e.mass;
  std::vector<double> a, b;
  for (const auto& [_, v] : all) {
    a.push_back(v.first);
    b.push_back(v.second);
  }
  return {a, b};
}

inline double dense_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

/// 2 H(m) - H(p) - H(q) evaluated densely.
inline double oracle_proposed(const Histogram& p, const Histogram& q) {
  auto [a, b] = dense_pair(p, q);
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
  return 2.0 * dense_entropy(m) - dense_entropy(a) - dense_entropy(b);
}

inline double oracle_l1(const Histogram& p, const Histogram& q) {
  auto [a, b] = dense_pair(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

inline double oracle_dot(const Histogram& p, const Histogram& q) {
  auto [a, b] = dense_pair(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double oracle_cosine(const Histogram& p, const Histogram& q) {
  auto [a, b] = dense_pair(p, q);
  double s = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return 1.0 - s / std::sqrt(na * nb);
}

/// Minimum total over all injective maps of the `r` smallest-cost pairs,
/// enumerating permutations of the right side. Independent of the library.
inline double oracle_min_matching(const std::vector<std::vector<double>>& costs, std::size_t r) {
  const std::size_t n = costs.size();
  const std::size_t m = costs.front().size();
  double best = INFINITY;
  // Every subset of left rows of size r, every ordered choice of r right columns.
  std::vector<std::size_t> cols(m);
  std::iota(cols.begin(), cols.end(), 0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != r) continue;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) rows.push_back(i);
    std::sort(cols.begin(), cols.end());
    do {
      double total = 0.0;
      for (std::size_t k = 0; k < r; ++k) total += costs[rows[k]][cols[k]];
      best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
  }
  return r == 0 ? 0.0 : best;
}

}  // namespace histmatch::testutil
