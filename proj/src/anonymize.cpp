#include "histmatch/anonymize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>

#include "histmatch/error.hpp"
#include "histmatch/metrics.hpp"

namespace histmatch {

namespace {

// l1 distance between a histogram and the dense-keyed vector `sum / count`.
double l1_to_scaled(const Histogram& h, const std::map<LocationId, double>& sum, double count) {
  double total = 0.0;
  auto it = sum.begin();
  for (const auto& e : h.entries()) {
    for (; it != sum.end() && it->first < e.location; ++it) total += std::abs(it->second / count);
    if (it != sum.end() && it->first == e.location) {
      total += std::abs(e.mass - it->second / count);
      ++it;
    } else {
      total += e.mass;
    }
  }
  for (; it != sum.end(); ++it) total += std::abs(it->second / count);
  return total;
}

std::vector<std::size_t> member_indices(const std::vector<OwnerId>& owners, const HistogramSet& set) {
  std::vector<std::size_t> out;
  out.reserve(owners.size());
  for (const auto& o : owners) {
    auto idx = set.index_of(o);
    if (!idx) throw Error(ErrorCode::kInvalidArgument, "partition owner not in histogram set: " + o);
    out.push_back(*idx);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Histogram centroid_of(const HistogramSet& set, const std::vector<std::size_t>& indices) {
  std::vector<const Histogram*> members;
  members.reserve(indices.size());
  for (std::size_t i : indices) members.push_back(&set.histogram(i));
  return centroid(members);
}

}  // namespace

std::size_t ClusterPartition::k_achieved() const {
  if (clusters.empty()) return 0;
  std::size_t k = std::numeric_limits<std::size_t>::max();
  for (const auto& c : clusters) k = std::min(k, c.size());
  return k;
}

std::size_t ClusterPartition::cluster_of(std::string_view owner) const {
  for (std::size_t q = 0; q < clusters.size(); ++q)
    if (std::find(clusters[q].begin(), clusters[q].end(), owner) != clusters[q].end()) return q;
  return std::string::npos;
}

Histogram centroid(std::span<const Histogram* const> members) {
  if (members.empty()) throw Error(ErrorCode::kInvalidArgument, "centroid of an empty cluster");
  std::map<LocationId, double> sum;
  for (const Histogram* h : members)
    for (const auto& e : h->entries()) sum[e.location] += e.mass;
  const auto n = static_cast<double>(members.size());
  std::vector<Histogram::Entry> entries;
  entries.reserve(sum.size());
  for (const auto& [location, mass] : sum) entries.push_back({location, mass / n});
  return Histogram::from_masses(std::move(entries), 0, kMassTolerance, /*renormalize=*/false);
}

Microaggregation microaggregate(const HistogramSet& histograms, std::size_t k) {
  const std::size_t n = histograms.size();
  if (k < 1 || k > n)
    throw Error(ErrorCode::kInvalidK, "k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");

  std::vector<std::size_t> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = i;
  std::map<LocationId, double> running_sum;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& e : histograms.histogram(i).entries()) running_sum[e.location] += e.mass;

  std::vector<std::vector<std::size_t>> groups;
  while (remaining.size() >= 2 * k) {
    const auto count = static_cast<double>(remaining.size());
    std::size_t far = remaining.front();
    double far_distance = -1.0;
    for (std::size_t i : remaining) {
      const double d = l1_to_scaled(histograms.histogram(i), running_sum, count);
      if (d > far_distance) {
        far_distance = d;
        far = i;
      }
    }

    std::vector<std::pair<double, std::size_t>> by_distance;
    by_distance.reserve(remaining.size());
    for (std::size_t i : remaining)
      if (i != far) by_distance.emplace_back(weight_l1(histograms.histogram(far), histograms.histogram(i)), i);
    std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(k - 1),
                      by_distance.end());

    std::vector<std::size_t> group{far};
    for (std::size_t t = 0; t + 1 < k; ++t) group.push_back(by_distance[t].second);
    std::sort(group.begin(), group.end());
    for (std::size_t i : group) {
      for (const auto& e : histograms.histogram(i).entries()) {
        auto it = running_sum.find(e.location);
        it->second -= e.mass;
        if (std::abs(it->second) < 1e-14) running_sum.erase(it);
      }
    }
    std::erase_if(remaining, [&](std::size_t i) { return std::binary_search(group.begin(), group.end(), i); });
    groups.push_back(std::move(group));
  }
  if (!remaining.empty()) groups.push_back(remaining);

  Microaggregation out;
  std::vector<Histogram> released_by_index(n, histograms.histogram(0));
  for (const auto& group : groups) {
    std::vector<OwnerId> owners;
    for (std::size_t i : group) owners.push_back(histograms.owner(i));
    Histogram c = centroid_of(histograms, group);
    for (std::size_t i : group) released_by_index[i] = c;
    out.partition.clusters.push_back(std::move(owners));
    out.partition.centroids.push_back(std::move(c));
  }
  out.released.set_labeled(histograms.labeled());
  for (std::size_t i = 0; i < n; ++i) out.released.add(histograms.owner(i), std::move(released_by_index[i]));
  return out;
}

double information_loss(const ClusterPartition& partition, const HistogramSet& histograms) {
  std::size_t covered = 0;
  double within = 0.0;
  for (const auto& cluster : partition.clusters) {
    const auto indices = member_indices(cluster, histograms);
    covered += indices.size();
    const Histogram c = centroid_of(histograms, indices);
    for (std::size_t i : indices) within += weight_l1(histograms.histogram(i), c);
  }
  if (covered != histograms.size())
    throw Error(ErrorCode::kInvalidArgument, "partition does not cover the histogram set");

  std::vector<std::size_t> all(histograms.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Histogram grand = centroid_of(histograms, all);
  double total = 0.0;
  for (std::size_t i : all) total += weight_l1(histograms.histogram(i), grand);
  if (total == 0.0) return 0.0;
  return std::clamp(within / total, 0.0, 1.0);
}

bool verify_k_anonymity(const HistogramSet& released, std::size_t k) {
  if (k <= 1) return true;
  std::vector<std::size_t> order(released.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto entry_less = [&](std::size_t a, std::size_t b) {
    const auto ea = released.histogram(a).entries();
    const auto eb = released.histogram(b).entries();
    return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end(),
                                        [](const Histogram::Entry& x, const Histogram::Entry& y) {
                                          return std::tie(x.location, x.mass) < std::tie(y.location, y.mass);
                                        });
  };
  std::sort(order.begin(), order.end(), entry_less);
  std::size_t run = 0;
  for (std::size_t t = 0; t < order.size(); ++t) {
    const bool same = t > 0 && released.histogram(order[t]) == released.histogram(order[t - 1]);
    if (!same) {
      if (t > 0 && run < k) return false;
      run = 0;
    }
    ++run;
  }
  return order.empty() || run >= k;
}

}  // namespace histmatch
