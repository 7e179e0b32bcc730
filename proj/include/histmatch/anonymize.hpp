#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "histmatch/histogram.hpp"

namespace histmatch {

/// Disjoint clusters covering an owner set, with the centroid released for
/// each cluster.
struct ClusterPartition {
  std::vector<std::vector<OwnerId>> clusters;
  std::vector<Histogram> centroids;

  std::size_t g() const { return clusters.size(); }
  /// Smallest cluster size (0 for an empty partition).
  std::size_t k_achieved() const;
  /// Cluster index per owner, or npos.
  std::size_t cluster_of(std::string_view owner) const;
};

/// Exact arithmetic mean of histograms over the union of their supports.
Histogram centroid(std::span<const Histogram* const> members);

struct Microaggregation {
  ClusterPartition partition;
  HistogramSet released;
};

/// k-anonymizes a histogram set by fixed-size micro-aggregation under the l1
/// distance: the record farthest (l1) from the centroid of the remaining
/// records is grouped with its k-1 nearest neighbours until fewer than 2k
/// records remain, which then form one cluster. Ties go to the lowest index.
/// Throws InvalidK unless 1 <= k <= N.
Microaggregation microaggregate(const HistogramSet& histograms, std::size_t k);

/// Within-cluster l1 distortion divided by the distortion of the single
/// cluster partition, in [0, 1]; 0 when every histogram is identical.
double information_loss(const ClusterPartition& partition, const HistogramSet& histograms);

/// True iff every released histogram equals at least k-1 others.
bool verify_k_anonymity(const HistogramSet& released, std::size_t k);

}  // namespace histmatch
