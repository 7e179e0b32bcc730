#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "histmatch/anonymize.hpp"
#include "histmatch/histogram.hpp"
#include "histmatch/matcher.hpp"

namespace histmatch {

struct AccuracyReport {
  std::size_t n_common = 0;       // |truth|
  std::size_t n_correct = 0;      // matched pairs agreeing with truth
  std::size_t matching_size = 0;  // pairs output by the matcher
  /// 100 * n_correct / n_common; unset when there are no common users.
  std::optional<double> user_level_pct;
  /// 100 * n_correct / matching_size; unset for an empty matching.
  std::optional<double> percentage_accuracy;
  std::optional<double> cluster_level_pct;
};

using OwnerPairs = std::vector<std::pair<OwnerId, OwnerId>>;

/// Resolves matched indices to (left owner, right owner).
OwnerPairs owner_pairs(const MatchResult& result, const HistogramSet& left, const HistogramSet& right);

/// Builds the report from raw counts.
AccuracyReport accuracy_from_counts(std::size_t n_correct, std::size_t matching_size, std::size_t n_common);

AccuracyReport user_level_accuracy(std::span<const std::pair<OwnerId, OwnerId>> matched, const GroundTruth& truth);
AccuracyReport user_level_accuracy(const MatchResult& result, const HistogramSet& left, const HistogramSet& right,
                                   const GroundTruth& truth);

/// Percentage of common users whose matched left owner lies in a cluster
/// whose centroid equals the centroid of the true left owner's cluster.
/// Unset when there are no common users. Throws InvalidArgument when a
/// matched or true left owner is not covered by the partition.
std::optional<double> cluster_level_accuracy(std::span<const std::pair<OwnerId, OwnerId>> matched,
                                             const GroundTruth& truth, const ClusterPartition& partition);

/// Rounds a percentage to one decimal place for reporting.
double round_pct(double pct);

}  // namespace histmatch
