#include "histmatch/accuracy.hpp"

#include <cmath>
#include <map>
#include <string>

#include "histmatch/error.hpp"

namespace histmatch {

OwnerPairs owner_pairs(const MatchResult& result, const HistogramSet& left, const HistogramSet& right) {
  OwnerPairs out;
  out.reserve(result.pairs.size());
  for (const auto& p : result.pairs) out.emplace_back(left.owner(p.left), right.owner(p.right));
  return out;
}

AccuracyReport accuracy_from_counts(std::size_t n_correct, std::size_t matching_size, std::size_t n_common) {
  AccuracyReport report;
  report.n_correct = n_correct;
  report.matching_size = matching_size;
  report.n_common = n_common;
  if (n_common > 0) report.user_level_pct = 100.0 * static_cast<double>(n_correct) / static_cast<double>(n_common);
  if (matching_size > 0)
    report.percentage_accuracy = 100.0 * static_cast<double>(n_correct) / static_cast<double>(matching_size);
  return report;
}

AccuracyReport user_level_accuracy(std::span<const std::pair<OwnerId, OwnerId>> matched, const GroundTruth& truth) {
  std::size_t correct = 0;
  for (const auto& [l, r] : matched) {
    const auto expected = truth.labeled_for(l);
    if (expected && *expected == r) ++correct;
  }
  return accuracy_from_counts(correct, matched.size(), truth.size());
}

AccuracyReport user_level_accuracy(const MatchResult& result, const HistogramSet& left, const HistogramSet& right,
                                   const GroundTruth& truth) {
  const auto pairs = owner_pairs(result, left, right);
  return user_level_accuracy(pairs, truth);
}

std::optional<double> cluster_level_accuracy(std::span<const std::pair<OwnerId, OwnerId>> matched,
                                             const GroundTruth& truth, const ClusterPartition& partition) {
  if (truth.empty()) return std::nullopt;

  std::map<OwnerId, std::size_t, std::less<>> cluster_index;
  for (std::size_t q = 0; q < partition.clusters.size(); ++q)
    for (const auto& owner : partition.clusters[q]) cluster_index.emplace(owner, q);
  auto centroid_for = [&](const OwnerId& owner) -> const Histogram& {
    auto it = cluster_index.find(owner);
    if (it == cluster_index.end()) throw Error(ErrorCode::kInvalidArgument, "owner outside partition: " + owner);
    return partition.centroids.at(it->second);
  };

  std::map<OwnerId, OwnerId, std::less<>> true_left;  // labeled -> unlabeled
  for (const auto& [l, r] : truth.mapping()) true_left.emplace(r, l);

  std::size_t correct = 0;
  for (const auto& [l, r] : matched) {
    auto it = true_left.find(r);
    if (it == true_left.end()) continue;
    if (centroid_for(l) == centroid_for(it->second)) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
}

double round_pct(double pct) { return std::round(pct * 10.0) / 10.0; }

}  // namespace histmatch
