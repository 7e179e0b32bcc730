#include <cstdint>
#include <vector>

#include "histmatch/matcher.hpp"

namespace histmatch {

namespace {

std::vector<Edge> compute_row(const Histogram& p, const HistogramSet& right, MetricKind metric, bool prune) {
  std::vector<Edge> row;
  row.reserve(right.size());
  for (std::size_t j = 0; j < right.size(); ++j) {
    const Histogram& q = right.histogram(j);
    if (prune && !supports_overlap(p, q)) continue;
    double w = evaluate_metric(metric, p, q);
    if (is_similarity(metric)) w = 1.0 - w;
    row.push_back({static_cast<std::uint32_t>(j), w});
  }
  return row;
}

}  // namespace

std::vector<std::vector<Edge>> compute_weight_rows(const HistogramSet& left, const HistogramSet& right,
                                                   MetricKind metric, bool prune, Execution execution) {
  const bool do_prune = prune && metric == MetricKind::kProposed;
  const auto n = static_cast<std::int64_t>(left.size());
  std::vector<std::vector<Edge>> rows(left.size());

  if (execution == Execution::kSerial) {
    for (std::int64_t i = 0; i < n; ++i) rows[i] = compute_row(left.histogram(i), right, metric, do_prune);
    return rows;
  }

#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) rows[i] = compute_row(left.histogram(i), right, metric, do_prune);
  return rows;
}

}  // namespace histmatch
