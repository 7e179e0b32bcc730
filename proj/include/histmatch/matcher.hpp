#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "histmatch/histogram.hpp"
#include "histmatch/metrics.hpp"

namespace histmatch {

/// Stored edge of a left node. For the dot metric `weight` already holds the
/// distance 1 - dot.
struct Edge {
  std::uint32_t right;
  double weight;
};

enum class Execution { kSerial, kParallel };

/// Weight rows for every left histogram, edges sorted by right index.
/// With `prune` and the proposed metric, pairs with disjoint support are
/// omitted. The serial and parallel kernels produce bit-identical rows.
std::vector<std::vector<Edge>> compute_weight_rows(const HistogramSet& left, const HistogramSet& right,
                                                   MetricKind metric, bool prune, Execution execution);

/// Weighted bipartite graph between unlabeled (left) and labeled (right)
/// histograms. Absent pairs are pruned edges that carry `missing_weight()`.
class BipartiteInstance {
 public:
  /// Throws InvalidArgument if either set is empty.
  static BipartiteInstance build(const HistogramSet& left, const HistogramSet& right, MetricKind metric,
                                 bool prune, Execution execution = Execution::kParallel);

  /// Dense instance from a raw cost matrix (rows = left). No histograms are
  /// attached and the metric is unset.
  static BipartiteInstance from_costs(const std::vector<std::vector<double>>& costs);

  std::size_t left_size() const { return n_left_; }
  std::size_t right_size() const { return n_right_; }
  std::optional<MetricKind> metric() const { return metric_; }
  bool pruned() const { return pruned_; }
  bool has_histograms() const { return !left_.empty(); }
  const HistogramSet& left() const { return left_; }
  const HistogramSet& right() const { return right_; }

  /// Distance charged for a pruned pair: the metric's maximal distance.
  double missing_weight() const { return missing_weight_; }

  std::span<const Edge> row(std::size_t left) const { return rows_[left]; }
  std::size_t edge_count() const;
  /// Stored weight of (left, right), or `missing_weight()` when pruned.
  double weight(std::size_t left, std::size_t right) const;
  /// Row-major left_size() x right_size() cost matrix.
  std::vector<double> dense_costs() const;

 private:
  BipartiteInstance() = default;

  HistogramSet left_;
  HistogramSet right_;
  std::size_t n_left_ = 0;
  std::size_t n_right_ = 0;
  std::optional<MetricKind> metric_;
  bool pruned_ = false;
  double missing_weight_ = 0.0;
  std::vector<std::vector<Edge>> rows_;
};

enum class Algorithm { kA1, kA2, kBruteForce, kGreedy };

std::string_view algorithm_name(Algorithm algorithm);

struct MatchedPair {
  std::size_t left;
  std::size_t right;
  double weight;

  bool operator==(const MatchedPair&) const = default;
};

/// Partial injective map from left to right indices; pairs sorted by left.
struct MatchResult {
  std::vector<MatchedPair> pairs;
  double total_weight = 0.0;
  Algorithm algorithm = Algorithm::kA1;
  double runtime_ms = 0.0;

  std::size_t cardinality() const { return pairs.size(); }
};

/// Minimum-weight maximal matching (covers every left node). Requires
/// left_size() <= right_size(); otherwise throws SwapSides. Dense instances
/// use the Hungarian method, pruned ones a sparse min-cost flow.
MatchResult match_min_weight(const BipartiteInstance& instance);

/// Minimum-weight matching with exactly `r` pairs. Throws InvalidCardinality
/// unless 1 <= r <= min(N, N').
MatchResult match_cardinality(const BipartiteInstance& instance, std::size_t r);

/// Exhaustive search over all matchings of cardinality `r` (default
/// min(N, N')). Throws TooLargeForOracle when either side exceeds
/// `kBruteForceLimit`.
inline constexpr std::size_t kBruteForceLimit = 8;
MatchResult match_bruteforce(const BipartiteInstance& instance, std::optional<std::size_t> r = std::nullopt);

/// Repeatedly takes the globally lightest edge between unmatched nodes.
/// Requires left_size() <= right_size().
MatchResult match_greedy(const BipartiteInstance& instance);

/// Generalized log-likelihood of a maximal assignment under the i.i.d. model
/// with string length `sample_count`:
///   -2T * sum over pairs of [H(left) + H(right) + w(left, right)].
/// Throws MetricMismatch unless the instance uses the proposed weight.
double generalized_log_likelihood(const BipartiteInstance& instance, const MatchResult& assignment,
                                  std::uint64_t sample_count);

/// Throws InvalidArgument if `result` repeats a left or right index.
void check_matching(const MatchResult& result, std::size_t n_left, std::size_t n_right);

}  // namespace histmatch
