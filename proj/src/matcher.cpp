#include "histmatch/matcher.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "assignment.hpp"
#include "histmatch/error.hpp"

namespace histmatch {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

MatchResult make_result(const BipartiteInstance& instance,
                        const std::vector<std::pair<std::size_t, std::size_t>>& pairs, Algorithm algorithm) {
  MatchResult result;
  result.algorithm = algorithm;
  result.pairs.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const double w = instance.weight(i, j);
    result.pairs.push_back({i, j, w});
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.left < b.left; });
  for (const auto& p : result.pairs) result.total_weight += p.weight;
  return result;
}

detail::BipartiteFlow make_flow(const BipartiteInstance& instance) {
  detail::BipartiteFlow flow(instance.left_size(), instance.right_size());
  for (std::size_t i = 0; i < instance.left_size(); ++i) {
    const auto row = instance.row(i);
    for (const Edge& e : row) flow.add_edge(i, e.right, e.weight);
    if (row.size() < instance.right_size()) flow.add_hub_edge(i, instance.missing_weight());
  }
  return flow;
}

MatchResult solve_by_flow(const BipartiteInstance& instance, std::size_t r, Algorithm algorithm) {
  auto flow = make_flow(instance);
  for (std::size_t k = 0; k < r; ++k)
    if (!flow.augment()) throw Error(ErrorCode::kInvalidCardinality, "no matching of the requested size");
  return make_result(instance, flow.matching(), algorithm);
}

}  // namespace

BipartiteInstance BipartiteInstance::build(const HistogramSet& left, const HistogramSet& right, MetricKind metric,
                                           bool prune, Execution execution) {
  if (left.empty() || right.empty())
    throw Error(ErrorCode::kInvalidArgument, "both histogram sets must be non-empty");
  BipartiteInstance inst;
  inst.left_ = left;
  inst.right_ = right;
  inst.n_left_ = left.size();
  inst.n_right_ = right.size();
  inst.metric_ = metric;
  inst.pruned_ = prune && metric == MetricKind::kProposed;
  inst.missing_weight_ = metric_max(metric);
  inst.rows_ = compute_weight_rows(left, right, metric, prune, execution);
  return inst;
}

BipartiteInstance BipartiteInstance::from_costs(const std::vector<std::vector<double>>& costs) {
  if (costs.empty() || costs.front().empty())
    throw Error(ErrorCode::kInvalidArgument, "cost matrix must be non-empty");
  BipartiteInstance inst;
  inst.n_left_ = costs.size();
  inst.n_right_ = costs.front().size();
  inst.rows_.resize(inst.n_left_);
  double max_cost = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (costs[i].size() != inst.n_right_)
      throw Error(ErrorCode::kInvalidArgument, "cost matrix rows differ in length");
    for (std::size_t j = 0; j < inst.n_right_; ++j) {
      if (!std::isfinite(costs[i][j]) || costs[i][j] < 0.0)
        throw Error(ErrorCode::kInvalidArgument, "costs must be finite and non-negative");
      inst.rows_[i].push_back({static_cast<std::uint32_t>(j), costs[i][j]});
      max_cost = std::max(max_cost, costs[i][j]);
    }
  }
  inst.missing_weight_ = max_cost;
  return inst;
}

std::size_t BipartiteInstance::edge_count() const {
  std::size_t total = 0;
  for (const auto& row : rows_) total += row.size();
  return total;
}

double BipartiteInstance::weight(std::size_t left, std::size_t right) const {
  const auto& row = rows_[left];
  if (row.size() == n_right_) return row[right].weight;
  auto it = std::lower_bound(row.begin(), row.end(), right,
                             [](const Edge& e, std::size_t r) { return e.right < r; });
  if (it != row.end() && it->right == right) return it->weight;
  return missing_weight_;
}

std::vector<double> BipartiteInstance::dense_costs() const {
  std::vector<double> costs(n_left_ * n_right_, missing_weight_);
  for (std::size_t i = 0; i < n_left_; ++i)
    for (const Edge& e : rows_[i]) costs[i * n_right_ + e.right] = e.weight;
  return costs;
}

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kA1: return "a1";
    case Algorithm::kA2: return "a2";
    case Algorithm::kBruteForce: return "brute";
    case Algorithm::kGreedy: return "greedy";
  }
  return "unknown";
}

MatchResult match_min_weight(const BipartiteInstance& instance) {
  const auto start = Clock::now();
  const std::size_t n = instance.left_size();
  const std::size_t m = instance.right_size();
  if (n > m)
    throw Error(ErrorCode::kSwapSides, "left side (" + std::to_string(n) + ") is larger than right side (" +
                                           std::to_string(m) + "); pass the smaller set as left");

  MatchResult result;
  if (instance.pruned()) {
    result = solve_by_flow(instance, n, Algorithm::kA1);
  } else {
    const auto costs = instance.dense_costs();
    const auto assignment = detail::hungarian(costs, n, m);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(i, assignment[i]);
    result = make_result(instance, pairs, Algorithm::kA1);
  }
  result.runtime_ms = elapsed_ms(start);
  return result;
}

MatchResult match_cardinality(const BipartiteInstance& instance, std::size_t r) {
  const auto start = Clock::now();
  const std::size_t limit = std::min(instance.left_size(), instance.right_size());
  if (r < 1 || r > limit)
    throw Error(ErrorCode::kInvalidCardinality,
                "cardinality " + std::to_string(r) + " outside [1, " + std::to_string(limit) + "]");
  auto result = solve_by_flow(instance, r, Algorithm::kA2);
  result.runtime_ms = elapsed_ms(start);
  return result;
}

MatchResult match_bruteforce(const BipartiteInstance& instance, std::optional<std::size_t> r) {
  const auto start = Clock::now();
  const std::size_t n = instance.left_size();
  const std::size_t m = instance.right_size();
  if (n > kBruteForceLimit || m > kBruteForceLimit)
    throw Error(ErrorCode::kTooLargeForOracle, "brute force is limited to " +
                                                   std::to_string(kBruteForceLimit) + " nodes per side");
  const std::size_t target = r.value_or(std::min(n, m));
  if (target > std::min(n, m))
    throw Error(ErrorCode::kInvalidCardinality, "cardinality exceeds the smaller side");

  const auto costs = instance.dense_costs();
  std::vector<std::pair<std::size_t, std::size_t>> current, best;
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<char> right_used(m, 0);

  // Left nodes are decided in order: skipped, or matched to a free right node.
  auto search = [&](auto&& self, std::size_t i, double total) -> void {
    if (current.size() == target) {
      if (total < best_total) {
        best_total = total;
        best = current;
      }
      return;
    }
    if (i == n || n - i < target - current.size()) return;
    for (std::size_t j = 0; j < m; ++j) {
      if (right_used[j]) continue;
      right_used[j] = 1;
      current.emplace_back(i, j);
      self(self, i + 1, total + costs[i * m + j]);
      current.pop_back();
      right_used[j] = 0;
    }
    self(self, i + 1, total);
  };
  search(search, 0, 0.0);

  auto result = make_result(instance, best, Algorithm::kBruteForce);
  result.runtime_ms = elapsed_ms(start);
  return result;
}

MatchResult match_greedy(const BipartiteInstance& instance) {
  const auto start = Clock::now();
  const std::size_t n = instance.left_size();
  const std::size_t m = instance.right_size();
  if (n > m)
    throw Error(ErrorCode::kSwapSides, "left side is larger than right side; pass the smaller set as left");

  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  edges.reserve(instance.edge_count());
  for (std::size_t i = 0; i < n; ++i)
    for (const Edge& e : instance.row(i)) edges.emplace_back(e.weight, i, e.right);
  std::sort(edges.begin(), edges.end());

  std::vector<char> left_used(n, 0), right_used(m, 0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [w, i, j] : edges) {
    if (pairs.size() == n) break;
    if (left_used[i] || right_used[j]) continue;
    left_used[i] = right_used[j] = 1;
    pairs.emplace_back(i, j);
  }
  // Whatever is left unmatched can only pair through pruned edges, all of
  // which carry the same maximal weight.
  std::size_t next_right = 0;
  for (std::size_t i = 0; i < n && pairs.size() < n; ++i) {
    if (left_used[i]) continue;
    while (right_used[next_right]) ++next_right;
    right_used[next_right] = 1;
    pairs.emplace_back(i, next_right);
  }

  auto result = make_result(instance, pairs, Algorithm::kGreedy);
  result.runtime_ms = elapsed_ms(start);
  return result;
}

double generalized_log_likelihood(const BipartiteInstance& instance, const MatchResult& assignment,
                                  std::uint64_t sample_count) {
  if (instance.metric() != MetricKind::kProposed)
    throw Error(ErrorCode::kMetricMismatch, "the likelihood is defined for the proposed weight only");
  if (!instance.has_histograms())
    throw Error(ErrorCode::kInvalidArgument, "instance carries no histograms");
  if (sample_count == 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be positive");
  if (assignment.pairs.size() != std::min(instance.left_size(), instance.right_size()))
    throw Error(ErrorCode::kInvalidArgument, "assignment is not a maximal matching");
  check_matching(assignment, instance.left_size(), instance.right_size());

  double sum = 0.0;
  for (const auto& p : assignment.pairs)
    sum += shannon_entropy(instance.left().histogram(p.left)) +
           shannon_entropy(instance.right().histogram(p.right)) + instance.weight(p.left, p.right);
  return -2.0 * static_cast<double>(sample_count) * sum;
}

void check_matching(const MatchResult& result, std::size_t n_left, std::size_t n_right) {
  std::vector<char> left_seen(n_left, 0), right_seen(n_right, 0);
  for (const auto& p : result.pairs) {
    if (p.left >= n_left || p.right >= n_right)
      throw Error(ErrorCode::kInvalidArgument, "matched index out of range");
    if (left_seen[p.left] || right_seen[p.right])
      throw Error(ErrorCode::kInvalidArgument, "matching repeats a node");
    left_seen[p.left] = right_seen[p.right] = 1;
  }
}

}  // namespace histmatch
