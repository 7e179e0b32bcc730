#include "assignment.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

namespace histmatch::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<std::size_t> hungarian(std::span<const double> costs, std::size_t rows, std::size_t cols) {
  // 1-based potentials; column 0 is the virtual root of each search tree.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> owner(cols + 1, 0), way(cols + 1, 0);
  std::vector<double> min_slack(cols + 1);
  std::vector<char> used(cols + 1);

  for (std::size_t i = 1; i <= rows; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      const double* row = costs.data() + (i0 - 1) * cols;
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double slack = row[j - 1] - u[i0] - v[j];
        if (slack < min_slack[j]) {
          min_slack[j] = slack;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> assignment(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j)
    if (owner[j] != 0) assignment[owner[j] - 1] = j - 1;
  return assignment;
}

BipartiteFlow::BipartiteFlow(std::size_t n_left, std::size_t n_right)
    : n_left_(n_left),
      n_right_(n_right),
      source_(0),
      sink_(n_left + n_right + 2),
      hub_(n_left + n_right + 1),
      graph_(n_left + n_right + 3),
      potential_(n_left + n_right + 3, 0.0) {
  for (std::size_t i = 0; i < n_left; ++i) add_arc(source_, 1 + i, 1, 0.0);
  for (std::size_t j = 0; j < n_right; ++j) add_arc(1 + n_left + j, sink_, 1, 0.0);
}

void BipartiteFlow::add_arc(std::size_t from, std::size_t to, int cap, double cost) {
  graph_[from].push_back({to, graph_[to].size(), cap, cost});
  graph_[to].push_back({from, graph_[from].size() - 1, 0, -cost});
}

void BipartiteFlow::add_edge(std::size_t left, std::size_t right, double cost) {
  add_arc(1 + left, 1 + n_left_ + right, 1, cost);
}

void BipartiteFlow::add_hub_edge(std::size_t left, double cost) {
  if (!hub_used_) {
    hub_used_ = true;
    for (std::size_t j = 0; j < n_right_; ++j)
      add_arc(hub_, 1 + n_left_ + j, static_cast<int>(n_left_), 0.0);
  }
  add_arc(1 + left, hub_, 1, cost);
}

bool BipartiteFlow::augment() {
  const std::size_t n = graph_.size();
  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> prev_node(n, n), prev_arc(n, 0);
  std::vector<char> done(n, 0);

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source_] = 0.0;
  queue.emplace(0.0, source_);
  while (!queue.empty()) {
    const auto [d, node] = queue.top();
    queue.pop();
    if (done[node]) continue;
    done[node] = 1;
    for (std::size_t a = 0; a < graph_[node].size(); ++a) {
      const Arc& arc = graph_[node][a];
      if (arc.cap <= 0 || done[arc.to]) continue;
      // Reduced costs are non-negative in exact arithmetic.
      const double reduced = std::max(0.0, arc.cost + potential_[node] - potential_[arc.to]);
      const double nd = d + reduced;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        prev_node[arc.to] = node;
        prev_arc[arc.to] = a;
        queue.emplace(nd, arc.to);
      }
    }
  }
  if (dist[sink_] == kInf) return false;

  for (std::size_t v = 0; v < n; ++v)
    if (dist[v] < kInf) potential_[v] += dist[v];

  for (std::size_t v = sink_; v != source_; v = prev_node[v]) {
    Arc& arc = graph_[prev_node[v]][prev_arc[v]];
    arc.cap -= 1;
    graph_[v][arc.rev].cap += 1;
  }
  return true;
}

std::vector<std::pair<std::size_t, std::size_t>> BipartiteFlow::matching() const {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> hub_lefts, hub_rights;
  const std::size_t right_begin = 1 + n_left_;
  for (std::size_t i = 0; i < n_left_; ++i) {
    for (const Arc& arc : graph_[1 + i]) {
      // Forward arcs out of a left node have positive original capacity;
      // a saturated one carries the unit of flow.
      if (arc.cap != 0 || arc.to == source_) continue;
      if (arc.to == hub_)
        hub_lefts.push_back(i);
      else if (arc.to >= right_begin && arc.to < right_begin + n_right_)
        pairs.emplace_back(i, arc.to - right_begin);
    }
  }
  if (hub_used_) {
    for (const Arc& arc : graph_[hub_]) {
      if (arc.to < right_begin || arc.to >= right_begin + n_right_) continue;
      const int flow = static_cast<int>(n_left_) - arc.cap;
      if (flow > 0) hub_rights.push_back(arc.to - right_begin);
    }
  }
  for (std::size_t k = 0; k < hub_lefts.size() && k < hub_rights.size(); ++k)
    pairs.emplace_back(hub_lefts[k], hub_rights[k]);
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace histmatch::detail
