#pragma once

// Internal solvers behind the matcher. Not installed.

#include <cstddef>
#include <span>
#include <vector>

namespace histmatch::detail {

/// Rectangular Hungarian method (shortest augmenting paths with potentials)
/// on a row-major `rows x cols` matrix with rows <= cols. Returns the column
/// assigned to each row. O(rows^2 * cols).
std::vector<std::size_t> hungarian(std::span<const double> costs, std::size_t rows, std::size_t cols);

/// Unit-capacity min-cost flow on a bipartite graph, augmented one shortest
/// path at a time (Dijkstra with Johnson potentials). After k augmentations
/// the flow is a minimum-cost matching of cardinality k.
class BipartiteFlow {
 public:
  BipartiteFlow(std::size_t n_left, std::size_t n_right);

  /// Direct arc left -> right.
  void add_edge(std::size_t left, std::size_t right, double cost);
  /// Arc from `left` into a shared hub that reaches every right node at no
  /// further cost. Models all pruned pairs of a row with a single arc.
  void add_hub_edge(std::size_t left, double cost);

  /// Pushes one more unit of flow. Returns false when no augmenting path
  /// exists.
  bool augment();

  /// Current matching as (left, right) pairs sorted by left. Units routed
  /// through the hub are paired in ascending index order.
  std::vector<std::pair<std::size_t, std::size_t>> matching() const;

 private:
  struct Arc {
    std::size_t to;
    std::size_t rev;
    int cap;
    double cost;
  };

  void add_arc(std::size_t from, std::size_t to, int cap, double cost);

  std::size_t n_left_;
  std::size_t n_right_;
  std::size_t source_;
  std::size_t sink_;
  std::size_t hub_;
  bool hub_used_ = false;
  std::vector<std::vector<Arc>> graph_;
  std::vector<double> potential_;
};

}  // namespace histmatch::detail
