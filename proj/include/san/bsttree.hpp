#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "san/ledger.hpp"

namespace san {

/// Cost of one tree access: nodes on the root-to-key search path (the root
/// itself costs 1), plus single rotations performed while readjusting.
struct AccessResult {
  int service_cost = 0;
  int rotations = 0;
};

enum class ServePolicy { kFixed, kSplay };

/// Tree structure over items 0..k-1 in index space; -1 marks an absent child.
/// Used by the construction rules, which are shared with the ego-tree builder.
struct TreeShape {
  int root = -1;
  std::vector<int> left;
  std::vector<int> right;

  int size() const { return static_cast<int>(left.size()); }
  // Depth in edges of every item (root = 0).
  std::vector<int> depths() const;
};

/// Min-max balancing rule: the root of every subrange is the item minimizing
/// the larger of the two side weights, ties to the smaller index. Weights may
/// be zero; the range total may not be normalized.
TreeShape weight_balanced_shape(std::span<const double> weights);

/// Exact optimum of sum(w_i * nodes_on_path(i)) over all tree shapes, by the
/// interval dynamic program with the classic root-window speedup. Ties break
/// toward the smaller root index.
TreeShape optimal_shape(std::span<const double> weights);

/// Binary search tree over keys 1..n. Searches and rotations only; the key
/// set never changes.
class BstTree {
 public:
  /// Complete balanced tree; n must be 2^k - 1.
  static BstTree balanced(int n);

  /// Exactly optimal fixed tree for the given access weights (interval DP).
  /// Map entries must be positive; keys absent from the map get weight zero.
  /// The tree spans keys 1..n (n defaults to the largest weighted key).
  static BstTree optimal(const std::map<int, double>& weights, int n = 0);

  /// Approximately optimal fixed tree built by the min-max balancing rule.
  static BstTree weight_balanced(const std::map<int, double>& weights, int n = 0);

  /// Keys 1..shape.size() arranged per the shape.
  static BstTree from_shape(const TreeShape& shape);

  int size() const { return n_; }
  int root() const { return root_; }
  int left(int key) const { return left_[key]; }
  int right(int key) const { return right_[key]; }
  int parent(int key) const { return parent_[key]; }

  /// Nodes on the root->key search path. Key must be in 1..n.
  int depth_nodes(int key) const;

  /// Splays key to the root; returns the pre-splay path cost and the number
  /// of single rotations performed.
  AccessResult splay_access(int key);

  /// Splays key upward until its parent is stop_parent (0 = all the way to
  /// the root). Returns rotations. Exposed for the self-adjusting tree
  /// network, which splays within subtrees.
  int splay_to(int key, int stop_parent);

  /// In-order traversal yields 1..n. Every mutation must preserve this.
  bool inorder_ok() const;

  /// One line per key: "key parent left right" (0 = absent), keys ascending.
  std::string dump() const;

  /// sum(p_i * depth_nodes(i)) with p the normalized weights.
  double expected_cost(const std::map<int, double>& weights) const;

  friend bool operator==(const BstTree&, const BstTree&) = default;

 private:
  BstTree() = default;
  void check_key(int key) const;
  int rotate_up(int x);

  int n_ = 0;
  int root_ = 0;
  // Indexed by key, entry 0 unused; 0 = no link.
  std::vector<int> left_, right_, parent_;
};

/// Serves a destination list. kFixed charges the search path only; kSplay
/// additionally splays each accessed key to the root and charges rotations.
CostLedger serve_sequence(BstTree& tree, ServePolicy policy,
                          std::span<const int> destinations);

/// Dense weight vector (index = key - 1) from a sparse positive weight map.
/// Throws std::invalid_argument on nonpositive entries or keys outside 1..n.
std::vector<double> dense_weights(const std::map<int, double>& weights, int n = 0);

}  // namespace san
