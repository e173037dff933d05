#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "san/bsttree.hpp"
#include "san/demand.hpp"
#include "san/ledger.hpp"

namespace san {

/// Thrown when a network operation would leave its declared family or break
/// connectivity.
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Constraint a network must satisfy at all times.
struct NetworkFamily {
  enum class Kind { kBoundedDegree, kTree, kUnconstrained };
  Kind kind = Kind::kUnconstrained;
  int degree_cap = 0;  // kBoundedDegree only

  static NetworkFamily bounded_degree(int cap) { return {Kind::kBoundedDegree, cap}; }
  static NetworkFamily tree() { return {Kind::kTree, 0}; }
  static NetworkFamily unconstrained() { return {Kind::kUnconstrained, 0}; }
};

/// Undirected topology over nodes 0..n-1. Connected and family-conforming at
/// all times; validate() is run on construction and after every edit.
class Network {
 public:
  Network(int n, NetworkFamily family);

  int size() const { return n_; }
  const NetworkFamily& family() const { return family_; }

  void add_edge(int u, int v);
  void remove_edge(int u, int v);
  bool has_edge(int u, int v) const;
  int degree(int u) const;
  int max_degree() const;
  std::size_t edge_count() const;
  const std::set<int>& neighbors(int u) const;
  std::vector<std::pair<int, int>> edges() const;  // u < v, sorted

  bool connected() const;
  /// Throws InvariantError("constraint breach") on disconnection or family
  /// violation.
  void validate() const;

 private:
  int n_ = 0;
  NetworkFamily family_;
  std::vector<std::set<int>> adj_;
};

/// A reconfiguration step; applying it costs one unit per listed edge.
struct EdgeEdit {
  std::vector<std::pair<int, int>> additions;
  std::vector<std::pair<int, int>> removals;

  int size() const { return static_cast<int>(additions.size() + removals.size()); }
  void validate() const;  // additions and removals must be disjoint
};

struct EditResult {
  Network net;
  int charge = 0;
};

/// Applies the edit and re-validates the family invariant.
EditResult apply_edit(const Network& net, const EdgeEdit& edit);

// --- constructions ---

/// Simple connected d-regular graph via the pairing model, redrawing until
/// simple and connected. Deterministic per seed. Requires n*d even, d >= 3,
/// n > d.
Network build_random_regular(int n, int d, std::uint64_t seed);

/// side x side grid network (undirected 4-neighbor mesh).
Network make_grid_network(int side);

// --- routing ---

/// BFS hop count from src to dst. Throws if the pair is disconnected.
int route_length(const Network& net, const CommRequest& req);

/// Weight-weighted mean route length over the demand edges.
double avg_route_length(const Network& net, const DemandGraph& g);

std::vector<int> bfs_distances(const Network& net, int src);
int diameter(const Network& net);
double mean_pairwise_distance(const Network& net);

// --- demand-aware fixed network ---

struct EgoTreeBuild {
  Network net;
  int max_degree = 0;
  bool degree_cap_exceeded = false;
  int linking_edges = 0;  // edges added to join demand-disconnected components
  // Per demand edge (u,v): 1 + depth of v in u's ego tree, an upper bound on
  // the route length in the union network.
  std::map<std::pair<int, int>, int> route_bound;
};

/// Union of per-source ego trees: for each source, a weight-balanced tree
/// over its destinations keyed by communication frequency, hung below the
/// source. No degree reduction is performed; if degree_cap is given and
/// exceeded, that is recorded rather than repaired.
EgoTreeBuild build_ego_tree_network(const DemandGraph& g,
                                    std::optional<int> degree_cap = {});

// --- self-adjusting tree network ---

/// Tree network maintained in binary-search-tree order over node ids 1..n.
/// A request (u,v) is served along the current tree path, after which u is
/// splayed to the root of the lowest subtree containing both endpoints and v
/// is splayed to u's side. Service cost is hops before adjusting; adjustment
/// cost is single rotations.
class SelfAdjustingTree {
 public:
  explicit SelfAdjustingTree(BstTree tree) : tree_(std::move(tree)) {}

  /// Returns (service_cost, rotations). Requires u != v, both in 1..n.
  std::pair<int, int> route_and_adjust(const CommRequest& req);

  CostLedger serve(const DemandSequence& seq);

  const BstTree& tree() const { return tree_; }
  Network snapshot() const;  // family = tree

 private:
  BstTree tree_;
};

/// Balanced start when n = 2^k - 1, otherwise the uniform weight-balanced
/// tree (both deterministic).
SelfAdjustingTree build_selfadjusting_tree(int n);
BstTree canonical_start_tree(int n);

// --- network files: "n" header, then "u v" edge lines ---

void write_network(const std::filesystem::path& path, const Network& net);
Network read_network(const std::filesystem::path& path, NetworkFamily family);

}  // namespace san
