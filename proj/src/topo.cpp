#include "san/topo.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace san {

Network::Network(int n, NetworkFamily family) : n_(n), family_(family), adj_(n) {
  if (n < 1) throw std::invalid_argument("network needs n >= 1");
}

void Network::add_edge(int u, int v) {
  if (u == v || u < 0 || v < 0 || u >= n_ || v >= n_) {
    throw std::invalid_argument("bad edge endpoints");
  }
  adj_[u].insert(v);
  adj_[v].insert(u);
}

void Network::remove_edge(int u, int v) {
  if (!has_edge(u, v)) throw std::invalid_argument("edge not present");
  adj_[u].erase(v);
  adj_[v].erase(u);
}

bool Network::has_edge(int u, int v) const {
  if (u < 0 || u >= n_ || v < 0 || v >= n_) return false;
  return adj_[u].count(v) > 0;
}

int Network::degree(int u) const { return static_cast<int>(adj_[u].size()); }

int Network::max_degree() const {
  int best = 0;
  for (int u = 0; u < n_; ++u) best = std::max(best, degree(u));
  return best;
}

std::size_t Network::edge_count() const {
  std::size_t sum = 0;
  for (const auto& nbrs : adj_) sum += nbrs.size();
  return sum / 2;
}

const std::set<int>& Network::neighbors(int u) const { return adj_[u]; }

std::vector<std::pair<int, int>> Network::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edge_count());
  for (int u = 0; u < n_; ++u) {
    for (int v : adj_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

bool Network::connected() const {
  std::vector<char> seen(n_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n_;
}

void Network::validate() const {
  if (!connected()) throw InvariantError("constraint breach: network disconnected");
  switch (family_.kind) {
    case NetworkFamily::Kind::kBoundedDegree:
      if (max_degree() > family_.degree_cap) {
        throw InvariantError("constraint breach: degree cap exceeded");
      }
      break;
    case NetworkFamily::Kind::kTree:
      if (edge_count() != static_cast<std::size_t>(n_) - 1) {
        throw InvariantError("constraint breach: not a tree");
      }
      break;
    case NetworkFamily::Kind::kUnconstrained:
      break;
  }
}

void EdgeEdit::validate() const {
  auto norm = [](std::pair<int, int> e) {
    return e.first < e.second ? e : std::pair<int, int>{e.second, e.first};
  };
  std::set<std::pair<int, int>> add;
  for (auto e : additions) add.insert(norm(e));
  for (auto e : removals) {
    if (add.count(norm(e))) {
      throw std::invalid_argument("edit adds and removes the same edge");
    }
  }
}

EditResult apply_edit(const Network& net, const EdgeEdit& edit) {
  edit.validate();
  EditResult result{net, edit.size()};
  for (auto [u, v] : edit.additions) result.net.add_edge(u, v);
  for (auto [u, v] : edit.removals) result.net.remove_edge(u, v);
  result.net.validate();
  return result;
}

Network build_random_regular(int n, int d, std::uint64_t seed) {
  if (d < 3) throw std::invalid_argument("regular graph needs d >= 3");
  if (n <= d) throw std::invalid_argument("regular graph needs n > d");
  if ((static_cast<long long>(n) * d) % 2 != 0) {
    throw std::invalid_argument("n*d must be even");
  }
  Rng rng(seed);
  std::vector<int> stubs(static_cast<std::size_t>(n) * d);
  for (int u = 0; u < n; ++u) {
    std::fill_n(stubs.begin() + static_cast<std::size_t>(u) * d, d, u);
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    rng.shuffle(stubs);
    Network net(n, NetworkFamily::bounded_degree(d));
    bool simple = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int u = stubs[i], v = stubs[i + 1];
      if (u == v || net.has_edge(u, v)) {
        simple = false;
        break;
      }
      net.add_edge(u, v);
    }
    if (simple && net.connected()) {
      net.validate();
      return net;
    }
  }
  throw std::runtime_error("pairing model failed to produce a simple connected graph");
}

Network make_grid_network(int side) {
  if (side < 2) throw std::invalid_argument("grid requires side >= 2");
  Network net(side * side, NetworkFamily::bounded_degree(4));
  auto id = [side](int row, int col) { return row * side + col; };
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      if (col + 1 < side) net.add_edge(id(row, col), id(row, col + 1));
      if (row + 1 < side) net.add_edge(id(row, col), id(row + 1, col));
    }
  }
  net.validate();
  return net;
}

std::vector<int> bfs_distances(const Network& net, int src) {
  std::vector<int> dist(net.size(), -1);
  std::queue<int> queue;
  dist[src] = 0;
  queue.push(src);
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop();
    for (int v : net.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push(v);
      }
    }
  }
  return dist;
}

int route_length(const Network& net, const CommRequest& req) {
  if (req.src == req.dst) throw std::invalid_argument("route src == dst");
  auto dist = bfs_distances(net, req.src);
  if (dist[req.dst] < 0) throw InvariantError("constraint breach: no route");
  return dist[req.dst];
}

double avg_route_length(const Network& net, const DemandGraph& g) {
  if (g.edges.empty()) throw std::invalid_argument("empty demand graph");
  if (g.n > net.size()) throw std::invalid_argument("demand does not fit network");
  double cost = 0;
  double total = 0;
  auto it = g.edges.begin();
  while (it != g.edges.end()) {
    int u = it->first.first;
    auto dist = bfs_distances(net, u);
    for (; it != g.edges.end() && it->first.first == u; ++it) {
      if (dist[it->first.second] < 0) {
        throw InvariantError("constraint breach: no route");
      }
      cost += it->second * dist[it->first.second];
      total += it->second;
    }
  }
  return cost / total;
}

int diameter(const Network& net) {
  int best = 0;
  for (int u = 0; u < net.size(); ++u) {
    auto dist = bfs_distances(net, u);
    for (int d : dist) {
      if (d < 0) throw InvariantError("constraint breach: network disconnected");
      best = std::max(best, d);
    }
  }
  return best;
}

double mean_pairwise_distance(const Network& net) {
  double sum = 0;
  long long pairs = 0;
  for (int u = 0; u < net.size(); ++u) {
    auto dist = bfs_distances(net, u);
    for (int v = 0; v < net.size(); ++v) {
      if (v == u) continue;
      if (dist[v] < 0) throw InvariantError("constraint breach: network disconnected");
      sum += dist[v];
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

EgoTreeBuild build_ego_tree_network(const DemandGraph& g, std::optional<int> degree_cap) {
  if (g.edges.empty()) throw std::invalid_argument("empty demand graph");
  g.validate();

  Network net(g.n, NetworkFamily::unconstrained());
  EgoTreeBuild build{net, 0, false, 0, {}};

  auto it = g.edges.begin();
  while (it != g.edges.end()) {
    int u = it->first.first;
    std::vector<int> dests;
    std::vector<double> weights;
    for (; it != g.edges.end() && it->first.first == u; ++it) {
      dests.push_back(it->first.second);
      weights.push_back(it->second);
    }
    // Ego tree of u: weight-balanced over the destinations (already in
    // ascending id order), hung below u.
    TreeShape shape = weight_balanced_shape(weights);
    auto depths = shape.depths();
    build.net.add_edge(u, dests[shape.root]);
    for (int i = 0; i < shape.size(); ++i) {
      if (shape.left[i] >= 0) build.net.add_edge(dests[i], dests[shape.left[i]]);
      if (shape.right[i] >= 0) build.net.add_edge(dests[i], dests[shape.right[i]]);
    }
    for (int i = 0; i < shape.size(); ++i) {
      build.route_bound[{u, dests[i]}] = 1 + depths[i];
    }
  }

  // The union covers every demand-adjacent node; nodes or components with no
  // demand between them still need links for the connectivity invariant.
  {
    std::vector<int> comp(build.net.size(), -1);
    std::vector<int> reps;
    for (int u = 0; u < build.net.size(); ++u) {
      if (comp[u] >= 0) continue;
      reps.push_back(u);
      std::vector<int> stack{u};
      comp[u] = u;
      while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y : build.net.neighbors(x)) {
          if (comp[y] < 0) {
            comp[y] = u;
            stack.push_back(y);
          }
        }
      }
    }
    for (std::size_t i = 1; i < reps.size(); ++i) {
      build.net.add_edge(reps[i - 1], reps[i]);
      ++build.linking_edges;
    }
  }

  build.net.validate();
  build.max_degree = build.net.max_degree();
  if (degree_cap && build.max_degree > *degree_cap) {
    build.degree_cap_exceeded = true;
  }
  return build;
}

std::pair<int, int> SelfAdjustingTree::route_and_adjust(const CommRequest& req) {
  int u = req.src, v = req.dst;
  if (u == v) throw std::invalid_argument("request src == dst");
  int n = tree_.size();
  if (u < 1 || u > n || v < 1 || v > n) {
    throw std::invalid_argument("request outside 1..n");
  }

  int lo = std::min(u, v), hi = std::max(u, v);
  // Lowest common subtree root: first node in [lo, hi] on the search path.
  int top = tree_.root();
  int top_depth = 1;
  while (top < lo || top > hi) {
    top = (top < lo) ? tree_.right(top) : tree_.left(top);
    ++top_depth;
  }
  int service = (tree_.depth_nodes(u) - top_depth) + (tree_.depth_nodes(v) - top_depth);

  // Splay u to the top of that subtree, then v to u's side.
  int stop = tree_.parent(top);
  int rotations = tree_.splay_to(u, stop);
  rotations += tree_.splay_to(v, u);
  assert(tree_.inorder_ok());
  assert(tree_.parent(v) == u);
  return {service, rotations};
}

CostLedger SelfAdjustingTree::serve(const DemandSequence& seq) {
  CostLedger ledger;
  for (const auto& req : seq.requests) {
    auto [service, rotations] = route_and_adjust(req);
    ledger.charge(service, rotations);
  }
  return ledger;
}

Network SelfAdjustingTree::snapshot() const {
  // Tree keys 1..n map onto network nodes 0..n-1.
  Network net(tree_.size(), NetworkFamily::tree());
  for (int key = 1; key <= tree_.size(); ++key) {
    if (tree_.parent(key) != 0) net.add_edge(key - 1, tree_.parent(key) - 1);
  }
  net.validate();
  return net;
}

BstTree canonical_start_tree(int n) {
  if (n >= 1 && (n & (n + 1)) == 0) return BstTree::balanced(n);
  std::map<int, double> uniform;
  for (int key = 1; key <= n; ++key) uniform[key] = 1.0;
  return BstTree::weight_balanced(uniform, n);
}

SelfAdjustingTree build_selfadjusting_tree(int n) {
  if (n < 2) throw std::invalid_argument("self-adjusting tree needs n >= 2");
  return SelfAdjustingTree(canonical_start_tree(n));
}

void write_network(const std::filesystem::path& path, const Network& net) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << net.size() << "\n";
  for (auto [u, v] : net.edges()) out << u << " " << v << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Network read_network(const std::filesystem::path& path, NetworkFamily family) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ":1: missing header");
  int n = 0;
  if (std::sscanf(line.c_str(), "%d", &n) != 1) {
    throw std::runtime_error(path.string() + ":1: expected node count");
  }
  Network net(n, family);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    int u = 0, v = 0;
    if (std::sscanf(line.c_str(), "%d %d", &u, &v) != 2) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected \"u v\"");
    }
    net.add_edge(u, v);
  }
  net.validate();
  return net;
}

}  // namespace san
