#include "san/bsttree.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace san {

std::vector<int> TreeShape::depths() const {
  std::vector<int> d(left.size(), 0);
  std::vector<int> stack;
  if (root >= 0) stack.push_back(root);
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    if (left[x] >= 0) {
      d[left[x]] = d[x] + 1;
      stack.push_back(left[x]);
    }
    if (right[x] >= 0) {
      d[right[x]] = d[x] + 1;
      stack.push_back(right[x]);
    }
  }
  return d;
}

namespace {

void check_weights(std::span<const double> w) {
  if (w.empty()) throw std::invalid_argument("no weights");
  for (double x : w) {
    if (x < 0 || !std::isfinite(x)) throw std::invalid_argument("negative weight");
  }
}

}  // namespace

TreeShape weight_balanced_shape(std::span<const double> w) {
  check_weights(w);
  int k = static_cast<int>(w.size());
  std::vector<double> prefix(k + 1, 0.0);
  for (int i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + w[i];

  TreeShape shape;
  shape.left.assign(k, -1);
  shape.right.assign(k, -1);

  struct Range {
    int lo, hi, parent;
    bool is_left;
  };
  std::vector<Range> work{{0, k - 1, -1, false}};
  while (!work.empty()) {
    Range range = work.back();
    work.pop_back();
    const int lo = range.lo, hi = range.hi;
    if (lo > hi) continue;

    auto left_w = [&](int r) { return prefix[r] - prefix[lo]; };
    auto right_w = [&](int r) { return prefix[hi + 1] - prefix[r + 1]; };

    // left_w - right_w is nondecreasing in r; find the crossing point.
    int a = lo, b = hi;
    while (a < b) {
      int mid = (a + b) / 2;
      if (left_w(mid) >= right_w(mid)) {
        b = mid;
      } else {
        a = mid + 1;
      }
    }
    int cross = a;
    int root = cross;
    if (cross > lo) {
      double f_before = std::max(left_w(cross - 1), right_w(cross - 1));
      double f_cross = std::max(left_w(cross), right_w(cross));
      if (f_before <= f_cross) {
        // The minimum sits in the prefix where max(L,R) == R, which is
        // nonincreasing; take the leftmost r reaching it.
        a = lo;
        b = cross - 1;
        while (a < b) {
          int mid = (a + b) / 2;
          if (right_w(mid) <= f_before) {
            b = mid;
          } else {
            a = mid + 1;
          }
        }
        root = a;
      }
    }

    if (range.parent < 0) {
      shape.root = root;
    } else if (range.is_left) {
      shape.left[range.parent] = root;
    } else {
      shape.right[range.parent] = root;
    }
    work.push_back({lo, root - 1, root, true});
    work.push_back({root + 1, hi, root, false});
  }
  return shape;
}

TreeShape optimal_shape(std::span<const double> w) {
  check_weights(w);
  int k = static_cast<int>(w.size());
  std::vector<double> prefix(k + 1, 0.0);
  for (int i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + w[i];

  // Half-open ranges [i, j): e holds the optimal weighted node-path cost,
  // root the smallest optimal root. Window bounds per Knuth/Yao.
  std::vector<double> e(static_cast<std::size_t>(k + 1) * (k + 1), 0.0);
  std::vector<int> root(static_cast<std::size_t>(k + 1) * (k + 1), 0);
  auto E = [&](int i, int j) -> double& { return e[static_cast<std::size_t>(i) * (k + 1) + j]; };
  auto R = [&](int i, int j) -> int& { return root[static_cast<std::size_t>(i) * (k + 1) + j]; };

  for (int len = 1; len <= k; ++len) {
    for (int i = 0; i + len <= k; ++i) {
      int j = i + len;
      int lo = (len == 1) ? i : R(i, j - 1);
      int hi = (len == 1) ? i : R(i + 1, j);
      if (lo > hi) {  // rounding upset the window; fall back to the full range
        lo = i;
        hi = j - 1;
      }
      double best = std::numeric_limits<double>::infinity();
      int best_r = lo;
      for (int r = lo; r <= hi; ++r) {
        double c = E(i, r) + E(r + 1, j);
        if (c < best) {
          best = c;
          best_r = r;
        }
      }
      E(i, j) = best + (prefix[j] - prefix[i]);
      R(i, j) = best_r;
    }
  }

  TreeShape shape;
  shape.left.assign(k, -1);
  shape.right.assign(k, -1);
  struct Range {
    int i, j, parent;
    bool is_left;
  };
  std::vector<Range> work{{0, k, -1, false}};
  while (!work.empty()) {
    auto [i, j, parent, is_left] = work.back();
    work.pop_back();
    if (i >= j) continue;
    int r = R(i, j);
    if (parent < 0) {
      shape.root = r;
    } else if (is_left) {
      shape.left[parent] = r;
    } else {
      shape.right[parent] = r;
    }
    work.push_back({i, r, r, true});
    work.push_back({r + 1, j, r, false});
  }
  return shape;
}

std::vector<double> dense_weights(const std::map<int, double>& weights, int n) {
  if (weights.empty()) throw std::invalid_argument("no weights");
  int max_key = weights.rbegin()->first;
  if (n == 0) n = max_key;
  if (max_key > n || weights.begin()->first < 1) {
    throw std::invalid_argument("weight key outside 1..n");
  }
  std::vector<double> dense(n, 0.0);
  for (const auto& [key, w] : weights) {
    if (!(w > 0)) throw std::invalid_argument("nonpositive weight");
    dense[key - 1] = w;
  }
  return dense;
}

BstTree BstTree::from_shape(const TreeShape& shape) {
  BstTree t;
  t.n_ = shape.size();
  if (t.n_ < 1) throw std::invalid_argument("empty shape");
  t.left_.assign(t.n_ + 1, 0);
  t.right_.assign(t.n_ + 1, 0);
  t.parent_.assign(t.n_ + 1, 0);
  t.root_ = shape.root + 1;
  for (int i = 0; i < t.n_; ++i) {
    int key = i + 1;
    if (shape.left[i] >= 0) {
      t.left_[key] = shape.left[i] + 1;
      t.parent_[shape.left[i] + 1] = key;
    }
    if (shape.right[i] >= 0) {
      t.right_[key] = shape.right[i] + 1;
      t.parent_[shape.right[i] + 1] = key;
    }
  }
  if (!t.inorder_ok()) throw std::logic_error("shape is not a search tree");
  return t;
}

BstTree BstTree::balanced(int n) {
  if (n < 1 || (n & (n + 1)) != 0) {
    throw std::invalid_argument("balanced tree needs n = 2^k - 1");
  }
  TreeShape shape;
  shape.left.assign(n, -1);
  shape.right.assign(n, -1);
  struct Range {
    int lo, hi, parent;
    bool is_left;
  };
  std::vector<Range> work{{0, n - 1, -1, false}};
  while (!work.empty()) {
    auto [lo, hi, parent, is_left] = work.back();
    work.pop_back();
    if (lo > hi) continue;
    int mid = (lo + hi) / 2;
    if (parent < 0) {
      shape.root = mid;
    } else if (is_left) {
      shape.left[parent] = mid;
    } else {
      shape.right[parent] = mid;
    }
    work.push_back({lo, mid - 1, mid, true});
    work.push_back({mid + 1, hi, mid, false});
  }
  return from_shape(shape);
}

BstTree BstTree::optimal(const std::map<int, double>& weights, int n) {
  return from_shape(optimal_shape(dense_weights(weights, n)));
}

BstTree BstTree::weight_balanced(const std::map<int, double>& weights, int n) {
  return from_shape(weight_balanced_shape(dense_weights(weights, n)));
}

void BstTree::check_key(int key) const {
  if (key < 1 || key > n_) {
    throw std::invalid_argument("key " + std::to_string(key) + " not in 1.." +
                                std::to_string(n_));
  }
}

int BstTree::depth_nodes(int key) const {
  check_key(key);
  int depth = 1;
  for (int x = key; parent_[x] != 0; x = parent_[x]) ++depth;
  return depth;
}

int BstTree::rotate_up(int x) {
  int p = parent_[x];
  int g = parent_[p];
  if (left_[p] == x) {
    left_[p] = right_[x];
    if (right_[x] != 0) parent_[right_[x]] = p;
    right_[x] = p;
  } else {
    right_[p] = left_[x];
    if (left_[x] != 0) parent_[left_[x]] = p;
    left_[x] = p;
  }
  parent_[p] = x;
  parent_[x] = g;
  if (g != 0) {
    (left_[g] == p ? left_[g] : right_[g]) = x;
  } else {
    root_ = x;
  }
  return 1;
}

int BstTree::splay_to(int key, int stop_parent) {
  check_key(key);
  int rotations = 0;
  while (parent_[key] != stop_parent) {
    int p = parent_[key];
    int g = parent_[p];
    if (g == stop_parent) {
      rotations += rotate_up(key);  // zig
    } else if ((left_[g] == p) == (left_[p] == key)) {
      rotations += rotate_up(p);  // zig-zig
      rotations += rotate_up(key);
    } else {
      rotations += rotate_up(key);  // zig-zag
      rotations += rotate_up(key);
    }
  }
  return rotations;
}

AccessResult BstTree::splay_access(int key) {
  AccessResult res;
  res.service_cost = depth_nodes(key);
  res.rotations = splay_to(key, 0);
  assert(inorder_ok());
  return res;
}

bool BstTree::inorder_ok() const {
  std::vector<int> stack;
  int x = root_;
  int expect = 1;
  int visited = 0;
  while (x != 0 || !stack.empty()) {
    while (x != 0) {
      stack.push_back(x);
      x = left_[x];
    }
    x = stack.back();
    stack.pop_back();
    if (x != expect) return false;
    ++expect;
    ++visited;
    x = right_[x];
  }
  return visited == n_;
}

std::string BstTree::dump() const {
  std::ostringstream out;
  for (int key = 1; key <= n_; ++key) {
    out << key << " " << parent_[key] << " " << left_[key] << " " << right_[key] << "\n";
  }
  return out.str();
}

double BstTree::expected_cost(const std::map<int, double>& weights) const {
  auto dense = dense_weights(weights, n_);
  double total = 0;
  double cost = 0;
  for (int key = 1; key <= n_; ++key) {
    double w = dense[key - 1];
    if (w > 0) {
      total += w;
      cost += w * depth_nodes(key);
    }
  }
  return cost / total;
}

CostLedger serve_sequence(BstTree& tree, ServePolicy policy,
                          std::span<const int> destinations) {
  CostLedger ledger;
  for (int key : destinations) {
    if (policy == ServePolicy::kFixed) {
      ledger.charge(tree.depth_nodes(key), 0);
    } else {
      AccessResult res = tree.splay_access(key);
      ledger.charge(res.service_cost, res.rotations);
    }
  }
  return ledger;
}

}  // namespace san
