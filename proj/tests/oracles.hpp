// Test-only reference implementations: exhaustive enumerations and closed
// forms kept independent of the library's algorithmic paths.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "san/bsttree.hpp"

namespace oracle {

// All BST shapes over keys 1..n (index space 0..n-1), by direct recursion
// over root choices.
inline std::vector<san::TreeShape> all_shapes(int n) {
  san::TreeShape proto;
  proto.left.assign(n, -1);
  proto.right.assign(n, -1);
  auto rec = [&](auto&& self, int lo, int hi) -> std::vector<san::TreeShape> {
    std::vector<san::TreeShape> out;
    if (lo > hi) {
      san::TreeShape empty = proto;
      out.push_back(empty);
      return out;
    }
    for (int r = lo; r <= hi; ++r) {
      for (const auto& left : self(self, lo, r - 1)) {
        for (const auto& right : self(self, r + 1, hi)) {
          san::TreeShape s = proto;
          for (int i = lo; i <= hi; ++i) {
            if (i < r && left.left[i] >= 0) s.left[i] = left.left[i];
            if (i < r && left.right[i] >= 0) s.right[i] = left.right[i];
            if (i > r && right.left[i] >= 0) s.left[i] = right.left[i];
            if (i > r && right.right[i] >= 0) s.right[i] = right.right[i];
          }
          s.root = r;
          if (left.root >= 0) s.left[r] = left.root;
          if (right.root >= 0) s.right[r] = right.root;
          out.push_back(s);
        }
      }
    }
    return out;
  };
  return rec(rec, 0, n - 1);
}

// sum of w[i] * (1 + depth(i)) over the shape; weights indexed by key-1.
inline double shape_cost(const san::TreeShape& shape, const std::vector<double>& w) {
  auto depths = shape.depths();
  double cost = 0;
  for (int i = 0; i < shape.size(); ++i) cost += w[i] * (depths[i] + 1);
  return cost;
}

// Minimum expected nodes-on-path cost over every BST shape (normalized).
inline double best_fixed_cost(const std::vector<double>& w) {
  double total = 0;
  for (double x : w) total += x;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& shape : all_shapes(static_cast<int>(w.size()))) {
    best = std::min(best, shape_cost(shape, w));
  }
  return best / total;
}

// Plain (uncompensated) entropy, an independent route to the same value.
inline double entropy_bits(const std::vector<double>& counts) {
  double total = 0;
  for (double c : counts) total += c;
  double h = 0;
  for (double c : counts) {
    if (c > 0) h += (c / total) * std::log2(total / c);
  }
  return h;
}

// Closed-form H(dst|src) of the uniform side x side grid demand: nodes fall
// in degree classes 2 (corners), 3 (borders), 4 (interior), and a node of
// out-degree d contributes weight d with entropy log2(d).
inline double grid_conditional_entropy(int side) {
  double corners = 4;
  double borders = 4.0 * (side - 2);
  double interior = static_cast<double>(side - 2) * (side - 2);
  double weight = corners * 2 + borders * 3 + interior * 4;
  double sum = corners * 2 * std::log2(2.0) + borders * 3 * std::log2(3.0) +
               interior * 4 * std::log2(4.0);
  return sum / weight;
}

// Exhaustive optimal offline cost for a search workload: tries every shape
// sequence. adj = rotation distance, srv = nodes on path. initial < 0 lets
// the schedule pick its own first shape.
inline long enumerate_offline_cost(const std::vector<std::vector<int>>& depth_nodes,
                                   const std::vector<std::vector<int>>& rot_dist,
                                   const std::vector<int>& dsts, int initial) {
  int states = static_cast<int>(depth_nodes.size());
  int m = static_cast<int>(dsts.size());
  long best = std::numeric_limits<long>::max();
  std::vector<int> schedule(m, 0);  // shape while serving request t
  auto rec = [&](auto&& self, int t, long cost) -> void {
    if (cost >= best) return;
    if (t == m) {
      best = cost;
      return;
    }
    for (int s = 0; s < states; ++s) {
      if (t == 0 && initial >= 0 && s != initial) continue;
      long step = depth_nodes[s][dsts[t] - 1];
      if (t > 0) step += rot_dist[schedule[t - 1]][s];
      schedule[t] = s;
      self(self, t + 1, cost + step);
    }
  };
  rec(rec, 0, 0);
  return best;
}

}  // namespace oracle
