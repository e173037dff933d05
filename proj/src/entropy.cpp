#include "san/entropy.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace san {

namespace {

// Compensated (Kahan) accumulator. Entropy sums over large edge sets feed
// acceptance tolerances, so keep the summation error independent of size.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0;
  double c_ = 0;
};

// sum of w * log2(total / w), with 0 * log(1/0) == 0
double entropy_weighted(const std::vector<double>& weights, double total) {
  KahanSum h;
  for (double w : weights) {
    if (w > 0) h.add(w * std::log2(total / w));
  }
  return h.value() / total;
}

}  // namespace

double empirical_entropy(std::span<const double> counts) {
  if (counts.empty()) throw std::invalid_argument("empty counts");
  KahanSum total;
  for (double c : counts) {
    if (c < 0) throw std::invalid_argument("negative count");
    total.add(c);
  }
  if (!(total.value() > 0)) throw std::invalid_argument("all counts zero");
  double t = total.value();
  KahanSum h;
  for (double c : counts) {
    if (c > 0) h.add(c * std::log2(t / c));
  }
  return h.value() / t;
}

double conditional_entropy(const DemandGraph& g) {
  if (g.edges.empty()) throw std::invalid_argument("empty demand graph");
  double total = g.total_weight();
  KahanSum h;
  auto it = g.edges.begin();
  while (it != g.edges.end()) {
    int u = it->first.first;
    std::vector<double> out;
    double out_total = 0;
    for (; it != g.edges.end() && it->first.first == u; ++it) {
      out.push_back(it->second);
      out_total += it->second;
    }
    // contribution p(u) * H(dst | src=u), folded into one weighted sum
    for (double w : out) {
      if (w > 0) h.add(w * std::log2(out_total / w));
    }
  }
  return h.value() / total;
}

EntropyReport graph_entropies(const DemandGraph& g) {
  if (g.edges.empty()) throw std::invalid_argument("empty demand graph");
  double total = g.total_weight();

  std::vector<double> joint;
  joint.reserve(g.edges.size());
  std::vector<double> src_w(g.n, 0.0);
  std::vector<double> dst_w(g.n, 0.0);
  for (const auto& [e, w] : g.edges) {
    joint.push_back(w);
    src_w[e.first] += w;
    dst_w[e.second] += w;
  }

  EntropyReport rep;
  rep.entropy_bits = entropy_weighted(joint, total);
  rep.source_entropy_bits = entropy_weighted(src_w, total);
  rep.dest_entropy_bits = entropy_weighted(dst_w, total);
  rep.conditional_yx_bits = conditional_entropy(g);

  DemandGraph transpose;
  transpose.n = g.n;
  for (const auto& [e, w] : g.edges) transpose.edges[{e.second, e.first}] += w;
  rep.conditional_xy_bits = conditional_entropy(transpose);
  return rep;
}

EntropyReport sequence_entropies(const DemandSequence& seq) {
  return graph_entropies(build_demand_graph(seq));
}

}  // namespace san
