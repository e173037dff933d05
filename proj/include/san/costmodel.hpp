#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "san/bsttree.hpp"
#include "san/demand.hpp"
#include "san/ledger.hpp"
#include "san/topo.hpp"

namespace san {

// Algorithm classes: demand-oblivious, optimal fixed for a known sequence,
// optimal fixed for a known generator, online self-adjusting, optimal offline
// reconfiguration schedule.
enum class AlgClass { kObl, kStat, kGen, kOn, kOff };

enum class TopoKind { kBst, kTreeNet, kGeneralNet };

const char* to_string(AlgClass cls);

/// A concrete algorithm instance that can be run against a demand sequence.
struct AlgorithmSpec {
  AlgClass cls = AlgClass::kObl;
  TopoKind topo = TopoKind::kBst;
  std::string name;
  int degree = 3;          // expander degree (general-net oblivious)
  std::uint64_t seed = 0;  // expander construction + oblivious embedding
  std::optional<Generator> generator;  // kGen: the known model
};

AlgorithmSpec obl_balanced_bst();
AlgorithmSpec stat_opt_bst();
AlgorithmSpec gen_opt_bst(Generator generator);
AlgorithmSpec on_splay_bst();
AlgorithmSpec off_opt_bst();
AlgorithmSpec obl_fixed_treenet();
AlgorithmSpec stat_opt_treenet();
AlgorithmSpec on_splaynet();
AlgorithmSpec obl_expander(int degree, std::uint64_t seed);
AlgorithmSpec stat_egotree();

/// Initial configuration: a tree for bst/tree-net classes, a network for
/// general-net oblivious serving, or monostate for the canonical default.
using StartTopology = std::variant<std::monostate, BstTree, Network>;

/// Serves the sequence with the given algorithm and returns the per-request
/// ledger. Throws std::invalid_argument on incompatible pairings (algorithm
/// vs topology class vs workload shape).
CostLedger run_algorithm(const AlgorithmSpec& alg, const StartTopology& start,
                         const DemandSequence& seq);

/// Hop count between two keys along the current tree path.
int tree_hops(const BstTree& tree, int u, int v);

// --- enumeration of BST-shaped configurations (small n) ---

/// All tree shapes over n keys, with per-shape access depths and (optionally)
/// all-pairs rotation distances over the rotation graph.
struct BstShapeTable {
  int n = 0;
  std::vector<TreeShape> shapes;
  std::vector<std::vector<int>> depth_nodes;    // [shape][key-1]
  std::vector<std::vector<int>> rotation_dist;  // [shape][shape] if built

  int index_of(const BstTree& tree) const;
  BstTree tree(int index) const { return BstTree::from_shape(shapes[index]); }
};

BstShapeTable enumerate_bst_shapes(int n, bool with_rotation_dist);

// --- hindsight oracles ---

struct StatResult {
  BstTree tree;
  double cost = 0;  // total over the sequence
};

/// Optimal fixed search tree for the sequence's empirical destination
/// frequencies (interval DP; any n).
StatResult stat_oracle_bst(const DemandSequence& seq);

/// Optimal fixed BST-shaped tree network for the sequence's pair
/// frequencies, by brute force over all shapes. Limited to n <= 8 keys.
StatResult stat_oracle_treenet(const DemandSequence& seq);

struct OffResult {
  double cost = 0;
  CostLedger ledger;           // the optimal schedule's per-request charges
  std::vector<int> schedule;   // shape index after serving each request
  int initial_shape = -1;
};

/// Exact optimal offline reconfiguration schedule for a search workload:
/// dynamic program over (time, tree shape) with rotation-distance adjustment
/// costs. Limited to n <= 5 keys and m <= 12 requests. When `initial` is
/// given the schedule is charged from that tree; otherwise the offline
/// algorithm also picks the initial configuration.
OffResult off_oracle(const DemandSequence& seq, std::optional<BstTree> initial = {});

// --- optimality-ratio evaluation ---

enum class RatioKind { kStatic, kDynamic, kLearning };

const char* to_string(RatioKind kind);

/// One evaluation scenario: a generator to sample from (static/learning) or
/// explicit sequences (dynamic).
struct RatioInstance {
  std::string id;
  int n_keys = 0;
  std::optional<Generator> generator;
  std::optional<DemandSequence> fixed_seq;
  std::vector<int> lengths;                  // sequence-length sweep
  std::vector<std::uint64_t> sample_seeds;   // learning: sampling seeds (>= 30)
};

struct RatioPoint {
  std::string instance_id;
  int m = 0;
  int n = 0;
  std::uint64_t seed = 0;
  double on_cost = 0;
  double base_cost = 0;
  double ratio = 0;
};

struct RatioReport {
  RatioKind kind = RatioKind::kStatic;
  std::string scenario_id;
  double rho = 0;   // max over points of on/base
  double beta = 0;  // additive intercept fitted across the length sweep
  double numerator_cost = 0;
  double denominator_cost = 0;
  int m = 0;
  int n = 0;
  std::uint64_t seed = 0;
  double ci_lo = 0, ci_hi = 0;  // learning: bootstrap 95% interval on rho
  std::vector<RatioPoint> points;
};

/// Runs ON and the baseline over every instance and reports the worst-case
/// ratio plus the fitted additive term. The baseline class must match the
/// kind (static -> kStat, dynamic -> kOff, learning -> kGen). Learning
/// ratios are ratios of expectations over the sampling seeds. Instances fan
/// out to `workers` threads; results merge in instance order, so the report
/// does not depend on the worker count.
RatioReport evaluate_ratio(RatioKind kind, const AlgorithmSpec& on_alg,
                           const AlgorithmSpec& baseline,
                           const std::vector<RatioInstance>& instances,
                           const std::string& scenario_id, int workers = 1);

}  // namespace san
