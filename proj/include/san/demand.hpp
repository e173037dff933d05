#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "san/rng.hpp"

namespace san {

/// One source-destination communication request.
struct CommRequest {
  int src = 0;
  int dst = 0;
  friend bool operator==(const CommRequest&, const CommRequest&) = default;
  friend auto operator<=>(const CommRequest&, const CommRequest&) = default;
};

// Requests issued from kRootSource are search-style: a tree structure serving
// them resolves the destination starting from its current root. Node id 0 is
// reserved for this purpose in search workloads; tree keys live in [1, n).
inline constexpr int kRootSource = 0;

/// Ordered trace of communication requests over node ids [0, n).
struct DemandSequence {
  int n = 0;
  std::vector<CommRequest> requests;

  int length() const { return static_cast<int>(requests.size()); }
  std::vector<int> destinations() const;
  // Throws std::invalid_argument if any request is out of range or src==dst.
  void validate() const;
};

/// Weighted directed aggregation of a trace. Weights built from a trace are
/// exact integer counts (stored in doubles, so exact up to 2^53); graphs
/// constructed directly may carry arbitrary positive weights.
struct DemandGraph {
  int n = 0;
  std::map<std::pair<int, int>, double> edges;

  double total_weight() const;
  int out_degree(int u) const;
  int max_out_degree() const;
  // Communication partners per node, averaged over all n nodes. Recorded so
  // sparsity can be judged without committing to a formal cutoff.
  double avg_out_degree() const;
  void validate() const;
};

/// Counts occurrences of each ordered pair in the trace.
/// Throws std::invalid_argument("empty demand") for an empty sequence.
DemandGraph build_demand_graph(const DemandSequence& seq);

/// Relabels graph nodes: node u becomes perm[u]. perm must be a permutation
/// of [0, n).
DemandGraph relabel(const DemandGraph& g, const std::vector<int>& perm);

std::vector<int> random_permutation(int n, Rng& rng);

// --- canonical workloads ---

/// Search workload over the k smallest odd keys: requests
/// (kRootSource, 1) x r, (kRootSource, 3) x r, ..., (kRootSource, 2k-1) x r.
/// The key universe is 1..2^k-1, so the sequence's node count is 2^k
/// (id 0 is the reserved search source). Requires k >= 2, r >= 1.
DemandSequence make_tau_workload(int k, int r);

/// Number of keys in the tau universe: 2^k - 1.
int tau_item_count(int k);

/// side x side grid demand: directed edges both ways between 4-neighbors,
/// each with the given weight. Requires side >= 2, weight >= 1.
DemandGraph make_grid_demand(int side, int weight);

/// Trace enumerating every directed grid adjacency `passes` times, in
/// ascending (src, dst) order.
DemandSequence make_grid_trace(int side, int passes);

/// Star demand: hub node 0 sends to leaf i (1..n-1) with weight weights[i-1].
/// Requires n >= 2 and weights.size() == n-1, all positive.
DemandGraph make_star_demand(int n, const std::vector<double>& weights);

// --- stochastic generators ---

/// Request generator: i.i.d. draws from a fixed distribution over ordered
/// pairs, or a Markov chain whose state is the pair itself.
struct Generator {
  enum class Kind { kIid, kMarkov };

  Kind kind = Kind::kIid;
  int n = 0;
  std::vector<CommRequest> support;               // the pair states
  std::vector<double> probs;                      // iid: distribution over support
  std::vector<double> initial;                    // markov: initial distribution
  std::vector<std::vector<double>> transition;    // markov: row-stochastic matrix
  std::uint64_t seed = 0;

  static Generator iid(int n, std::vector<CommRequest> support,
                       std::vector<double> probs, std::uint64_t seed);
  static Generator markov(int n, std::vector<CommRequest> support,
                          std::vector<double> initial,
                          std::vector<std::vector<double>> transition,
                          std::uint64_t seed);

  // Checks stochasticity (rows sum to 1 within 1e-9, entries >= 0) and
  // support validity. Throws std::invalid_argument.
  void validate() const;

  // Long-run pair frequencies: the distribution itself for iid, the
  // stationary distribution (power iteration) for markov.
  std::vector<double> stationary_pair_probs() const;
};

/// Draws m requests. Deterministic given (kind, params, seed, m).
DemandSequence sample(const Generator& gen, int m);

// --- trace / graph files ---
//
// Trace file: header "n=<int> m=<int>", then one "src dst" line per request.
// Demand-graph file: header "n=<int>", then "src dst weight" triplets.

void write_trace(const std::filesystem::path& path, const DemandSequence& seq);
DemandSequence read_trace(const std::filesystem::path& path);
void write_demand_graph(const std::filesystem::path& path, const DemandGraph& g);
DemandGraph read_demand_graph(const std::filesystem::path& path);

}  // namespace san
