#include "san/costmodel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

#include "san/parallel.hpp"

namespace san {

const char* to_string(AlgClass cls) {
  switch (cls) {
    case AlgClass::kObl: return "OBL";
    case AlgClass::kStat: return "STAT";
    case AlgClass::kGen: return "GEN";
    case AlgClass::kOn: return "ON";
    case AlgClass::kOff: return "OFF";
  }
  return "?";
}

const char* to_string(RatioKind kind) {
  switch (kind) {
    case RatioKind::kStatic: return "static";
    case RatioKind::kDynamic: return "dynamic";
    case RatioKind::kLearning: return "learning";
  }
  return "?";
}

namespace {

AlgorithmSpec make_spec(AlgClass cls, TopoKind topo, const char* name) {
  AlgorithmSpec spec;
  spec.cls = cls;
  spec.topo = topo;
  spec.name = name;
  return spec;
}

}  // namespace

AlgorithmSpec obl_balanced_bst() { return make_spec(AlgClass::kObl, TopoKind::kBst, "obl.balanced-bst"); }
AlgorithmSpec stat_opt_bst() { return make_spec(AlgClass::kStat, TopoKind::kBst, "stat.opt-bst"); }
AlgorithmSpec gen_opt_bst(Generator generator) {
  AlgorithmSpec spec = make_spec(AlgClass::kGen, TopoKind::kBst, "gen.opt-bst");
  spec.generator = std::move(generator);
  return spec;
}
AlgorithmSpec on_splay_bst() { return make_spec(AlgClass::kOn, TopoKind::kBst, "on.splay-bst"); }
AlgorithmSpec off_opt_bst() { return make_spec(AlgClass::kOff, TopoKind::kBst, "off.opt-bst"); }
AlgorithmSpec obl_fixed_treenet() { return make_spec(AlgClass::kObl, TopoKind::kTreeNet, "obl.fixed-treenet"); }
AlgorithmSpec stat_opt_treenet() { return make_spec(AlgClass::kStat, TopoKind::kTreeNet, "stat.opt-treenet"); }
AlgorithmSpec on_splaynet() { return make_spec(AlgClass::kOn, TopoKind::kTreeNet, "on.splaynet"); }
AlgorithmSpec obl_expander(int degree, std::uint64_t seed) {
  AlgorithmSpec spec = make_spec(AlgClass::kObl, TopoKind::kGeneralNet, "obl.expander");
  spec.degree = degree;
  spec.seed = seed;
  return spec;
}
AlgorithmSpec stat_egotree() { return make_spec(AlgClass::kStat, TopoKind::kGeneralNet, "stat.egotree"); }

int tree_hops(const BstTree& tree, int u, int v) {
  int lo = std::min(u, v), hi = std::max(u, v);
  int top = tree.root();
  int top_depth = 1;
  while (top < lo || top > hi) {
    top = (top < lo) ? tree.right(top) : tree.left(top);
    ++top_depth;
  }
  return (tree.depth_nodes(u) - top_depth) + (tree.depth_nodes(v) - top_depth);
}

namespace {

[[noreturn]] void incompatible(const std::string& why) {
  throw std::invalid_argument("incompatible pairing: " + why);
}

// Search workloads address tree keys 1..n-1; id 0 is the reserved source.
void require_search_workload(const DemandSequence& seq) {
  for (const auto& r : seq.requests) {
    if (r.src != kRootSource) {
      incompatible("search-tree algorithms serve requests from the root source");
    }
  }
}

void require_pair_workload(const DemandSequence& seq) {
  for (const auto& r : seq.requests) {
    if (r.src == kRootSource || r.dst == kRootSource) {
      incompatible("tree-network requests must use node ids 1..n-1");
    }
  }
}

BstTree start_tree_or_canonical(const StartTopology& start, int n_keys) {
  if (const BstTree* t = std::get_if<BstTree>(&start)) {
    if (t->size() != n_keys) incompatible("initial tree size mismatch");
    return *t;
  }
  if (std::holds_alternative<Network>(start)) {
    incompatible("tree algorithm got a general network start");
  }
  return canonical_start_tree(n_keys);
}

CostLedger serve_on_network(const Network& net, const DemandSequence& seq,
                            const std::vector<int>* perm) {
  CostLedger ledger;
  std::map<int, std::vector<int>> dist_cache;
  for (const auto& r : seq.requests) {
    int u = perm ? (*perm)[r.src] : r.src;
    int v = perm ? (*perm)[r.dst] : r.dst;
    auto it = dist_cache.find(u);
    if (it == dist_cache.end()) it = dist_cache.emplace(u, bfs_distances(net, u)).first;
    int d = it->second[v];
    if (d < 0) throw InvariantError("constraint breach: no route");
    ledger.charge(d, 0);
  }
  return ledger;
}

CostLedger run_bst(const AlgorithmSpec& alg, const StartTopology& start,
                   const DemandSequence& seq) {
  require_search_workload(seq);
  int n_keys = seq.n - 1;
  auto dsts = seq.destinations();
  switch (alg.cls) {
    case AlgClass::kObl: {
      BstTree tree = start_tree_or_canonical(start, n_keys);
      return serve_sequence(tree, ServePolicy::kFixed, dsts);
    }
    case AlgClass::kStat: {
      BstTree tree = stat_oracle_bst(seq).tree;
      return serve_sequence(tree, ServePolicy::kFixed, dsts);
    }
    case AlgClass::kGen: {
      if (!alg.generator) incompatible("GEN needs a generator");
      if (alg.generator->n != seq.n) incompatible("generator universe mismatch");
      std::map<int, double> marginal;
      auto probs = alg.generator->stationary_pair_probs();
      for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0) marginal[alg.generator->support[i].dst] += probs[i];
      }
      BstTree tree = BstTree::optimal(marginal, n_keys);
      return serve_sequence(tree, ServePolicy::kFixed, dsts);
    }
    case AlgClass::kOn: {
      BstTree tree = start_tree_or_canonical(start, n_keys);
      return serve_sequence(tree, ServePolicy::kSplay, dsts);
    }
    case AlgClass::kOff: {
      std::optional<BstTree> initial;
      if (const BstTree* t = std::get_if<BstTree>(&start)) initial = *t;
      return off_oracle(seq, initial).ledger;
    }
  }
  incompatible("unknown algorithm class");
}

CostLedger run_treenet(const AlgorithmSpec& alg, const StartTopology& start,
                       const DemandSequence& seq) {
  require_pair_workload(seq);
  int n_keys = seq.n - 1;
  switch (alg.cls) {
    case AlgClass::kObl: {
      BstTree tree = start_tree_or_canonical(start, n_keys);
      CostLedger ledger;
      for (const auto& r : seq.requests) ledger.charge(tree_hops(tree, r.src, r.dst), 0);
      return ledger;
    }
    case AlgClass::kStat: {
      BstTree tree = stat_oracle_treenet(seq).tree;
      CostLedger ledger;
      for (const auto& r : seq.requests) ledger.charge(tree_hops(tree, r.src, r.dst), 0);
      return ledger;
    }
    case AlgClass::kOn: {
      SelfAdjustingTree sat(start_tree_or_canonical(start, n_keys));
      return sat.serve(seq);
    }
    default:
      incompatible(std::string(to_string(alg.cls)) + " is not defined for tree networks");
  }
}

CostLedger run_general(const AlgorithmSpec& alg, const StartTopology& start,
                       const DemandSequence& seq) {
  switch (alg.cls) {
    case AlgClass::kObl: {
      // Oblivious serving: a fixed expander with a random (seeded) placement
      // of the demand's nodes.
      Network net = [&] {
        if (const Network* n = std::get_if<Network>(&start)) return *n;
        return build_random_regular(seq.n, alg.degree, alg.seed);
      }();
      if (net.size() != seq.n) incompatible("network size mismatch");
      Rng rng(derive_seed(alg.seed, 0x0b1u));
      auto perm = random_permutation(seq.n, rng);
      return serve_on_network(net, seq, &perm);
    }
    case AlgClass::kStat: {
      auto build = build_ego_tree_network(build_demand_graph(seq));
      return serve_on_network(build.net, seq, nullptr);
    }
    default:
      incompatible(std::string(to_string(alg.cls)) + " is not defined for general networks");
  }
}

}  // namespace

CostLedger run_algorithm(const AlgorithmSpec& alg, const StartTopology& start,
                         const DemandSequence& seq) {
  if (seq.requests.empty()) throw std::invalid_argument("empty demand");
  seq.validate();
  switch (alg.topo) {
    case TopoKind::kBst: return run_bst(alg, start, seq);
    case TopoKind::kTreeNet: return run_treenet(alg, start, seq);
    case TopoKind::kGeneralNet: return run_general(alg, start, seq);
  }
  incompatible("unknown topology class");
}

// --- shape enumeration ---

namespace {

struct Frag {
  int root = -1;
  std::vector<std::array<int, 3>> links;  // parent, child, is_left
};

std::vector<Frag> enum_frags(int lo, int hi) {
  if (lo > hi) return {Frag{}};
  std::vector<Frag> out;
  for (int r = lo; r <= hi; ++r) {
    auto lefts = enum_frags(lo, r - 1);
    auto rights = enum_frags(r + 1, hi);
    for (const auto& lf : lefts) {
      for (const auto& rf : rights) {
        Frag f;
        f.root = r;
        f.links = lf.links;
        f.links.insert(f.links.end(), rf.links.begin(), rf.links.end());
        if (lf.root >= 0) f.links.push_back({r, lf.root, 1});
        if (rf.root >= 0) f.links.push_back({r, rf.root, 0});
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

std::vector<int> encode_shape(const TreeShape& s) {
  std::vector<int> code;
  code.reserve(2 * s.size() + 1);
  code.push_back(s.root);
  code.insert(code.end(), s.left.begin(), s.left.end());
  code.insert(code.end(), s.right.begin(), s.right.end());
  return code;
}

std::vector<int> shape_parents(const TreeShape& s) {
  std::vector<int> par(s.size(), -1);
  for (int i = 0; i < s.size(); ++i) {
    if (s.left[i] >= 0) par[s.left[i]] = i;
    if (s.right[i] >= 0) par[s.right[i]] = i;
  }
  return par;
}

// Single rotation lifting x above its current parent.
TreeShape rotate_shape(const TreeShape& s, int x, const std::vector<int>& par) {
  TreeShape t = s;
  int p = par[x];
  int g = par[p];
  if (t.left[p] == x) {
    t.left[p] = t.right[x];
    t.right[x] = p;
  } else {
    t.right[p] = t.left[x];
    t.left[x] = p;
  }
  if (g < 0) {
    t.root = x;
  } else if (t.left[g] == p) {
    t.left[g] = x;
  } else {
    t.right[g] = x;
  }
  return t;
}

}  // namespace

BstShapeTable enumerate_bst_shapes(int n, bool with_rotation_dist) {
  if (n < 1 || n > 12) throw std::invalid_argument("shape enumeration limited to n <= 12");
  BstShapeTable table;
  table.n = n;
  for (const auto& frag : enum_frags(0, n - 1)) {
    TreeShape s;
    s.root = frag.root;
    s.left.assign(n, -1);
    s.right.assign(n, -1);
    for (const auto& [p, c, is_left] : frag.links) {
      (is_left ? s.left[p] : s.right[p]) = c;
    }
    auto depths = s.depths();
    std::vector<int> nodes(n);
    for (int i = 0; i < n; ++i) nodes[i] = depths[i] + 1;
    table.depth_nodes.push_back(std::move(nodes));
    table.shapes.push_back(std::move(s));
  }

  if (with_rotation_dist) {
    std::map<std::vector<int>, int> index;
    for (std::size_t i = 0; i < table.shapes.size(); ++i) {
      index[encode_shape(table.shapes[i])] = static_cast<int>(i);
    }
    std::vector<std::vector<int>> neighbors(table.shapes.size());
    for (std::size_t i = 0; i < table.shapes.size(); ++i) {
      const auto& s = table.shapes[i];
      auto par = shape_parents(s);
      for (int x = 0; x < n; ++x) {
        if (par[x] < 0) continue;
        neighbors[i].push_back(index.at(encode_shape(rotate_shape(s, x, par))));
      }
    }
    int count = static_cast<int>(table.shapes.size());
    table.rotation_dist.assign(count, std::vector<int>(count, -1));
    for (int src = 0; src < count; ++src) {
      auto& dist = table.rotation_dist[src];
      std::queue<int> queue;
      dist[src] = 0;
      queue.push(src);
      while (!queue.empty()) {
        int s = queue.front();
        queue.pop();
        for (int t : neighbors[s]) {
          if (dist[t] < 0) {
            dist[t] = dist[s] + 1;
            queue.push(t);
          }
        }
      }
    }
  }
  return table;
}

int BstShapeTable::index_of(const BstTree& tree) const {
  if (tree.size() != n) return -1;
  TreeShape s;
  s.root = tree.root() - 1;
  s.left.assign(n, -1);
  s.right.assign(n, -1);
  for (int key = 1; key <= n; ++key) {
    s.left[key - 1] = tree.left(key) - 1;
    s.right[key - 1] = tree.right(key) - 1;
  }
  auto code = encode_shape(s);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (encode_shape(shapes[i]) == code) return static_cast<int>(i);
  }
  return -1;
}

// --- oracles ---

StatResult stat_oracle_bst(const DemandSequence& seq) {
  if (seq.requests.empty()) throw std::invalid_argument("empty demand");
  seq.validate();
  require_search_workload(seq);
  std::map<int, double> counts;
  for (const auto& r : seq.requests) counts[r.dst] += 1.0;
  StatResult result{BstTree::optimal(counts, seq.n - 1), 0};
  for (const auto& [key, c] : counts) {
    result.cost += c * result.tree.depth_nodes(key);
  }
  return result;
}

StatResult stat_oracle_treenet(const DemandSequence& seq) {
  if (seq.requests.empty()) throw std::invalid_argument("empty demand");
  seq.validate();
  require_pair_workload(seq);
  int n_keys = seq.n - 1;
  if (n_keys > 8) {
    throw std::invalid_argument(
        "tree-network static oracle is brute force and limited to n <= 8 keys");
  }
  std::map<std::pair<int, int>, double> counts;
  for (const auto& r : seq.requests) counts[{r.src, r.dst}] += 1.0;

  auto table = enumerate_bst_shapes(n_keys, false);
  double best = std::numeric_limits<double>::infinity();
  int best_idx = 0;
  for (std::size_t i = 0; i < table.shapes.size(); ++i) {
    BstTree tree = table.tree(static_cast<int>(i));
    double cost = 0;
    for (const auto& [pair, c] : counts) {
      cost += c * tree_hops(tree, pair.first, pair.second);
    }
    if (cost < best) {
      best = cost;
      best_idx = static_cast<int>(i);
    }
  }
  return {table.tree(best_idx), best};
}

OffResult off_oracle(const DemandSequence& seq, std::optional<BstTree> initial) {
  if (seq.requests.empty()) throw std::invalid_argument("empty demand");
  seq.validate();
  require_search_workload(seq);
  int n_keys = seq.n - 1;
  int m = seq.length();
  if (n_keys > 5) {
    throw std::invalid_argument("offline oracle limited to n <= 5 keys");
  }
  if (m > 12) {
    throw std::invalid_argument("offline oracle limited to m <= 12 requests");
  }

  auto table = enumerate_bst_shapes(n_keys, true);
  int states = static_cast<int>(table.shapes.size());
  auto dsts = seq.destinations();

  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  std::vector<int> cur(states, 0);
  if (initial) {
    int idx = table.index_of(*initial);
    if (idx < 0) throw std::invalid_argument("initial tree size mismatch");
    cur.assign(states, kInf);
    cur[idx] = 0;
  }

  // pred[t][s'] = shape before the adjustment following request t
  std::vector<std::vector<int>> pred(m, std::vector<int>(states, -1));
  for (int t = 0; t + 1 < m; ++t) {
    std::vector<int> served(states, kInf);
    for (int s = 0; s < states; ++s) {
      if (cur[s] < kInf) served[s] = cur[s] + table.depth_nodes[s][dsts[t] - 1];
    }
    std::vector<int> next(states, kInf);
    for (int s2 = 0; s2 < states; ++s2) {
      for (int s = 0; s < states; ++s) {
        if (served[s] >= kInf) continue;
        int c = served[s] + table.rotation_dist[s][s2];
        if (c < next[s2]) {
          next[s2] = c;
          pred[t][s2] = s;
        }
      }
    }
    cur.swap(next);
  }

  int best_cost = kInf;
  int best_shape = -1;
  for (int s = 0; s < states; ++s) {
    if (cur[s] >= kInf) continue;
    int c = cur[s] + table.depth_nodes[s][dsts[m - 1] - 1];
    if (c < best_cost) {
      best_cost = c;
      best_shape = s;
    }
  }

  OffResult result;
  result.cost = best_cost;
  result.schedule.assign(m, -1);
  result.schedule[m - 1] = best_shape;
  for (int t = m - 2; t >= 0; --t) {
    result.schedule[t] = pred[t][result.schedule[t + 1]];
  }
  result.initial_shape = result.schedule[0];
  for (int t = 0; t < m; ++t) {
    int s = result.schedule[t];
    int adjust = (t + 1 < m) ? table.rotation_dist[s][result.schedule[t + 1]] : 0;
    result.ledger.charge(table.depth_nodes[s][dsts[t] - 1], adjust);
  }
  return result;
}

// --- ratio evaluation ---

namespace {

// Intercept of the least-squares line through (base, on) pairs. Fitted per
// instance across its length sweep: the slope captures the asymptotic cost
// ratio, the intercept the length-independent startup term.
double fit_intercept(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) return 0;
  double xbar = 0, ybar = 0;
  for (const auto& [x, y] : pts) {
    xbar += x;
    ybar += y;
  }
  xbar /= static_cast<double>(pts.size());
  ybar /= static_cast<double>(pts.size());
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - xbar) * (x - xbar);
    sxy += (x - xbar) * (y - ybar);
  }
  if (!(sxx > 0)) return 0;
  return ybar - (sxy / sxx) * xbar;
}

double mean_instance_intercept(const std::vector<RatioPoint>& points) {
  std::map<std::string, std::vector<std::pair<double, double>>> by_instance;
  for (const auto& p : points) {
    by_instance[p.instance_id].emplace_back(p.base_cost, p.on_cost);
  }
  double sum = 0;
  int fitted = 0;
  for (const auto& [id, pts] : by_instance) {
    if (pts.size() < 2) continue;
    sum += fit_intercept(pts);
    ++fitted;
  }
  return fitted == 0 ? 0 : sum / fitted;
}

}  // namespace

RatioReport evaluate_ratio(RatioKind kind, const AlgorithmSpec& on_alg,
                           const AlgorithmSpec& baseline,
                           const std::vector<RatioInstance>& instances,
                           const std::string& scenario_id, int workers) {
  if (instances.empty()) throw std::invalid_argument("no instances");
  AlgClass want = kind == RatioKind::kStatic    ? AlgClass::kStat
                  : kind == RatioKind::kDynamic ? AlgClass::kOff
                                                : AlgClass::kGen;
  if (baseline.cls != want) {
    incompatible(std::string("kind ") + to_string(kind) + " needs a " +
                 to_string(want) + " baseline");
  }

  RatioReport report;
  report.kind = kind;
  report.scenario_id = scenario_id;

  struct InstanceResult {
    std::vector<RatioPoint> points;
    // seed-level cost pairs per length, kept for the learning bootstrap
    std::map<int, std::vector<std::pair<double, double>>> seed_pairs;
  };
  std::vector<InstanceResult> results(instances.size());

  parallel_for_indexed(static_cast<int>(instances.size()), workers, [&](int idx) {
    const RatioInstance& inst = instances[idx];
    InstanceResult& out = results[idx];
    if (kind == RatioKind::kDynamic) {
      if (!inst.fixed_seq) throw std::invalid_argument("dynamic instance needs a sequence");
      const DemandSequence& seq = *inst.fixed_seq;
      BstTree n0 = canonical_start_tree(seq.n - 1);
      double y = run_algorithm(on_alg, n0, seq).total();
      double x = off_oracle(seq, n0).cost;
      if (!(x > 0)) throw std::runtime_error("zero denominator");
      out.points.push_back({inst.id, seq.length(), seq.n - 1, 0, y, x, y / x});
      return;
    }
    if (!inst.generator) throw std::invalid_argument("instance needs a generator");
    for (int m : inst.lengths) {
      if (kind == RatioKind::kStatic) {
        Generator gen = *inst.generator;
        gen.seed = derive_seed(gen.seed, static_cast<std::uint64_t>(m));
        DemandSequence seq = sample(gen, m);
        double y = run_algorithm(on_alg, {}, seq).total();
        double x = run_algorithm(baseline, {}, seq).total();
        if (!(x > 0)) throw std::runtime_error("zero denominator");
        out.points.push_back({inst.id, m, seq.n - 1, inst.generator->seed, y, x, y / x});
      } else {
        if (inst.sample_seeds.empty()) {
          throw std::invalid_argument("learning instance needs sampling seeds");
        }
        AlgorithmSpec gen_baseline = baseline;
        gen_baseline.generator = inst.generator;
        double y_sum = 0, x_sum = 0;
        auto& seed_pairs = out.seed_pairs[m];
        for (std::uint64_t s : inst.sample_seeds) {
          Generator gen = *inst.generator;
          gen.seed = derive_seed(derive_seed(gen.seed, s), static_cast<std::uint64_t>(m));
          DemandSequence seq = sample(gen, m);
          double y = run_algorithm(on_alg, {}, seq).total();
          double x = run_algorithm(gen_baseline, {}, seq).total();
          y_sum += y;
          x_sum += x;
          seed_pairs.emplace_back(x, y);
        }
        double y_mean = y_sum / static_cast<double>(inst.sample_seeds.size());
        double x_mean = x_sum / static_cast<double>(inst.sample_seeds.size());
        if (!(x_mean > 0)) throw std::runtime_error("zero denominator");
        out.points.push_back({inst.id, m, inst.generator->n - 1, inst.generator->seed,
                              y_mean, x_mean, y_mean / x_mean});
      }
    }
  });

  std::map<std::pair<std::string, int>, std::vector<std::pair<double, double>>> pairs;
  for (std::size_t i = 0; i < results.size(); ++i) {
    report.points.insert(report.points.end(), results[i].points.begin(),
                         results[i].points.end());
    for (auto& [m, sp] : results[i].seed_pairs) {
      pairs[{instances[i].id, m}] = std::move(sp);
    }
  }

  const RatioPoint* worst = nullptr;
  for (const auto& p : report.points) {
    if (worst == nullptr || p.ratio > worst->ratio) worst = &p;
  }
  report.rho = worst->ratio;
  report.numerator_cost = worst->on_cost;
  report.denominator_cost = worst->base_cost;
  report.m = worst->m;
  report.n = worst->n;
  report.seed = worst->seed;
  report.beta = (kind == RatioKind::kDynamic) ? 0 : mean_instance_intercept(report.points);

  if (kind == RatioKind::kLearning) {
    const auto& seed_pairs = pairs.at({worst->instance_id, worst->m});
    std::vector<double> ratios;
    Rng rng(derive_seed(0xB007u, seed_pairs.size()));
    const int kResamples = 1000;
    ratios.reserve(kResamples);
    for (int b = 0; b < kResamples; ++b) {
      double xs = 0, ys = 0;
      for (std::size_t i = 0; i < seed_pairs.size(); ++i) {
        const auto& [x, y] = seed_pairs[rng.bounded(seed_pairs.size())];
        xs += x;
        ys += y;
      }
      ratios.push_back(ys / xs);
    }
    std::sort(ratios.begin(), ratios.end());
    report.ci_lo = ratios[static_cast<std::size_t>(0.025 * kResamples)];
    report.ci_hi = ratios[static_cast<std::size_t>(0.975 * kResamples) - 1];
  }
  return report;
}

}  // namespace san
