#include "san/demand.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace san {

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line,
                             const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

void check_request(const CommRequest& r, int n) {
  if (r.src == r.dst) {
    throw std::invalid_argument("request src == dst (" + std::to_string(r.src) + ")");
  }
  if (r.src < 0 || r.src >= n || r.dst < 0 || r.dst >= n) {
    throw std::invalid_argument("request (" + std::to_string(r.src) + "," +
                                std::to_string(r.dst) + ") out of range for n=" +
                                std::to_string(n));
  }
}

}  // namespace

std::vector<int> DemandSequence::destinations() const {
  std::vector<int> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(r.dst);
  return out;
}

void DemandSequence::validate() const {
  if (n < 2) throw std::invalid_argument("sequence needs n >= 2");
  for (const auto& r : requests) check_request(r, n);
}

double DemandGraph::total_weight() const {
  double sum = 0;
  for (const auto& [e, w] : edges) sum += w;
  return sum;
}

int DemandGraph::out_degree(int u) const {
  auto lo = edges.lower_bound({u, 0});
  auto hi = edges.lower_bound({u + 1, 0});
  return static_cast<int>(std::distance(lo, hi));
}

int DemandGraph::max_out_degree() const {
  int best = 0;
  for (int u = 0; u < n; ++u) best = std::max(best, out_degree(u));
  return best;
}

double DemandGraph::avg_out_degree() const {
  return static_cast<double>(edges.size()) / static_cast<double>(n);
}

void DemandGraph::validate() const {
  if (n < 2) throw std::invalid_argument("graph needs n >= 2");
  for (const auto& [e, w] : edges) {
    check_request({e.first, e.second}, n);
    if (!(w > 0)) throw std::invalid_argument("nonpositive edge weight");
  }
}

DemandGraph build_demand_graph(const DemandSequence& seq) {
  if (seq.requests.empty()) throw std::invalid_argument("empty demand");
  seq.validate();
  DemandGraph g;
  g.n = seq.n;
  for (const auto& r : seq.requests) g.edges[{r.src, r.dst}] += 1.0;
  return g;
}

DemandGraph relabel(const DemandGraph& g, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g.n) {
    throw std::invalid_argument("permutation size mismatch");
  }
  DemandGraph out;
  out.n = g.n;
  for (const auto& [e, w] : g.edges) {
    out.edges[{perm[e.first], perm[e.second]}] += w;
  }
  return out;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  return perm;
}

int tau_item_count(int k) {
  if (k < 2 || k > 30) throw std::invalid_argument("tau requires 2 <= k <= 30");
  return (1 << k) - 1;
}

DemandSequence make_tau_workload(int k, int r) {
  if (k < 2) throw std::invalid_argument("tau requires k >= 2");
  if (r < 1) throw std::invalid_argument("tau requires r >= 1");
  DemandSequence seq;
  seq.n = tau_item_count(k) + 1;  // keys 1..2^k-1 plus the reserved source id 0
  seq.requests.reserve(static_cast<std::size_t>(k) * r);
  for (int i = 0; i < k; ++i) {
    int key = 2 * i + 1;
    for (int j = 0; j < r; ++j) seq.requests.push_back({kRootSource, key});
  }
  return seq;
}

DemandGraph make_grid_demand(int side, int weight) {
  if (side < 2) throw std::invalid_argument("grid requires side >= 2");
  if (weight < 1) throw std::invalid_argument("grid requires weight >= 1");
  DemandGraph g;
  g.n = side * side;
  auto id = [side](int row, int col) { return row * side + col; };
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      int u = id(row, col);
      if (col + 1 < side) {
        g.edges[{u, id(row, col + 1)}] = weight;
        g.edges[{id(row, col + 1), u}] = weight;
      }
      if (row + 1 < side) {
        g.edges[{u, id(row + 1, col)}] = weight;
        g.edges[{id(row + 1, col), u}] = weight;
      }
    }
  }
  return g;
}

DemandSequence make_grid_trace(int side, int passes) {
  if (passes < 1) throw std::invalid_argument("grid trace requires passes >= 1");
  DemandGraph g = make_grid_demand(side, 1);
  DemandSequence seq;
  seq.n = g.n;
  for (int p = 0; p < passes; ++p) {
    for (const auto& [e, w] : g.edges) seq.requests.push_back({e.first, e.second});
  }
  return seq;
}

DemandGraph make_star_demand(int n, const std::vector<double>& weights) {
  if (n < 2) throw std::invalid_argument("star requires n >= 2");
  if (static_cast<int>(weights.size()) != n - 1) {
    throw std::invalid_argument("star requires exactly n-1 weights");
  }
  DemandGraph g;
  g.n = n;
  for (int i = 1; i < n; ++i) {
    if (!(weights[i - 1] > 0)) throw std::invalid_argument("nonpositive star weight");
    g.edges[{0, i}] = weights[i - 1];
  }
  return g;
}

Generator Generator::iid(int n, std::vector<CommRequest> support,
                         std::vector<double> probs, std::uint64_t seed) {
  Generator g;
  g.kind = Kind::kIid;
  g.n = n;
  g.support = std::move(support);
  g.probs = std::move(probs);
  g.seed = seed;
  g.validate();
  return g;
}

Generator Generator::markov(int n, std::vector<CommRequest> support,
                            std::vector<double> initial,
                            std::vector<std::vector<double>> transition,
                            std::uint64_t seed) {
  Generator g;
  g.kind = Kind::kMarkov;
  g.n = n;
  g.support = std::move(support);
  g.initial = std::move(initial);
  g.transition = std::move(transition);
  g.seed = seed;
  g.validate();
  return g;
}

namespace {

void check_distribution(const std::vector<double>& p, std::size_t want) {
  if (p.size() != want) throw std::invalid_argument("distribution size mismatch");
  double sum = 0;
  for (double x : p) {
    if (x < 0) throw std::invalid_argument("negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("distribution does not sum to 1");
  }
}

}  // namespace

void Generator::validate() const {
  if (support.empty()) throw std::invalid_argument("generator has empty support");
  for (const auto& r : support) check_request(r, n);
  if (kind == Kind::kIid) {
    check_distribution(probs, support.size());
  } else {
    check_distribution(initial, support.size());
    if (transition.size() != support.size()) {
      throw std::invalid_argument("transition matrix size mismatch");
    }
    for (const auto& row : transition) check_distribution(row, support.size());
  }
}

std::vector<double> Generator::stationary_pair_probs() const {
  if (kind == Kind::kIid) return probs;
  // Power iteration; pair-state chains at this scale converge fast.
  std::vector<double> p = initial;
  std::vector<double> next(p.size());
  for (int iter = 0; iter < 100000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) next[j] += p[i] * transition[i][j];
    }
    double delta = 0;
    for (std::size_t j = 0; j < p.size(); ++j) delta += std::abs(next[j] - p[j]);
    p.swap(next);
    if (delta < 1e-13) break;
  }
  return p;
}

namespace {

// Inverse-CDF draw over cumulative weights.
std::size_t draw_index(const std::vector<double>& cdf, Rng& rng) {
  double u = rng.uniform01() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(std::distance(cdf.begin(), it));
}

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  double run = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    run += p[i];
    cdf[i] = run;
  }
  return cdf;
}

}  // namespace

DemandSequence sample(const Generator& gen, int m) {
  gen.validate();
  if (m < 1) throw std::invalid_argument("sample requires m >= 1");
  DemandSequence seq;
  seq.n = gen.n;
  seq.requests.reserve(m);
  Rng rng(gen.seed);
  if (gen.kind == Generator::Kind::kIid) {
    auto cdf = cumulative(gen.probs);
    for (int t = 0; t < m; ++t) seq.requests.push_back(gen.support[draw_index(cdf, rng)]);
  } else {
    auto cdf0 = cumulative(gen.initial);
    std::size_t state = draw_index(cdf0, rng);
    seq.requests.push_back(gen.support[state]);
    std::vector<std::vector<double>> row_cdf;
    row_cdf.reserve(gen.transition.size());
    for (const auto& row : gen.transition) row_cdf.push_back(cumulative(row));
    for (int t = 1; t < m; ++t) {
      state = draw_index(row_cdf[state], rng);
      seq.requests.push_back(gen.support[state]);
    }
  }
  return seq;
}

void write_trace(const std::filesystem::path& path, const DemandSequence& seq) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "n=" << seq.n << " m=" << seq.requests.size() << "\n";
  for (const auto& r : seq.requests) out << r.src << " " << r.dst << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

DemandSequence read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  DemandSequence seq;
  long m = -1;
  if (std::sscanf(line.c_str(), "n=%d m=%ld", &seq.n, &m) != 2) {
    parse_fail(path, 1, "expected header \"n=<int> m=<int>\"");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    CommRequest r;
    if (std::sscanf(line.c_str(), "%d %d", &r.src, &r.dst) != 2) {
      parse_fail(path, lineno, "expected \"src dst\"");
    }
    seq.requests.push_back(r);
  }
  if (static_cast<long>(seq.requests.size()) != m) {
    parse_fail(path, lineno, "header m does not match request count");
  }
  seq.validate();
  return seq;
}

void write_demand_graph(const std::filesystem::path& path, const DemandGraph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "n=" << g.n << "\n";
  out.precision(17);
  for (const auto& [e, w] : g.edges) out << e.first << " " << e.second << " " << w << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

DemandGraph read_demand_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  DemandGraph g;
  if (std::sscanf(line.c_str(), "n=%d", &g.n) != 1) {
    parse_fail(path, 1, "expected header \"n=<int>\"");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    int src = 0, dst = 0;
    double w = 0;
    if (std::sscanf(line.c_str(), "%d %d %lf", &src, &dst, &w) != 3) {
      parse_fail(path, lineno, "expected \"src dst weight\"");
    }
    g.edges[{src, dst}] += w;
  }
  g.validate();
  return g;
}

}  // namespace san
