#include "san/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "san/parallel.hpp"

namespace san {

namespace fs = std::filesystem;

std::string fmt_num(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

// --- config access ---

std::string ScenarioConfig::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string ScenarioConfig::get_or(const std::string& key,
                                   const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

long ScenarioConfig::get_int(const std::string& key) const {
  const std::string raw = get(key);
  try {
    std::size_t pos = 0;
    long v = std::stol(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not an integer: " + raw);
  }
}

long ScenarioConfig::get_int_or(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double ScenarioConfig::get_real_or(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = get(key);
  try {
    std::size_t pos = 0;
    double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not a number: " + raw);
  }
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<std::string> ScenarioConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ConfigError("config key " + key + " is an empty list");
  return out;
}

std::vector<std::uint64_t> ScenarioConfig::get_seeds_or(
    const std::string& key, std::vector<std::uint64_t> fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::uint64_t> out;
  for (const auto& item : get_list(key)) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " has a bad seed: " + item);
    }
  }
  return out;
}

ScenarioConfig parse_config(std::istream& in, const std::string& origin) {
  ScenarioConfig config;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (section.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside a section");
    }
    config.values[section + "." + key] = value;
  }
  config.id = config.get_or("scenario.id", "scenario");
  config.kind = config.get_or("scenario.kind", "run");
  if (config.kind != "run" && config.kind != "ratio") {
    throw ConfigError("scenario.kind must be run or ratio, got " + config.kind);
  }
  return config;
}

ScenarioConfig load_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

// --- builtin scenarios ---

namespace {

ScenarioConfig from_pairs(std::initializer_list<std::pair<const char*, const char*>> kv) {
  ScenarioConfig config;
  for (const auto& [k, v] : kv) config.values[k] = v;
  config.id = config.get("scenario.id");
  config.kind = config.get("scenario.kind");
  return config;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"tau-bst",      "grid-vs-expander", "sat-entropy",
          "static-ratio", "dynamic-ratio",    "learning-ratio"};
}

ScenarioConfig builtin_scenario(const std::string& name) {
  if (name == "tau-bst") {
    return from_pairs({{"scenario.id", "tau-bst"},
                       {"scenario.kind", "run"},
                       {"scenario.topology", "bst"},
                       {"scenario.algorithms", "obl-balanced,stat-opt,on-splay"},
                       {"workload.name", "tau"},
                       {"workload.k", "10"},
                       {"workload.r", "1000"},
                       {"run.seeds", "1"}});
  }
  if (name == "grid-vs-expander") {
    return from_pairs({{"scenario.id", "grid-vs-expander"},
                       {"scenario.kind", "run"},
                       {"scenario.topology", "net"},
                       {"scenario.algorithms", "obl-expander,stat-egotree"},
                       {"workload.name", "grid"},
                       {"workload.side", "16"},
                       {"workload.weight", "1"},
                       {"net.degree", "3"},
                       {"run.seeds", "1,2"}});
  }
  if (name == "sat-entropy") {
    return from_pairs({{"scenario.id", "sat-entropy"},
                       {"scenario.kind", "run"},
                       {"scenario.topology", "tree-net"},
                       {"scenario.algorithms", "obl-fixed,on-splaynet"},
                       {"workload.name", "sat-suite"},
                       {"run.m", "20000"},
                       {"run.seeds", "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20"}});
  }
  if (name == "static-ratio") {
    return from_pairs({{"scenario.id", "static-ratio"},
                       {"scenario.kind", "ratio"},
                       {"ratio.kind", "static"},
                       {"ratio.on", "on-splay"},
                       {"ratio.baseline", "stat-opt"},
                       {"instances.count", "10"},
                       {"instances.n_min", "16"},
                       {"instances.n_max", "64"},
                       {"instances.lengths", "100,1000,10000"},
                       {"instances.base_seed", "7"}});
  }
  if (name == "dynamic-ratio") {
    return from_pairs({{"scenario.id", "dynamic-ratio"},
                       {"scenario.kind", "ratio"},
                       {"ratio.kind", "dynamic"},
                       {"ratio.on", "on-splay"},
                       {"ratio.baseline", "off-opt"},
                       {"instances.count", "20"},
                       {"instances.n", "4"},
                       {"instances.m", "10"},
                       {"instances.base_seed", "11"}});
  }
  if (name == "learning-ratio") {
    return from_pairs({{"scenario.id", "learning-ratio"},
                       {"scenario.kind", "ratio"},
                       {"ratio.kind", "learning"},
                       {"ratio.on", "on-splay"},
                       {"ratio.baseline", "gen-opt"},
                       {"instances.n", "16"},
                       {"instances.zipf", "0,0.75,1.5"},
                       {"instances.lengths", "100,1000,10000"},
                       {"instances.seeds_per_instance", "30"},
                       {"instances.base_seed", "13"}});
  }
  throw ConfigError("unknown scenario: " + name + " (available: tau-bst, grid-vs-expander, "
                    "sat-entropy, static-ratio, dynamic-ratio, learning-ratio)");
}

// --- generators used by workloads and ratio corpora ---

std::vector<double> zipf_weights(int n, double s) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = std::pow(static_cast<double>(i + 1), -s);
  return w;
}

Generator make_iid_search_generator(int n_keys, const std::vector<double>& key_weights,
                                    std::uint64_t seed) {
  if (static_cast<int>(key_weights.size()) != n_keys) {
    throw std::invalid_argument("key weight size mismatch");
  }
  double total = 0;
  for (double w : key_weights) total += w;
  std::vector<CommRequest> support;
  std::vector<double> probs;
  for (int key = 1; key <= n_keys; ++key) {
    if (key_weights[key - 1] <= 0) continue;
    support.push_back({kRootSource, key});
    probs.push_back(key_weights[key - 1] / total);
  }
  return Generator::iid(n_keys + 1, std::move(support), std::move(probs), seed);
}

Generator make_uniform_pairs_generator(int n_keys, std::uint64_t seed) {
  std::vector<CommRequest> support;
  std::vector<double> probs;
  double p = 1.0 / (static_cast<double>(n_keys) * (n_keys - 1));
  for (int u = 1; u <= n_keys; ++u) {
    for (int v = 1; v <= n_keys; ++v) {
      if (u == v) continue;
      support.push_back({u, v});
      probs.push_back(p);
    }
  }
  return Generator::iid(n_keys + 1, std::move(support), std::move(probs), seed);
}

Generator make_product_pairs_generator(int n_keys, const std::vector<double>& node_weights,
                                       std::uint64_t seed) {
  if (static_cast<int>(node_weights.size()) != n_keys) {
    throw std::invalid_argument("node weight size mismatch");
  }
  std::vector<CommRequest> support;
  std::vector<double> probs;
  double total = 0;
  for (int u = 1; u <= n_keys; ++u) {
    for (int v = 1; v <= n_keys; ++v) {
      if (u == v) continue;
      total += node_weights[u - 1] * node_weights[v - 1];
    }
  }
  for (int u = 1; u <= n_keys; ++u) {
    for (int v = 1; v <= n_keys; ++v) {
      if (u == v) continue;
      support.push_back({u, v});
      probs.push_back(node_weights[u - 1] * node_weights[v - 1] / total);
    }
  }
  return Generator::iid(n_keys + 1, std::move(support), std::move(probs), seed);
}

Generator make_ring_markov_generator(int n_keys, double stay, std::uint64_t seed) {
  if (n_keys < 3) throw std::invalid_argument("ring markov needs n >= 3");
  if (stay < 0 || stay >= 1) throw std::invalid_argument("stay must be in [0,1)");
  // States are the ring pairs (1,2), (2,3), ..., (n,1); with probability
  // `stay` the chain repeats the pair, otherwise it advances along the ring.
  std::vector<CommRequest> support;
  for (int u = 1; u <= n_keys; ++u) {
    support.push_back({u, u == n_keys ? 1 : u + 1});
  }
  int states = n_keys;
  std::vector<double> initial(states, 1.0 / states);
  std::vector<std::vector<double>> transition(states, std::vector<double>(states, 0.0));
  for (int s = 0; s < states; ++s) {
    transition[s][s] = stay;
    transition[s][(s + 1) % states] = 1.0 - stay;
  }
  return Generator::markov(n_keys + 1, std::move(support), std::move(initial),
                           std::move(transition), seed);
}

namespace {

Generator sparse_random_pairs_generator(int n_keys, int support_size, std::uint64_t seed) {
  Rng rng(seed);
  std::map<std::pair<int, int>, double> chosen;
  while (static_cast<int>(chosen.size()) < support_size) {
    int u = 1 + static_cast<int>(rng.bounded(n_keys));
    int v = 1 + static_cast<int>(rng.bounded(n_keys));
    if (u == v) continue;
    chosen[{u, v}] = 0.25 + rng.uniform01();
  }
  std::vector<CommRequest> support;
  std::vector<double> probs;
  double total = 0;
  for (const auto& [e, w] : chosen) total += w;
  for (const auto& [e, w] : chosen) {
    support.push_back({e.first, e.second});
    probs.push_back(w / total);
  }
  return Generator::iid(n_keys + 1, std::move(support), std::move(probs), seed);
}

// Demand corpus for the self-adjusting tree network: spans near-zero to
// near-maximal source/destination entropies.
Generator sat_suite_generator(int index, std::uint64_t seed) {
  switch (index) {
    case 1: return make_uniform_pairs_generator(8, seed);
    case 2: return make_uniform_pairs_generator(16, seed);
    case 3: return make_uniform_pairs_generator(32, seed);
    case 4: return make_uniform_pairs_generator(63, seed);
    case 5: return make_product_pairs_generator(63, zipf_weights(63, 0.6), seed);
    case 6: return make_product_pairs_generator(63, zipf_weights(63, 1.0), seed);
    case 7: return make_product_pairs_generator(63, zipf_weights(63, 1.4), seed);
    case 8: return make_ring_markov_generator(63, 0.5, seed);
    case 9: return make_ring_markov_generator(63, 0.9, seed);
    case 10: return make_ring_markov_generator(63, 0.99, seed);
    case 11: return Generator::iid(64, {{1, 63}}, {1.0}, seed);  // single pair
    case 12: return sparse_random_pairs_generator(63, 16, seed);
    case 13: return sparse_random_pairs_generator(63, 32, seed);
    case 14: return sparse_random_pairs_generator(63, 64, seed);
    case 15: return make_product_pairs_generator(16, zipf_weights(16, 1.0), seed);
    case 16: return make_product_pairs_generator(32, zipf_weights(32, 1.0), seed);
    case 17: return make_uniform_pairs_generator(48, seed);
    case 18: return make_ring_markov_generator(16, 0.9, seed);
    case 19: return make_ring_markov_generator(32, 0.9, seed);
    case 20: return sparse_random_pairs_generator(63, 8, seed);
    default:
      throw ConfigError("sat-suite index out of range: " + std::to_string(index));
  }
}

std::vector<double> parse_weights(const ScenarioConfig& config, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : config.get_list(key)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad weight in " + key + ": " + item);
    }
  }
  return out;
}

DemandSequence expand_graph_trace(const DemandGraph& g) {
  DemandSequence seq;
  seq.n = g.n;
  for (const auto& [e, w] : g.edges) {
    long copies = std::lround(w);
    if (copies < 1 || std::abs(w - static_cast<double>(copies)) > 1e-9) {
      throw ConfigError("run workloads need integer demand weights");
    }
    for (long i = 0; i < copies; ++i) seq.requests.push_back({e.first, e.second});
  }
  return seq;
}

}  // namespace

Workload build_workload(const ScenarioConfig& config, std::uint64_t seed) {
  const std::string name = config.get("workload.name");
  try {
    if (name == "tau") {
      return {make_tau_workload(static_cast<int>(config.get_int("workload.k")),
                                static_cast<int>(config.get_int("workload.r"))),
              {}};
    }
    if (name == "grid") {
      return {expand_graph_trace(
                  make_grid_demand(static_cast<int>(config.get_int("workload.side")),
                                   static_cast<int>(config.get_int_or("workload.weight", 1)))),
              {}};
    }
    if (name == "star") {
      return {expand_graph_trace(
                  make_star_demand(static_cast<int>(config.get_int("workload.n")),
                                   parse_weights(config, "workload.weights"))),
              {}};
    }
    if (name == "trace") {
      try {
        return {read_trace(config.get("workload.path")), {}};
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& err) {
        throw ConfigError("workload trace: " + std::string(err.what()));
      }
    }

    int m = static_cast<int>(config.get_int("run.m"));
    Generator gen = [&]() -> Generator {
      if (name == "iid-uniform") {
        int n = static_cast<int>(config.get_int("workload.n"));
        return make_iid_search_generator(n, std::vector<double>(n, 1.0), seed);
      }
      if (name == "iid-zipf") {
        int n = static_cast<int>(config.get_int("workload.n"));
        return make_iid_search_generator(n, zipf_weights(n, config.get_real_or("workload.s", 1.0)),
                                         seed);
      }
      if (name == "pairs-uniform") {
        return make_uniform_pairs_generator(static_cast<int>(config.get_int("workload.n")), seed);
      }
      if (name == "pairs-zipf") {
        int n = static_cast<int>(config.get_int("workload.n"));
        return make_product_pairs_generator(n, zipf_weights(n, config.get_real_or("workload.s", 1.0)),
                                            seed);
      }
      if (name == "markov-ring") {
        return make_ring_markov_generator(static_cast<int>(config.get_int("workload.n")),
                                          config.get_real_or("workload.stay", 0.9), seed);
      }
      if (name == "sat-suite") {
        return sat_suite_generator(static_cast<int>(seed), derive_seed(0x5A7u, seed));
      }
      throw ConfigError("unknown workload: " + name);
    }();
    Workload w{sample(gen, m), std::move(gen)};
    return w;
  } catch (const std::invalid_argument& err) {
    throw ConfigError("workload " + name + ": " + err.what());
  }
}

// --- algorithm registry ---

namespace {

AlgorithmSpec make_alg_spec(const std::string& name, const std::string& topology,
                            const ScenarioConfig& config, const Workload& workload,
                            std::uint64_t seed) {
  if (topology == "bst") {
    if (name == "obl-balanced") return obl_balanced_bst();
    if (name == "stat-opt") return stat_opt_bst();
    if (name == "on-splay") return on_splay_bst();
    if (name == "off-opt") return off_opt_bst();
    if (name == "gen-opt") {
      if (!workload.generator) throw ConfigError("gen-opt needs a generated workload");
      return gen_opt_bst(*workload.generator);
    }
  } else if (topology == "tree-net") {
    if (name == "obl-fixed") return obl_fixed_treenet();
    if (name == "stat-opt") return stat_opt_treenet();
    if (name == "on-splaynet") return on_splaynet();
  } else if (topology == "net") {
    if (name == "obl-expander") {
      return obl_expander(static_cast<int>(config.get_int_or("net.degree", 3)), seed);
    }
    if (name == "stat-egotree") return stat_egotree();
  } else {
    throw ConfigError("unknown topology: " + topology);
  }
  throw ConfigError("algorithm " + name + " is not available for topology " + topology);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string metadata_block(const ScenarioConfig& config,
                           const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ostringstream out;
  out << "# version=" << kVersion << "\n";
  out << "# prng=" << kPrngId << "\n";
  for (const auto& [k, v] : extra) out << "# " << k << "=" << v << "\n";
  for (const auto& [k, v] : config.values) out << "# config." << k << "=" << v << "\n";
  return out.str();
}

std::string ledger_csv_text(const CostLedger& ledger, const std::string& metadata) {
  std::ostringstream out;
  out << metadata;
  out << "request_index,service,adjust,cumulative\n";
  double cumulative = 0;
  const auto& recs = ledger.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    cumulative += recs[i].service + recs[i].adjust;
    out << i << "," << fmt_num(recs[i].service) << "," << fmt_num(recs[i].adjust) << ","
        << fmt_num(cumulative) << "\n";
  }
  return out.str();
}

// --- ratio instance corpora ---

std::vector<RatioInstance> build_ratio_instances(const ScenarioConfig& config,
                                                 RatioKind kind) {
  std::vector<RatioInstance> instances;
  std::uint64_t base = static_cast<std::uint64_t>(config.get_int_or("instances.base_seed", 7));
  std::vector<int> lengths;
  if (config.has("instances.lengths")) {
    for (const auto& item : config.get_list("instances.lengths")) {
      lengths.push_back(std::stoi(item));
    }
  } else {
    lengths = {100, 1000, 10000};
  }

  if (kind == RatioKind::kStatic) {
    int count = static_cast<int>(config.get_int_or("instances.count", 10));
    int n_min = static_cast<int>(config.get_int_or("instances.n_min", 16));
    int n_max = static_cast<int>(config.get_int_or("instances.n_max", 64));
    for (int i = 0; i < count; ++i) {
      Rng rng(derive_seed(base, i));
      int n = n_min + static_cast<int>(rng.bounded(n_max - n_min + 1));
      std::vector<double> weights;
      switch (i % 3) {
        case 0: weights.assign(n, 1.0); break;
        case 1: weights = zipf_weights(n, 0.8 + 0.4 * rng.uniform01()); break;
        default:
          weights.resize(n);
          for (double& w : weights) w = 0.05 + rng.uniform01();
          break;
      }
      RatioInstance inst;
      inst.id = "iid-" + std::to_string(i);
      inst.n_keys = n;
      inst.generator = make_iid_search_generator(n, weights, derive_seed(base, 1000 + i));
      inst.lengths = lengths;
      instances.push_back(std::move(inst));
    }
  } else if (kind == RatioKind::kDynamic) {
    int count = static_cast<int>(config.get_int_or("instances.count", 20));
    int n = static_cast<int>(config.get_int_or("instances.n", 4));
    int m = static_cast<int>(config.get_int_or("instances.m", 10));
    for (int i = 0; i < count; ++i) {
      Generator gen = make_iid_search_generator(n, std::vector<double>(n, 1.0),
                                                derive_seed(base, i));
      RatioInstance inst;
      inst.id = "seq-" + std::to_string(i);
      inst.n_keys = n;
      inst.fixed_seq = sample(gen, m);
      instances.push_back(std::move(inst));
    }
  } else {
    int n = static_cast<int>(config.get_int_or("instances.n", 16));
    int seeds_per = static_cast<int>(config.get_int_or("instances.seeds_per_instance", 30));
    std::vector<std::string> zipfs = config.has("instances.zipf")
                                         ? config.get_list("instances.zipf")
                                         : std::vector<std::string>{"0", "0.75", "1.5"};
    std::vector<std::uint64_t> sample_seeds;
    for (int s = 1; s <= seeds_per; ++s) sample_seeds.push_back(s);
    int idx = 0;
    for (const auto& z : zipfs) {
      double s = std::stod(z);
      RatioInstance inst;
      inst.id = "zipf-" + z;
      inst.n_keys = n;
      inst.generator = make_iid_search_generator(n, zipf_weights(n, s), derive_seed(base, idx++));
      inst.lengths = lengths;
      inst.sample_seeds = sample_seeds;
      instances.push_back(std::move(inst));
    }
  }
  return instances;
}

RatioKind parse_ratio_kind(const std::string& raw) {
  if (raw == "static") return RatioKind::kStatic;
  if (raw == "dynamic") return RatioKind::kDynamic;
  if (raw == "learning") return RatioKind::kLearning;
  throw ConfigError("ratio.kind must be static, dynamic or learning, got " + raw);
}

}  // namespace

// --- scenario execution ---

namespace {

ScenarioResult run_kind_run(const ScenarioConfig& config, const fs::path& out_dir,
                            int workers, std::optional<std::uint64_t> seed_override) {
  const std::string topology = config.get_or("scenario.topology", "bst");
  auto alg_names = config.get_list("scenario.algorithms");
  std::vector<std::uint64_t> seeds =
      seed_override ? std::vector<std::uint64_t>{*seed_override}
                    : config.get_seeds_or("run.seeds", {1});

  struct Task {
    std::string alg;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& alg : alg_names) {
    for (std::uint64_t s : seeds) tasks.push_back({alg, s});
  }

  std::vector<std::string> rows(tasks.size());
  std::vector<fs::path> ledger_files(tasks.size());

  parallel_for_indexed(static_cast<int>(tasks.size()), workers, [&](int i) {
    const Task& task = tasks[i];
    Workload workload = build_workload(config, task.seed);
    AlgorithmSpec spec = make_alg_spec(task.alg, topology, config, workload, task.seed);
    CostLedger ledger = run_algorithm(spec, {}, workload.seq);
    EntropyReport rep = sequence_entropies(workload.seq);

    fs::path ledger_path =
        out_dir / (config.id + "." + task.alg + ".s" + std::to_string(task.seed) +
                   ".ledger.csv");
    write_file_atomic(ledger_path,
                      ledger_csv_text(ledger, metadata_block(config,
                                                             {{"scenario", config.id},
                                                              {"algorithm", spec.name},
                                                              {"seed", std::to_string(task.seed)}})));
    ledger_files[i] = ledger_path;

    std::ostringstream row;
    row << config.id << "," << spec.name << "," << task.seed << "," << workload.seq.n << ","
        << workload.seq.length() << "," << fmt_num(ledger.total_service()) << ","
        << fmt_num(ledger.total_adjust()) << "," << fmt_num(ledger.total()) << ","
        << fmt_num(ledger.average()) << "," << fmt_num(rep.entropy_bits) << ","
        << fmt_num(rep.source_entropy_bits) << "," << fmt_num(rep.dest_entropy_bits) << ","
        << fmt_num(rep.conditional_yx_bits) << "," << fmt_num(rep.conditional_xy_bits);
    rows[i] = row.str();
  });

  std::ostringstream summary;
  summary << metadata_block(config, {{"scenario", config.id}});
  summary << "scenario,algorithm,seed,n,m,total_service,total_adjust,total_cost,avg_cost,"
             "H_pair,H_src,H_dst,H_dst_given_src,H_src_given_dst\n";
  for (const auto& row : rows) summary << row << "\n";

  fs::path summary_path = out_dir / (config.id + ".summary.csv");
  write_file_atomic(summary_path, summary.str());

  ScenarioResult result;
  result.outputs.push_back(summary_path);
  result.outputs.insert(result.outputs.end(), ledger_files.begin(), ledger_files.end());
  return result;
}

ScenarioResult run_kind_ratio(const ScenarioConfig& config, const fs::path& out_dir,
                              int workers, std::optional<std::uint64_t> seed_override) {
  RatioKind kind = parse_ratio_kind(config.get("ratio.kind"));
  ScenarioConfig effective = config;
  if (seed_override) {
    effective.values["instances.base_seed"] = std::to_string(*seed_override);
  }
  std::vector<RatioInstance> instances = build_ratio_instances(effective, kind);

  const std::string topology = "bst";
  Workload dummy{};
  AlgorithmSpec on = make_alg_spec(effective.get_or("ratio.on", "on-splay"), topology,
                                   effective, dummy, 0);
  AlgorithmSpec baseline = [&]() -> AlgorithmSpec {
    std::string name = effective.get_or("ratio.baseline", "stat-opt");
    if (name == "gen-opt") {
      // evaluate_ratio fills the per-instance generator in
      AlgorithmSpec spec;
      spec.cls = AlgClass::kGen;
      spec.topo = TopoKind::kBst;
      spec.name = "gen.opt-bst";
      return spec;
    }
    return make_alg_spec(name, topology, effective, dummy, 0);
  }();

  RatioReport report =
      evaluate_ratio(kind, on, baseline, instances, effective.id, workers);

  std::ostringstream main_csv;
  std::vector<std::pair<std::string, std::string>> extra{{"scenario", effective.id}};
  if (kind == RatioKind::kLearning) {
    extra.push_back({"ci95_lo", fmt_num(report.ci_lo)});
    extra.push_back({"ci95_hi", fmt_num(report.ci_hi)});
  }
  main_csv << metadata_block(effective, extra);
  main_csv << "kind,scenario,rho,beta,numerator,denominator,m,n,seed\n";
  main_csv << to_string(report.kind) << "," << report.scenario_id << ","
           << fmt_num(report.rho) << "," << fmt_num(report.beta) << ","
           << fmt_num(report.numerator_cost) << "," << fmt_num(report.denominator_cost)
           << "," << report.m << "," << report.n << "," << report.seed << "\n";

  std::ostringstream points_csv;
  points_csv << metadata_block(effective, {{"scenario", effective.id}});
  points_csv << "instance,m,n,seed,on_cost,base_cost,ratio\n";
  for (const auto& p : report.points) {
    points_csv << p.instance_id << "," << p.m << "," << p.n << "," << p.seed << ","
               << fmt_num(p.on_cost) << "," << fmt_num(p.base_cost) << ","
               << fmt_num(p.ratio) << "\n";
  }

  fs::path main_path = out_dir / (effective.id + ".ratio.csv");
  fs::path points_path = out_dir / (effective.id + ".ratio_points.csv");
  write_file_atomic(main_path, main_csv.str());
  write_file_atomic(points_path, points_csv.str());
  return {{main_path, points_path}};
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, const fs::path& out_dir,
                            int workers, std::optional<std::uint64_t> seed_override) {
  fs::create_directories(out_dir);
  if (config.kind == "run") {
    return run_kind_run(config, out_dir, workers, seed_override);
  }
  return run_kind_ratio(config, out_dir, workers, seed_override);
}

// --- entropy command ---

EntropyRow entropy_of_file(const fs::path& path) {
  std::ifstream probe(path);
  if (!probe) throw std::runtime_error("cannot open " + path.string());
  std::string header;
  std::getline(probe, header);
  probe.close();

  EntropyRow row;
  if (header.find(" m=") != std::string::npos) {
    DemandSequence seq = read_trace(path);
    if (seq.requests.empty()) throw std::runtime_error(path.string() + ": empty trace");
    row.n = seq.n;
    row.total_weight = seq.length();
    row.report = sequence_entropies(seq);
  } else {
    DemandGraph g = read_demand_graph(path);
    row.n = g.n;
    row.total_weight = g.total_weight();
    row.report = graph_entropies(g);
  }
  return row;
}

void write_entropy_csv(std::ostream& out, const EntropyRow& row) {
  out << "n,m,H_pair,H_src,H_dst,H_dst_given_src,H_src_given_dst\n";
  out << row.n << "," << fmt_num(row.total_weight) << "," << fmt_num(row.report.entropy_bits)
      << "," << fmt_num(row.report.source_entropy_bits) << ","
      << fmt_num(row.report.dest_entropy_bits) << ","
      << fmt_num(row.report.conditional_yx_bits) << ","
      << fmt_num(row.report.conditional_xy_bits) << "\n";
}

int resolve_workers(int requested) {
  if (const char* env = std::getenv("SAN_WORKBENCH_WORKERS")) {
    try {
      int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad SAN_WORKBENCH_WORKERS: ") + env);
    }
  }
  if (requested >= 1) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace san
