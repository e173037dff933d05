#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "san/costmodel.hpp"
#include "san/entropy.hpp"

namespace san {

inline constexpr std::string_view kVersion = "0.1.0";

/// Invalid configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key-value configuration with [section] headers; keys are addressed
/// as "section.key". Diff-friendly on purpose: golden outputs echo it back.
struct ScenarioConfig {
  std::string id;
  std::string kind;  // "run" | "ratio"
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key) const;
  long get_int_or(const std::string& key, long fallback) const;
  double get_real_or(const std::string& key, double fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<std::uint64_t> get_seeds_or(const std::string& key,
                                          std::vector<std::uint64_t> fallback) const;
};

ScenarioConfig parse_config(std::istream& in, const std::string& origin);
ScenarioConfig load_config_file(const std::filesystem::path& path);

ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

/// Workload materialized for one experiment seed.
struct Workload {
  DemandSequence seq;
  std::optional<Generator> generator;  // present for generated workloads
};

Workload build_workload(const ScenarioConfig& config, std::uint64_t seed);

// Generator builders shared by scenarios, ratio corpora and tests. Search
// generators issue requests from the root source; pair generators draw both
// endpoints from keys 1..n_keys.
std::vector<double> zipf_weights(int n, double s);
Generator make_iid_search_generator(int n_keys, const std::vector<double>& key_weights,
                                    std::uint64_t seed);
Generator make_uniform_pairs_generator(int n_keys, std::uint64_t seed);
Generator make_product_pairs_generator(int n_keys, const std::vector<double>& node_weights,
                                       std::uint64_t seed);
Generator make_ring_markov_generator(int n_keys, double stay, std::uint64_t seed);

struct ScenarioResult {
  std::vector<std::filesystem::path> outputs;
};

/// Executes a run or ratio scenario, writing ledger/summary/ratio CSVs under
/// out_dir. Fan-out across (algorithm, seed) tasks uses `workers` threads;
/// outputs are byte-identical regardless of worker count.
ScenarioResult run_scenario(const ScenarioConfig& config,
                            const std::filesystem::path& out_dir, int workers,
                            std::optional<std::uint64_t> seed_override = {});

/// Reads a trace ("n=.. m=..") or demand-graph ("n=..") file and computes its
/// entropy report. total_weight is m for traces.
struct EntropyRow {
  int n = 0;
  double total_weight = 0;
  EntropyReport report;
};
EntropyRow entropy_of_file(const std::filesystem::path& path);
void write_entropy_csv(std::ostream& out, const EntropyRow& row);

/// SAN_WORKBENCH_WORKERS overrides the requested worker count.
int resolve_workers(int requested);

std::string fmt_num(double value);

}  // namespace san
