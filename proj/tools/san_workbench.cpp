// Experiment runner for demand-oblivious, demand-aware and self-adjusting
// topologies: scenario execution, entropy reports, optimality ratios, trace
// generation and network export.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "san/costmodel.hpp"
#include "san/scenario.hpp"
#include "san/topo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

san::ScenarioConfig resolve_scenario(const std::string& config_path,
                                     const std::string& scenario_name) {
  if (!config_path.empty() && !scenario_name.empty()) {
    throw san::ConfigError("pass either --config or --scenario, not both");
  }
  if (!config_path.empty()) return san::load_config_file(config_path);
  if (!scenario_name.empty()) return san::builtin_scenario(scenario_name);
  throw san::ConfigError("need --config <file> or --scenario <name>");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-adjusting network workbench"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario_name;
  std::string out_dir = "out";
  std::string input_path;
  std::string output_path;
  int workers = 0;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario config file");
    cmd->add_option("--scenario", scenario_name, "bundled scenario name");
    cmd->add_option("--out-dir", out_dir, "output directory");
    cmd->add_option("--workers", workers, "worker threads (0 = hardware)");
    cmd->add_option("--seed", seed, "override the scenario seed(s)");
  };

  CLI::App* run = app.add_subcommand("run", "execute a scenario and emit CSVs");
  add_common(run);

  CLI::App* ratio = app.add_subcommand("ratio", "evaluate an optimality ratio scenario");
  add_common(ratio);
  std::string ratio_kind;
  ratio->add_option("--kind", ratio_kind, "static | dynamic | learning");

  CLI::App* entropy = app.add_subcommand("entropy", "entropy report for a trace or graph file");
  entropy->add_option("--in", input_path, "trace or demand-graph file")->required();
  entropy->add_option("--out", output_path, "output CSV (default stdout)");

  CLI::App* gen_trace = app.add_subcommand("gen-trace", "write a workload as a trace file");
  add_common(gen_trace);
  gen_trace->add_option("--out", output_path, "trace file path")->required();
  std::string graph_out;
  gen_trace->add_option("--graph-out", graph_out, "also write the aggregated demand graph");

  CLI::App* export_net = app.add_subcommand("export-net", "construct and export a network");
  std::string net_kind = "expander";
  int net_n = 64;
  int net_degree = 3;
  int net_side = 8;
  std::uint64_t net_seed = 1;
  export_net->add_option("--kind", net_kind, "expander | grid | egotree-grid | sat");
  export_net->add_option("--n", net_n, "node count (expander, sat)");
  export_net->add_option("--degree", net_degree, "expander degree");
  export_net->add_option("--side", net_side, "grid side (grid, egotree-grid)");
  export_net->add_option("--net-seed", net_seed, "expander seed");
  export_net->add_option("--out", output_path, "network file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed() || ratio->parsed()) {
      san::ScenarioConfig config = resolve_scenario(config_path, scenario_name);
      if (ratio->parsed()) {
        if (config.kind != "ratio") {
          throw san::ConfigError("scenario " + config.id + " is not a ratio scenario");
        }
        if (!ratio_kind.empty() && config.get_or("ratio.kind", "") != ratio_kind) {
          throw san::ConfigError("scenario " + config.id + " has ratio.kind=" +
                                 config.get_or("ratio.kind", "?") + ", not " + ratio_kind);
        }
      }
      auto result = san::run_scenario(config, out_dir, san::resolve_workers(workers), seed);
      for (const auto& p : result.outputs) std::cout << p.string() << "\n";
      return kExitOk;
    }

    if (entropy->parsed()) {
      san::EntropyRow row = san::entropy_of_file(input_path);
      if (output_path.empty()) {
        san::write_entropy_csv(std::cout, row);
      } else {
        std::ofstream out(output_path);
        if (!out) throw std::runtime_error("cannot open " + output_path);
        san::write_entropy_csv(out, row);
      }
      return kExitOk;
    }

    if (gen_trace->parsed()) {
      san::ScenarioConfig config = resolve_scenario(config_path, scenario_name);
      san::Workload workload = san::build_workload(config, seed.value_or(1));
      san::write_trace(output_path, workload.seq);
      std::cout << output_path << "\n";
      if (!graph_out.empty()) {
        san::write_demand_graph(graph_out, san::build_demand_graph(workload.seq));
        std::cout << graph_out << "\n";
      }
      return kExitOk;
    }

    if (export_net->parsed()) {
      if (net_kind == "expander") {
        san::write_network(output_path, san::build_random_regular(net_n, net_degree, net_seed));
      } else if (net_kind == "grid") {
        san::write_network(output_path, san::make_grid_network(net_side));
      } else if (net_kind == "egotree-grid") {
        auto build = san::build_ego_tree_network(san::make_grid_demand(net_side, 1));
        san::write_network(output_path, build.net);
      } else if (net_kind == "sat") {
        san::write_network(output_path, san::build_selfadjusting_tree(net_n).snapshot());
      } else {
        throw san::ConfigError("unknown network kind: " + net_kind);
      }
      std::cout << output_path << "\n";
      return kExitOk;
    }
  } catch (const san::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInvariant;
  }
  return kExitConfig;
}
