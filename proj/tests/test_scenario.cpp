#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "san/scenario.hpp"

using namespace san;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "san_scenario_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "[scenario]\n"
      "id = demo\n"
      "kind = run\n"
      "topology = bst\n"
      "algorithms = obl-balanced, on-splay\n"
      "\n"
      "[workload]\n"
      "name = tau\n"
      "k = 3\n"
      "r = 2\n");
  auto config = parse_config(in, "inline");
  CHECK(config.id == "demo");
  CHECK(config.get("workload.name") == "tau");
  CHECK(config.get_int("workload.k") == 3);
  CHECK(config.get_list("scenario.algorithms") ==
        std::vector<std::string>{"obl-balanced", "on-splay"});
  CHECK(config.get_or("run.m", "77") == "77");
  CHECK_THROWS_AS(config.get("missing.key"), ConfigError);
}

TEST_CASE("config parse errors carry line numbers") {
  std::istringstream bad("[scenario]\nname-without-value\n");
  try {
    parse_config(bad, "inline");
    CHECK(false);
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("inline:2") != std::string::npos);
  }

  std::istringstream orphan("key = value\n");
  CHECK_THROWS_AS(parse_config(orphan, "x"), ConfigError);

  std::istringstream bad_kind("[scenario]\nid = a\nkind = sideways\n");
  CHECK_THROWS_AS(parse_config(bad_kind, "x"), ConfigError);
}

TEST_CASE("builtin scenarios are well formed") {
  for (const auto& name : builtin_scenario_names()) {
    auto config = builtin_scenario(name);
    CHECK(config.id == name);
    CHECK((config.kind == "run" || config.kind == "ratio"));
  }
  CHECK_THROWS_AS(builtin_scenario("nope"), ConfigError);
}

TEST_CASE("workload factory") {
  auto tau = builtin_scenario("tau-bst");
  auto w = build_workload(tau, 1);
  CHECK(w.seq.length() == 10000);
  CHECK_FALSE(w.generator.has_value());

  std::istringstream in(
      "[scenario]\nid = gen\nkind = run\n"
      "[workload]\nname = iid-zipf\nn = 12\ns = 1.0\n"
      "[run]\nm = 500\n");
  auto config = parse_config(in, "inline");
  auto gw = build_workload(config, 3);
  CHECK(gw.seq.length() == 500);
  CHECK(gw.generator.has_value());
  CHECK(gw.seq.n == 13);

  // identical seed gives an identical sequence, different seed differs
  CHECK(build_workload(config, 3).seq.requests == gw.seq.requests);
  CHECK(build_workload(config, 4).seq.requests != gw.seq.requests);
}

TEST_CASE("run scenario emits summary and ledgers, deterministically") {
  std::istringstream in(
      "[scenario]\nid = mini\nkind = run\ntopology = bst\n"
      "algorithms = obl-balanced,stat-opt,on-splay\n"
      "[workload]\nname = tau\nk = 4\nr = 25\n"
      "[run]\nseeds = 1\n");
  auto config = parse_config(in, "inline");

  auto dir1 = fresh_dir("run1");
  auto dir2 = fresh_dir("run2");
  auto res1 = run_scenario(config, dir1, 1);
  auto res2 = run_scenario(config, dir2, 2);  // different worker count
  REQUIRE(res1.outputs.size() == res2.outputs.size());
  for (std::size_t i = 0; i < res1.outputs.size(); ++i) {
    CHECK(slurp(res1.outputs[i]) == slurp(res2.outputs[i]));
  }

  std::string summary = slurp(dir1 / "mini.summary.csv");
  CHECK(summary.find("# version=") != std::string::npos);
  CHECK(summary.find("# prng=") != std::string::npos);
  CHECK(summary.find("obl.balanced-bst,1,16,100") != std::string::npos);
  // oblivious balanced tree on tau(4): every destination is a depth-4 leaf
  CHECK(summary.find("100,400,0,400,4,") != std::string::npos);
}

TEST_CASE("bundled tau-bst scenario reproduces the three regimes") {
  auto dir = fresh_dir("tau_bundled");
  run_scenario(builtin_scenario("tau-bst"), dir, 2);
  std::istringstream summary(slurp(dir / "tau-bst.summary.csv"));
  std::string line;
  std::map<std::string, double> avg;
  while (std::getline(summary, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("scenario,", 0) == 0) continue;
    std::stringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 14);
    avg[fields[1]] = std::stod(fields[8]);
  }
  CHECK(avg.at("obl.balanced-bst") == 10.0);
  CHECK(avg.at("stat.opt-bst") <= std::log2(10.0) + 2.0);
  CHECK(avg.at("on.splay-bst") <= 4.0);
  CHECK(avg.at("on.splay-bst") < avg.at("stat.opt-bst"));
}

TEST_CASE("ledger CSV export") {
  auto dir = fresh_dir("ledger_csv");
  CostLedger ledger;
  ledger.charge(3, 1);
  ledger.charge(2, 0);
  write_ledger_csv(dir / "ledger.csv", ledger, {{"scenario", "demo"}});
  std::string text = slurp(dir / "ledger.csv");
  CHECK(text ==
        "# scenario=demo\n"
        "request_index,service,adjust,cumulative\n"
        "0,3,1,4\n"
        "1,2,0,6\n");
}

TEST_CASE("ratio scenario writes report and points files") {
  std::istringstream in(
      "[scenario]\nid = r\nkind = ratio\n"
      "[ratio]\nkind = static\non = on-splay\nbaseline = stat-opt\n"
      "[instances]\ncount = 2\nn_min = 8\nn_max = 16\nlengths = 100,1000\n"
      "base_seed = 3\n");
  auto config = parse_config(in, "inline");
  auto dir = fresh_dir("ratio");
  auto res = run_scenario(config, dir, 1);
  REQUIRE(res.outputs.size() == 2);

  std::string report = slurp(dir / "r.ratio.csv");
  CHECK(report.find("kind,scenario,rho,beta,numerator,denominator,m,n,seed") !=
        std::string::npos);
  CHECK(report.find("static,r,") != std::string::npos);

  std::string points = slurp(dir / "r.ratio_points.csv");
  CHECK(points.find("instance,m,n,seed,on_cost,base_cost,ratio") != std::string::npos);
  CHECK(std::count(points.begin(), points.end(), '\n') >= 5);  // header + 4 points
}

TEST_CASE("entropy of trace and graph files") {
  auto dir = fresh_dir("entropy");
  write_trace(dir / "single.trace", DemandSequence{4, {{0, 1}, {0, 1}}});
  auto row = entropy_of_file(dir / "single.trace");
  CHECK(row.total_weight == 2.0);
  CHECK(row.report.entropy_bits == 0.0);
  CHECK(row.report.conditional_yx_bits == 0.0);

  write_demand_graph(dir / "grid.graph", make_grid_demand(4, 1));
  auto grid_row = entropy_of_file(dir / "grid.graph");
  CHECK(grid_row.n == 16);
  CHECK(grid_row.report.conditional_yx_bits == doctest::Approx(1.6258145837).epsilon(1e-6));

  write_demand_graph(dir / "star.graph", make_star_demand(9, std::vector<double>(8, 1.0)));
  auto star_row = entropy_of_file(dir / "star.graph");
  CHECK(star_row.report.conditional_yx_bits == doctest::Approx(3.0).epsilon(1e-12));

  std::ostringstream out;
  write_entropy_csv(out, grid_row);
  CHECK(out.str().find("n,m,H_pair,H_src,H_dst,H_dst_given_src,H_src_given_dst\n") == 0);
  CHECK(out.str().find("16,48,") != std::string::npos);
}

TEST_CASE("a missing workload trace is a configuration error") {
  std::istringstream in(
      "[scenario]\nid = t\nkind = run\ntopology = bst\nalgorithms = on-splay\n"
      "[workload]\nname = trace\npath = /nonexistent/definitely.trace\n");
  auto config = parse_config(in, "inline");
  CHECK_THROWS_AS(build_workload(config, 1), ConfigError);
}

TEST_CASE("seed override narrows a run to one seed") {
  std::istringstream in(
      "[scenario]\nid = seeded\nkind = run\ntopology = bst\n"
      "algorithms = on-splay\n"
      "[workload]\nname = iid-uniform\nn = 8\n"
      "[run]\nm = 64\nseeds = 1,2,3\n");
  auto config = parse_config(in, "inline");
  auto dir = fresh_dir("override");
  auto res = run_scenario(config, dir, 1, 9u);
  // one ledger (seed 9) plus the summary
  CHECK(res.outputs.size() == 2);
  CHECK(fs::exists(dir / "seeded.on-splay.s9.ledger.csv"));
}

TEST_CASE("shipped sample configs load and run") {
  fs::path configs = fs::path(__FILE__).parent_path().parent_path() / "configs";
  auto run_cfg = load_config_file(configs / "sample-run.cfg");
  CHECK(run_cfg.id == "zipf-bst");
  auto w = build_workload(run_cfg, 1);
  CHECK(w.seq.length() == 20000);

  auto ratio_cfg = load_config_file(configs / "sample-ratio.cfg");
  CHECK(ratio_cfg.kind == "ratio");
  CHECK(ratio_cfg.get("ratio.baseline") == "stat-opt");
}

TEST_CASE("generator builders validate and reproduce") {
  auto g = make_uniform_pairs_generator(6, 4);
  CHECK(g.support.size() == 30);
  auto seq = sample(g, 100);
  for (const auto& r : seq.requests) {
    CHECK(r.src >= 1);
    CHECK(r.dst >= 1);
    CHECK(r.src != r.dst);
  }

  auto ring = make_ring_markov_generator(8, 0.9, 5);
  auto rs = sample(ring, 400);
  CHECK(rs.length() == 400);

  auto zipf = zipf_weights(4, 1.0);
  CHECK(zipf[0] == 1.0);
  CHECK(zipf[1] == doctest::Approx(0.5));
  CHECK(zipf[3] == doctest::Approx(0.25));
}
