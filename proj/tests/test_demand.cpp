#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "san/demand.hpp"

using namespace san;

TEST_CASE("build_demand_graph counts pairs") {
  DemandSequence seq{4, {{0, 1}}};
  auto g = build_demand_graph(seq);
  CHECK(g.edges.size() == 1);
  CHECK(g.edges.at({0, 1}) == 1.0);

  DemandSequence seq2{4, {{0, 1}, {0, 1}, {2, 0}}};
  auto g2 = build_demand_graph(seq2);
  CHECK(g2.edges.size() == 2);
  CHECK(g2.edges.at({0, 1}) == 2.0);
  CHECK(g2.edges.at({2, 0}) == 1.0);
}

TEST_CASE("build_demand_graph rejects empty demand") {
  DemandSequence seq{4, {}};
  CHECK_THROWS_WITH_AS(build_demand_graph(seq), "empty demand", std::invalid_argument);
}

TEST_CASE("grid trace aggregates to the grid demand") {
  auto seq = make_grid_trace(4, 1);
  CHECK(seq.length() == 48);
  auto g = build_demand_graph(seq);
  auto grid = make_grid_demand(4, 1);
  CHECK(g.edges == grid.edges);
  // independent enumeration of the 4x4 directed adjacencies
  int expected = 0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (c + 1 < 4) expected += 2;
      if (r + 1 < 4) expected += 2;
    }
  }
  CHECK(expected == 48);
  CHECK(static_cast<int>(g.edges.size()) == expected);
  for (const auto& [e, w] : g.edges) CHECK(w == 1.0);
}

TEST_CASE("graph weights sum to sequence length") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    Rng rng(seed);
    int n = 4 + static_cast<int>(rng.bounded(20));
    DemandSequence seq;
    seq.n = n;
    int m = 1 + static_cast<int>(rng.bounded(300));
    for (int i = 0; i < m; ++i) {
      int u = static_cast<int>(rng.bounded(n));
      int v = static_cast<int>(rng.bounded(n));
      if (u == v) v = (v + 1) % n;
      seq.requests.push_back({u, v});
    }
    CHECK(build_demand_graph(seq).total_weight() == static_cast<double>(m));
  }
}

TEST_CASE("tau workload block structure") {
  auto seq = make_tau_workload(2, 3);
  std::vector<int> dsts = seq.destinations();
  CHECK(dsts == std::vector<int>{1, 1, 1, 3, 3, 3});
  CHECK(seq.n == 4);  // keys 1..3 plus the reserved source id
  for (const auto& r : seq.requests) CHECK(r.src == kRootSource);

  auto seq4 = make_tau_workload(4, 1);
  CHECK(seq4.destinations() == std::vector<int>{1, 3, 5, 7});
  CHECK(tau_item_count(4) == 15);

  auto big = make_tau_workload(10, 1000);
  CHECK(big.length() == 10000);
  CHECK(tau_item_count(10) == 1023);

  CHECK_THROWS_AS(make_tau_workload(1, 5), std::invalid_argument);

  // destination changes exactly k-1 times
  for (int k : {2, 3, 5, 8}) {
    for (int r : {1, 4, 9}) {
      auto t = make_tau_workload(k, r);
      auto d = t.destinations();
      int changes = 0;
      for (std::size_t i = 1; i < d.size(); ++i) changes += d[i] != d[i - 1];
      CHECK(changes == k - 1);
      CHECK(std::set<int>(d.begin(), d.end()).size() == static_cast<std::size_t>(k));
    }
  }
}

TEST_CASE("grid demand shape") {
  auto g2 = make_grid_demand(2, 1);
  CHECK(g2.n == 4);
  CHECK(g2.edges.size() == 8);

  auto g4 = make_grid_demand(4, 1);
  CHECK(g4.edges.size() == 48);

  for (int side : {2, 3, 4, 7, 16}) {
    auto g = make_grid_demand(side, 2);
    CHECK(static_cast<int>(g.edges.size()) == 2 * (2 * side * (side - 1)));
    CHECK(g.max_out_degree() <= 4);
  }
  CHECK(make_grid_demand(4, 1).avg_out_degree() == 3.0);  // 48 edges / 16 nodes
  CHECK_THROWS_AS(make_grid_demand(1, 1), std::invalid_argument);
}

TEST_CASE("star demand") {
  auto g = make_star_demand(3, {1.0, 1.0});
  CHECK(g.edges.size() == 2);
  CHECK(g.edges.at({0, 1}) == 1.0);
  CHECK(g.edges.at({0, 2}) == 1.0);
  CHECK_THROWS_AS(make_star_demand(9, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_star_demand(3, {1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("iid sampling: point mass and determinism") {
  auto gen = Generator::iid(4, {{0, 1}}, {1.0}, 99);
  auto seq = sample(gen, 5);
  CHECK(seq.length() == 5);
  for (const auto& r : seq.requests) CHECK(r == CommRequest{0, 1});

  auto gen2 = Generator::iid(8, {{0, 1}, {2, 3}, {4, 5}}, {0.2, 0.5, 0.3}, 1234);
  auto a = sample(gen2, 200);
  auto b = sample(gen2, 200);
  CHECK(a.requests == b.requests);
  gen2.seed = 1235;
  auto c = sample(gen2, 200);
  CHECK(a.requests != c.requests);
}

TEST_CASE("markov chain follows its transition frequencies") {
  // two pair-states with 0.9 self-loop
  auto gen = Generator::markov(4, {{0, 1}, {2, 3}}, {0.5, 0.5},
                               {{0.9, 0.1}, {0.1, 0.9}}, 42);
  auto seq = sample(gen, 10000);
  int self_transitions = 0;
  for (int i = 1; i < seq.length(); ++i) {
    self_transitions += seq.requests[i] == seq.requests[i - 1];
  }
  double freq = static_cast<double>(self_transitions) / (seq.length() - 1);
  CHECK(freq == doctest::Approx(0.9).epsilon(0.025));
}

TEST_CASE("invalid stochastic matrices are rejected") {
  CHECK_THROWS_AS(Generator::iid(4, {{0, 1}, {2, 3}}, {0.2, 0.3}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(Generator::iid(4, {{0, 1}, {2, 3}}, {1.2, -0.2}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(Generator::markov(4, {{0, 1}, {2, 3}}, {0.5, 0.5},
                                    {{0.9, 0.2}, {0.1, 0.9}}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(Generator::iid(4, {{1, 1}}, {1.0}, 1), std::invalid_argument);
}

TEST_CASE("markov stationary distribution matches long-run frequencies") {
  auto gen = Generator::markov(6, {{1, 2}, {3, 4}, {5, 1}}, {1.0, 0.0, 0.0},
                               {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}},
                               7);
  auto pi = gen.stationary_pair_probs();
  // symmetric cycle: uniform stationary distribution
  for (double p : pi) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-9));
}

TEST_CASE("trace file round trip") {
  auto dir = std::filesystem::temp_directory_path() / "san_demand_test";
  std::filesystem::create_directories(dir);
  auto gen = Generator::iid(16, {{0, 1}, {2, 3}, {14, 7}}, {0.25, 0.5, 0.25}, 5);
  auto seq = sample(gen, 57);
  write_trace(dir / "t.trace", seq);
  auto back = read_trace(dir / "t.trace");
  CHECK(back.n == seq.n);
  CHECK(back.requests == seq.requests);
}

TEST_CASE("demand graph file round trip") {
  auto dir = std::filesystem::temp_directory_path() / "san_demand_test";
  std::filesystem::create_directories(dir);
  auto g = make_star_demand(9, {64, 32, 16, 8, 4, 2, 1, 1});
  write_demand_graph(dir / "g.graph", g);
  auto back = read_demand_graph(dir / "g.graph");
  CHECK(back.n == g.n);
  CHECK(back.edges == g.edges);
}

TEST_CASE("malformed files report the line") {
  auto dir = std::filesystem::temp_directory_path() / "san_demand_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "bad.trace");
    out << "n=4 m=2\n0 1\nnot a pair\n";
  }
  try {
    read_trace(dir / "bad.trace");
    CHECK(false);
  } catch (const std::runtime_error& err) {
    CHECK(std::string(err.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("relabel permutes endpoints") {
  auto g = make_star_demand(3, {2.0, 5.0});
  auto h = relabel(g, {2, 0, 1});
  CHECK(h.edges.at({2, 0}) == 2.0);
  CHECK(h.edges.at({2, 1}) == 5.0);
}
