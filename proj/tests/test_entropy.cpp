#include <doctest.h>

#include <vector>

#include "san/entropy.hpp"
#include "oracles.hpp"

using namespace san;

TEST_CASE("empirical entropy basics") {
  CHECK(empirical_entropy(std::vector<double>{7}) == 0.0);
  CHECK(empirical_entropy(std::vector<double>{1, 1, 1, 1, 1, 1, 1, 1}) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(empirical_entropy(std::vector<double>{2, 1, 1}) ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS_AS(empirical_entropy(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(empirical_entropy(std::vector<double>{0, 0}), std::invalid_argument);
}

TEST_CASE("entropy is maximal exactly for uniform counts") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    int k = 2 + static_cast<int>(rng.bounded(30));
    std::vector<double> counts(k);
    bool uniform = true;
    for (double& c : counts) c = 1 + static_cast<double>(rng.bounded(50));
    for (double c : counts) uniform = uniform && c == counts[0];
    double h = empirical_entropy(counts);
    CHECK(h <= std::log2(static_cast<double>(k)) + 1e-12);
    if (!uniform) CHECK(h < std::log2(static_cast<double>(k)) - 1e-12);
    CHECK(h == doctest::Approx(oracle::entropy_bits(counts)).epsilon(1e-12));
  }
  CHECK(empirical_entropy(std::vector<double>{5, 5, 5, 5}) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sequence entropies of degenerate and tau demands") {
  DemandSequence one{4, {{0, 1}, {0, 1}, {0, 1}}};
  auto rep = sequence_entropies(one);
  CHECK(rep.entropy_bits == 0.0);
  CHECK(rep.source_entropy_bits == 0.0);
  CHECK(rep.dest_entropy_bits == 0.0);
  CHECK(rep.conditional_yx_bits == 0.0);
  CHECK(rep.conditional_xy_bits == 0.0);

  auto tau = make_tau_workload(4, 10);
  auto tau_rep = sequence_entropies(tau);
  CHECK(tau_rep.dest_entropy_bits == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tau_rep.source_entropy_bits == 0.0);
}

TEST_CASE("grid conditional entropy matches the closed form") {
  double expected = oracle::grid_conditional_entropy(4);
  CHECK(expected == doctest::Approx(1.6258145836939115).epsilon(1e-12));

  auto g = make_grid_demand(4, 1);
  CHECK(conditional_entropy(g) == doctest::Approx(expected).epsilon(1e-9));

  auto trace_rep = sequence_entropies(make_grid_trace(4, 1));
  CHECK(trace_rep.conditional_yx_bits == doctest::Approx(expected).epsilon(1e-9));

  for (int side = 2; side <= 32; ++side) {
    CHECK(conditional_entropy(make_grid_demand(side, 1)) <
          doctest::Approx(2.0).epsilon(0));
    CHECK(conditional_entropy(make_grid_demand(side, 1)) ==
          doctest::Approx(oracle::grid_conditional_entropy(side)).epsilon(1e-9));
  }
}

TEST_CASE("star conditional entropy") {
  auto uniform = make_star_demand(9, std::vector<double>(8, 1.0));
  CHECK(conditional_entropy(uniform) == doctest::Approx(3.0).epsilon(1e-12));

  // skewed hub distribution: 64,32,16,8,4,2,1,1 over 128 total; the dyadic
  // entropy is exactly 2 - 1/64 bits
  auto skewed = make_star_demand(9, {64, 32, 16, 8, 4, 2, 1, 1});
  double by_hand = oracle::entropy_bits({64, 32, 16, 8, 4, 2, 1, 1});
  CHECK(by_hand == doctest::Approx(1.984375).epsilon(1e-12));
  CHECK(conditional_entropy(skewed) == doctest::Approx(by_hand).epsilon(1e-12));
}

namespace {

DemandGraph random_graph(Rng& rng) {
  DemandGraph g;
  g.n = 3 + static_cast<int>(rng.bounded(12));
  int edges = 2 + static_cast<int>(rng.bounded(3 * g.n));
  for (int i = 0; i < edges; ++i) {
    int u = static_cast<int>(rng.bounded(g.n));
    int v = static_cast<int>(rng.bounded(g.n));
    if (u == v) v = (v + 1) % g.n;
    g.edges[{u, v}] += 1 + static_cast<double>(rng.bounded(9));
  }
  return g;
}

}  // namespace

TEST_CASE("chain rule, relabeling and scaling invariances") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    DemandGraph g = random_graph(rng);
    auto rep = graph_entropies(g);

    // chain rule: H(Y|X) <= H(Y) and H(Y|X) = H(X,Y) - H(X)
    CHECK(rep.conditional_yx_bits <= rep.dest_entropy_bits + 1e-9);
    CHECK(rep.conditional_xy_bits <= rep.source_entropy_bits + 1e-9);
    CHECK(rep.conditional_yx_bits ==
          doctest::Approx(rep.entropy_bits - rep.source_entropy_bits).epsilon(1e-9));
    CHECK(rep.conditional_xy_bits ==
          doctest::Approx(rep.entropy_bits - rep.dest_entropy_bits).epsilon(1e-9));

    // node relabeling leaves every value unchanged
    auto perm = random_permutation(g.n, rng);
    auto rep2 = graph_entropies(relabel(g, perm));
    CHECK(rep2.entropy_bits == doctest::Approx(rep.entropy_bits).epsilon(1e-9));
    CHECK(rep2.source_entropy_bits ==
          doctest::Approx(rep.source_entropy_bits).epsilon(1e-9));
    CHECK(rep2.dest_entropy_bits == doctest::Approx(rep.dest_entropy_bits).epsilon(1e-9));
    CHECK(rep2.conditional_yx_bits ==
          doctest::Approx(rep.conditional_yx_bits).epsilon(1e-9));

    // scaling all weights leaves every value unchanged
    DemandGraph scaled = g;
    for (auto& [e, w] : scaled.edges) w *= 37.5;
    auto rep3 = graph_entropies(scaled);
    CHECK(rep3.entropy_bits == doctest::Approx(rep.entropy_bits).epsilon(1e-9));
    CHECK(rep3.conditional_yx_bits ==
          doctest::Approx(rep.conditional_yx_bits).epsilon(1e-9));
  }
}

TEST_CASE("entropy values stay within log2(n)") {
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    DemandGraph g = random_graph(rng);
    auto rep = graph_entropies(g);
    double cap = std::log2(static_cast<double>(g.n));
    for (double v : {rep.source_entropy_bits, rep.dest_entropy_bits,
                     rep.conditional_yx_bits, rep.conditional_xy_bits}) {
      CHECK(v >= 0.0);
      CHECK(v <= cap + 1e-9);
    }
  }
}
