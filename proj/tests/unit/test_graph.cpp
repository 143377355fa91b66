#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "core/graph.hpp"
#include "core/graph_io.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"
#include "helpers/test_oracles.hpp"

using namespace rrg;
using rrg_test::petersen;
using rrg_test::two_k4;

TEST_SUITE_BEGIN("graph");

TEST_CASE("K4 is the unique simple 3-regular graph on 4 vertices") {
  RegularGraph k4 = RegularGraph::complete(4);
  for (std::uint64_t seed : {1ULL, 2ULL, 77ULL, 123456ULL}) {
    Rng rng(seed);
    RegularGraph g = RegularGraph::sample_uniform(4, 3, rng);
    CHECK(g == k4);
  }
}

TEST_CASE("sampler rejects bad parameters") {
  Rng rng(1);
  CHECK_THROWS_WITH_AS(RegularGraph::sample_uniform(5, 3, rng),
                       doctest::Contains("parity"), std::invalid_argument);
  CHECK_THROWS_AS(RegularGraph::sample_uniform(4, 4, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(RegularGraph::sample_uniform(10, 2, rng),
                  std::invalid_argument);
}

TEST_CASE("rejection budget can be exhausted") {
  int budget_errors = 0, successes = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    try {
      RegularGraph::sample_uniform(20, 3, rng, 1);
      ++successes;
    } catch (const std::runtime_error&) {
      ++budget_errors;
    }
  }
  CHECK(budget_errors > 0);
  CHECK(successes > 0);
}

TEST_CASE("configuration-model acceptance rate near exp(-2) for d=3") {
  // Sanity statistic, not a hard assert: asymptotic rate is e^{-2} = 0.1353.
  Rng rng(2024);
  std::int64_t total_attempts = 0;
  const int samples = 200;
  for (int k = 0; k < samples; ++k) {
    std::int64_t used = 0;
    RegularGraph::sample_uniform(1000, 3, rng, 5000000, &used);
    total_attempts += used;
  }
  double rate = static_cast<double>(samples) / total_attempts;
  CHECK(rate > 0.10);
  CHECK(rate < 0.17);
}

TEST_CASE("sampled graphs satisfy the regularity invariants") {
  // The constructor enforces simplicity/degree; spot-check symmetry too.
  for (auto [n, d] : {std::pair{8, 3}, {20, 3}, {50, 4}}) {
    Rng rng(static_cast<std::uint64_t>(n * 100 + d));
    for (int k = 0; k < 10000; ++k) {
      RegularGraph g = RegularGraph::sample_uniform(n, d, rng);
      if (k % 2500 == 0) {
        for (int v = 0; v < n; ++v)
          for (int w : g.neighbors(v)) CHECK(g.has_edge(w, v));
      }
    }
  }
}

TEST_CASE("balls") {
  RegularGraph k4 = RegularGraph::complete(4);
  Subgraph b = ball(k4, 0, 1);
  CHECK(b.vertices.size() == 4);
  CHECK(b.edges.size() == 6);  // K4 itself

  RegularGraph p = petersen();
  Subgraph star = ball(p, 0, 1);
  CHECK(star.vertices.size() == 4);
  CHECK(star.edges.size() == 3);  // girth 5 forbids closing edges
  CHECK(excess(star) == 0);

  Subgraph point = ball(p, 3, 0);
  CHECK(point.vertices == std::vector<int>{3});
  CHECK(point.edges.empty());
}

TEST_CASE("excess counts independent cycles") {
  RegularGraph p = petersen();
  CHECK(excess(ball(p, 0, 1)) == 0);  // tree
  Subgraph cycle;
  cycle.vertices = {0, 1, 2, 3, 4};
  cycle.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}};
  CHECK(excess(cycle) == 1);
  RegularGraph k4 = RegularGraph::complete(4);
  CHECK(excess(ball(k4, 0, 1)) == 3);  // 6 - 4 + 1
}

TEST_CASE("excess of growing balls is nondecreasing") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    RegularGraph g = RegularGraph::sample_uniform(60, 3, rng);
    for (int v = 0; v < 10; ++v) {
      int prev = 0;
      for (int r = 0; r <= 6; ++r) {
        int e = excess(ball(g, v, r));
        CHECK(e >= prev);
        prev = e;
      }
    }
  }
}

TEST_CASE("omega bar census") {
  RegularGraph k4 = RegularGraph::complete(4);
  OmegaBarReport rep = omega_bar_census(k4, 0.4, 1, 1);
  CHECK(rep.radius == 1);
  CHECK(rep.max_excess == 3);
  CHECK_FALSE(rep.holds);

  // A cap as large as |E| dominates any excess.
  OmegaBarReport capped = omega_bar_census(k4, 0.4, 6, 1);
  CHECK(capped.max_excess <= capped.excess_cap);

  // Large sparse samples are tree-like with high frequency.
  Rng rng(9);
  int holds = 0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    RegularGraph g = RegularGraph::sample_uniform(300, 3, rng);
    if (omega_bar_census(g, 0.4).holds) ++holds;
  }
  CHECK(holds >= trials * 7 / 10);
}

TEST_CASE("remove_vertices") {
  RegularGraph k4 = RegularGraph::complete(4);
  Minor identity = remove_vertices(k4, {});
  CHECK(identity.n == 4);
  CHECK(identity.edges.size() == 6);

  Minor tri = remove_vertices(k4, {2});
  CHECK(tri.n == 3);
  CHECK(tri.edges.size() == 3);

  Minor p9 = remove_vertices(petersen(), {0});
  CHECK(p9.n == 9);
  int deg2 = 0;
  for (const auto& nb : p9.adj) deg2 += nb.size() == 2;
  CHECK(deg2 == 3);

  // Minor edges plus edges incident to the removed set recover the graph.
  RegularGraph p = petersen();
  Minor m = remove_vertices(p, {0, 5});
  std::set<Edge> rebuilt;
  for (const auto& [u, v] : m.edges)
    rebuilt.insert({std::min(m.orig_of[u], m.orig_of[v]),
                    std::max(m.orig_of[u], m.orig_of[v])});
  for (const auto& [u, v] : p.edges())
    if (u == 0 || v == 0 || u == 5 || v == 5) rebuilt.insert({u, v});
  CHECK(rebuilt == std::set<Edge>(p.edges().begin(), p.edges().end()));
}

TEST_CASE("distance") {
  RegularGraph k4 = RegularGraph::complete(4);
  CHECK(distance(k4, 0, 3) == 1);
  CHECK(distance(k4, 2, 2) == 0);
  RegularGraph split = two_k4();
  CHECK(distance(split, 1, 6) == -1);  // components never meet
  RegularGraph p = petersen();
  CHECK(distance(p, 0, 7) == 2);
}

TEST_CASE("regraph v1 round trip and strict rejection") {
  Rng rng(3);
  RegularGraph g = RegularGraph::sample_uniform(20, 3, rng);
  std::string text = graph_to_regraph_v1(g);
  CHECK(graph_from_regraph_v1(text) == g);

  CHECK_THROWS_AS(graph_from_regraph_v1("4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3"),
                  std::invalid_argument);  // missing final newline
  CHECK_THROWS_AS(graph_from_regraph_v1("4 3\n1 0\n0 2\n0 3\n1 2\n1 3\n2 3\n"),
                  std::invalid_argument);  // u >= v
  CHECK_THROWS_AS(graph_from_regraph_v1("4 3\n0 2\n0 1\n0 3\n1 2\n1 3\n2 3\n"),
                  std::invalid_argument);  // unsorted
  CHECK_THROWS_AS(graph_from_regraph_v1("4 3\n0 1\n0 1\n0 3\n1 2\n1 3\n2 3\n"),
                  std::invalid_argument);  // duplicate edge
  CHECK_THROWS_AS(graph_from_regraph_v1("4  3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"),
                  std::invalid_argument);  // double space
  CHECK_THROWS_AS(graph_from_regraph_v1("4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 4\n"),
                  std::invalid_argument);  // vertex out of range
  CHECK_THROWS_AS(graph_from_regraph_v1("4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n"),
                  std::invalid_argument);  // degree violated
  CHECK_THROWS_AS(graph_from_regraph_v1("04 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"),
                  std::invalid_argument);  // leading zero
}

TEST_CASE("uniformity over isomorphism classes at n=8, d=3") {
  auto all = rrg_test::enumerate_cubic_graphs(8);
  REQUIRE(all.size() == 19355);
  std::map<std::pair<int, int>, long> class_size;
  for (const auto& edges : all) ++class_size[rrg_test::cycle_signature(8, edges)];
  REQUIRE(class_size.size() == 6);  // five connected classes plus 2xK4

  Rng rng(31337);
  const int samples = 20000;
  std::map<std::pair<int, int>, long> observed;
  for (int k = 0; k < samples; ++k) {
    RegularGraph g = RegularGraph::sample_uniform(8, 3, rng);
    std::vector<Edge> edges(g.edges());
    ++observed[rrg_test::cycle_signature(8, edges)];
  }
  std::vector<double> obs, expect;
  for (const auto& [sig, count] : class_size) {
    expect.push_back(static_cast<double>(samples) * count / 19355.0);
    obs.push_back(static_cast<double>(observed[sig]));
  }
  double stat = chi_square_stat(obs, expect);
  double p = chi_square_sf(stat, static_cast<double>(obs.size() - 1));
  CHECK(p > 0.0027);  // three-sigma band
}

TEST_SUITE_END();
