#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "core/eigh.hpp"
#include "core/graph.hpp"
#include "core/greens.hpp"
#include "core/resampling.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"
#include "helpers/test_oracles.hpp"

using namespace rrg;

TEST_SUITE_BEGIN("resampling");

TEST_CASE("boundary enumeration") {
  SUBCASE("tree neighborhoods give mu = d (d-1)^ell") {
    Rng rng(3);
    for (int ell : {1, 2, 3}) {
      int seen = 0;
      for (int trial = 0; trial < 20 && seen < 5; ++trial) {
        RegularGraph g = RegularGraph::sample_uniform(600, 3, rng);
        if (excess(ball(g, 0, ell + 1)) != 0) continue;  // want a tree ball
        ++seen;
        BoundaryData bd = boundary_data(g, 0, ell);
        // mu = d (d-1)^ell with d = 3
        CHECK(static_cast<int>(bd.boundary.size()) == 3 * (1 << ell));
      }
      CHECK(seen > 0);
    }
  }
  SUBCASE("K4 ball swallows the graph") {
    RegularGraph k4 = RegularGraph::complete(4);
    BoundaryData bd = boundary_data(k4, 0, 1);
    CHECK(bd.boundary.empty());
    CHECK(bd.ball_t.vertices.size() == 4);
  }
  SUBCASE("boundary vertices are oriented inside -> outside") {
    Rng rng(5);
    RegularGraph g = RegularGraph::sample_uniform(100, 3, rng);
    BoundaryData bd = boundary_data(g, 7, 2);
    for (const auto& oe : bd.boundary) {
      CHECK(bd.ball_t.contains_vertex(oe.from));
      CHECK_FALSE(bd.ball_t.contains_vertex(oe.to));
    }
  }
}

TEST_CASE("resampling data sampling") {
  SUBCASE("empty boundary means the identity switch") {
    RegularGraph k4 = RegularGraph::complete(4);
    Rng rng(1);
    ResamplingData rd = sample_resampling_data(k4, 0, 1, rng);
    CHECK(rd.mu() == 0);
    SwitchOutcome sw = apply_switch(k4, rd, 4);
    CHECK(sw.g_tilde == k4);
  }
  SUBCASE("partner marginal is uniform over oriented outside edges") {
    Rng rng(11);
    RegularGraph g = RegularGraph::sample_uniform(30, 3, rng);
    BoundaryData bd = boundary_data(g, 0, 1);
    Minor outside = remove_vertices(g, bd.ball_t.vertices);
    const int pool = 2 * static_cast<int>(outside.edges.size());
    REQUIRE(pool > 0);
    std::map<std::pair<int, int>, long> counts;
    const int draws_rounds = 100000 / std::max(1, bd.boundary.empty() ? 1 : (int)bd.boundary.size());
    long total = 0;
    for (int k = 0; k < draws_rounds; ++k) {
      ResamplingData rd = sample_resampling_data(g, 0, 1, rng);
      for (const auto& pe : rd.partners) {
        ++counts[{pe.from, pe.to}];
        ++total;
      }
    }
    std::vector<double> obs, expect;
    for (const auto& [u, v] : outside.edges) {
      obs.push_back(static_cast<double>(counts[{outside.orig_of[u], outside.orig_of[v]}]));
      obs.push_back(static_cast<double>(counts[{outside.orig_of[v], outside.orig_of[u]}]));
    }
    for (std::size_t i = 0; i < obs.size(); ++i)
      expect.push_back(static_cast<double>(total) / pool);
    double stat = chi_square_stat(obs, expect);
    CHECK(chi_square_sf(stat, static_cast<double>(pool - 1)) > 0.001);
  }
  SUBCASE("consecutive draws are uncorrelated (permutation-style z test)") {
    Rng rng(13);
    RegularGraph g = RegularGraph::sample_uniform(40, 3, rng);
    // Collect the flat sequence of partner indices across repeated draws.
    std::vector<double> sequence;
    for (int k = 0; k < 2000; ++k) {
      ResamplingData rd = sample_resampling_data(g, 0, 1, rng);
      for (const auto& pe : rd.partners)
        sequence.push_back(pe.from * 1000.0 + pe.to);
    }
    // Lag-1 sample autocorrelation; for iid draws it is N(0, 1/m).
    double mean = 0.0;
    for (double x : sequence) mean += x;
    mean /= static_cast<double>(sequence.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      den += (sequence[i] - mean) * (sequence[i] - mean);
      if (i + 1 < sequence.size())
        num += (sequence[i] - mean) * (sequence[i + 1] - mean);
    }
    double zstat = num / den * std::sqrt(static_cast<double>(sequence.size()));
    CHECK(std::abs(zstat) < 4.0);
  }
}

TEST_CASE("admissibility indicators") {
  SUBCASE("mostly admissible on large graphs") {
    Rng rng(17);
    int admissible = 0, total = 0;
    for (int trial = 0; trial < 30; ++trial) {
      RegularGraph g = RegularGraph::sample_uniform(500, 3, rng);
      ResamplingData rd = sample_resampling_data(g, 0, 1, rng);
      AdmissibleSet adm = admissible_set(g, rd, 4);
      admissible += static_cast<int>(adm.indices.size());
      total += rd.mu();
    }
    CHECK(static_cast<double>(admissible) / total > 0.6);
  }
  SUBCASE("shared partner vertices violate isolation") {
    Rng rng(19);
    RegularGraph g = RegularGraph::sample_uniform(200, 3, rng);
    ResamplingData rd = sample_resampling_data(g, 0, 1, rng);
    REQUIRE(rd.mu() >= 2);
    rd.partners[1] = rd.partners[0];  // identical triples: distance zero
    AdmissibleSet adm = admissible_set(g, rd, 8);
    CHECK_FALSE(adm.flags[0]);
    CHECK_FALSE(adm.flags[1]);
    CHECK(indicator_alpha(g, rd, 0, 8) == false);
  }
  SUBCASE("short cycle near the triple breaks the tree condition") {
    // Petersen-based construction: remove nothing, craft data by hand.
    // Build a graph with a 3-cycle among outside vertices: two K4 blocks
    // joined... use 2xK4: ball at 0 of radius 1 swallows block one, and any
    // partner edge in block two sits on triangles, so B_1 plus {a,b} has a
    // cycle. Here mu = 0 though, so instead craft on a random graph by
    // picking a partner edge inside a deliberately added triangle.
    std::vector<Edge> edges;
    // Vertices 0..3: K4 minus edge {2,3} (degrees 3,3,2,2).
    edges = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}};
    // Triangle 4,5,6 plus pendant structure to make everything 3-regular:
    edges.push_back({4, 5});
    edges.push_back({4, 6});
    edges.push_back({5, 6});
    edges.push_back({2, 4});
    edges.push_back({3, 5});
    edges.push_back({2, 7});
    edges.push_back({3, 7});
    edges.push_back({6, 7});
    RegularGraph g(8, 3, edges);
    ResamplingData rd;
    rd.center = 0;
    rd.ell = 1;
    rd.ball_t = ball(g, 0, 1);  // vertices {0,1,2,3}
    rd.boundary = {{2, 4}, {2, 7}, {3, 5}, {3, 7}};
    // Partner (5,6) lies on the triangle {4,5,6}; with a = 4 the set
    // B_1({4,5,6}) already contains that cycle.
    rd.partners = {{5, 6}, {6, 5}, {6, 4}, {4, 6}};
    AdmissibleSet adm = admissible_set(g, rd, 4);
    CHECK_FALSE(adm.flags[0]);
  }
}

TEST_CASE("switch application") {
  SUBCASE("degree preservation and simplicity, always") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
      RegularGraph g = RegularGraph::sample_uniform(100, 3, rng);
      ResamplingData rd = sample_resampling_data(g, 0, 1, rng);
      SwitchOutcome sw = apply_switch(g, rd, 4);
      CHECK(sw.g_tilde.vertex_count() == 100);
      CHECK(sw.g_tilde.degree() == 3);  // constructor re-validated everything
    }
  }
  SUBCASE("xi decomposition equals Htilde - H exactly") {
    Rng rng(29);
    for (int trial = 0; trial < 25; ++trial) {
      RegularGraph g = RegularGraph::sample_uniform(80, 3, rng);
      ResamplingData rd = sample_resampling_data(g, 0, 1, rng);
      SwitchOutcome sw = apply_switch(g, rd, 4);
      std::set<int> sv(rd.ball_t.vertices.begin(), rd.ball_t.vertices.end());
      for (int a = 0; a < rd.mu(); ++a) {
        sv.insert(rd.boundary[a].to);
        sv.insert(rd.partners[a].from);
        sv.insert(rd.partners[a].to);
      }
      std::vector<int> support(sv.begin(), sv.end());
      SwitchDelta sd = build_switch_delta(rd, sw.applied, 3, support);
      Eigen::MatrixXd h = normalized_adjacency(g);
      Eigen::MatrixXd ht = normalized_adjacency(sw.g_tilde);
      double inside = 0.0;
      for (std::size_t i = 0; i < support.size(); ++i)
        for (std::size_t j = 0; j < support.size(); ++j)
          inside = std::max(inside,
                            std::abs(sd.xi_sum(i, j) -
                                     (ht(support[i], support[j]) -
                                      h(support[i], support[j]))));
      CHECK(inside == 0.0);
      CHECK(sd.xi.size() == sw.applied.size());
      // And the difference is entirely supported there.
      CHECK(std::abs((ht - h).cwiseAbs().sum() - sd.xi_sum.cwiseAbs().sum()) <
            1e-14);
    }
  }
  SUBCASE("reversibility") {
    Rng rng(31);
    int recovered = 0;
    const int trials = 150;
    for (int trial = 0; trial < trials; ++trial) {
      RegularGraph g = RegularGraph::sample_uniform(200, 3, rng);
      ResamplingData rd = sample_resampling_data(g, 0, 1, rng);
      SwitchOutcome sw = apply_switch(g, rd, 4);
      SwitchOutcome back = apply_switch(sw.g_tilde, sw.t_of_s, 4);
      if (back.g_tilde == g) ++recovered;
    }
    CHECK(recovered >= trials * 90 / 100);
  }
}

TEST_CASE("direct delta and the resolvent identity") {
  Rng rng(37);
  SpectralPoint z(0.2, 0.6);
  RegularGraph g = RegularGraph::sample_uniform(90, 3, rng);

  SUBCASE("identity switch gives the zero matrix") {
    ResamplingData rd = sample_resampling_data(g, 0, 1, rng);
    rd.partners.assign(rd.partners.size(), rd.partners[0]);  // all clash
    SwitchOutcome sw = apply_switch(g, rd, 4);
    CHECK(sw.applied.empty());
    Eigen::MatrixXcd delta = direct_delta(g, sw.g_tilde, z);
    CHECK(delta.cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("symmetry and -Gt (Ht - H) G") {
    for (int trial = 0; trial < 5; ++trial) {
      ResamplingData rd = sample_resampling_data(g, 0, 1, rng);
      SwitchOutcome sw = apply_switch(g, rd, 4);
      Eigen::MatrixXcd delta = direct_delta(g, sw.g_tilde, z);
      CHECK((delta - delta.transpose()).cwiseAbs().maxCoeff() < 1e-11);
      GreensMatrix gm = greens(g, z);
      GreensMatrix gmt = greens(sw.g_tilde, z);
      Eigen::MatrixXcd xi = (normalized_adjacency(sw.g_tilde) -
                             normalized_adjacency(g))
                                .cast<Complex>();
      Eigen::MatrixXcd identity_rhs = -gmt.entries * xi * gm.entries;
      CHECK((identity_rhs - delta).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("woodbury expansion decays") {
  Rng rng(41);
  SpectralPoint z(0.2, 1.0);
  int monotone = 0, trials = 0;
  std::vector<double> rel0;
  for (int trial = 0; trial < 25; ++trial) {
    RegularGraph g = RegularGraph::sample_uniform(120, 3, rng);
    ResamplingData rd = sample_resampling_data(g, 0, 1, rng);
    SwitchOutcome sw = apply_switch(g, rd, 4);
    if (sw.applied.empty()) continue;
    GreensMatrix gm = greens(g, z);
    Eigen::MatrixXcd direct = direct_delta(g, sw.g_tilde, z);
    WoodburyResult wr =
        woodbury_delta(gm, g, sw.g_tilde, rd, sw.applied, z, 4, direct);
    REQUIRE(wr.p_ok);
    ++trials;
    bool strict = true;
    for (std::size_t k = 0; k + 1 < wr.truncation_err.size(); ++k)
      if (!(wr.truncation_err[k + 1] < wr.truncation_err[k])) strict = false;
    monotone += strict;
    double scale = direct.cwiseAbs().maxCoeff();
    if (scale > 0) rel0.push_back(wr.truncation_err[0] / scale);
  }
  REQUIRE(trials >= 15);
  CHECK(monotone == trials);
  // Leading term alone already lands within 30% at eta = 1.
  std::sort(rel0.begin(), rel0.end());
  CHECK(rel0[rel0.size() / 2] < 0.3);
}

TEST_CASE("exchangeability testing") {
  SUBCASE("constant statistic is trivially symmetric") {
    ExchangeabilityReport rep = exchangeability_test(
        Statistic::kConstant, 60, 3, 1, 50, 7, 4, PartnerSampling::kUniform, 2);
    CHECK(rep.nonzero_diffs == 0);
    CHECK(rep.sign_p == 1.0);
  }
  SUBCASE("uniform partners pass, spectral sub-list fails") {
    ExchangeabilityReport uniform = exchangeability_test(
        Statistic::kLambda2, 120, 3, 1, 500, 2025, 4,
        PartnerSampling::kUniform, 2);
    CHECK(uniform.sign_p > 0.01);
    ExchangeabilityReport biased = exchangeability_test(
        Statistic::kLambda2, 120, 3, 1, 500, 2025, 4,
        PartnerSampling::kBiasedSpectral, 2);
    CHECK(biased.sign_p < 0.001);
  }
}

TEST_CASE("triangle statistic") {
  CHECK(evaluate_statistic(Statistic::kTriangleCount,
                           RegularGraph::complete(4)) == 4.0);
  CHECK(evaluate_statistic(Statistic::kTriangleCount, rrg_test::petersen()) ==
        0.0);
  CHECK(evaluate_statistic(Statistic::kTriangleCount, rrg_test::two_k4()) ==
        8.0);
}

TEST_CASE("resample study bundles the rates") {
  ResampleStudyParams params;
  params.n = 150;
  params.d = 3;
  params.ell = 1;
  params.trials = 60;
  params.seed = 99;
  params.threads = 2;
  params.statistic = Statistic::kConstant;
  params.woodbury_trials = 8;
  params.woodbury_z = SpectralPoint(0.2, 0.8);
  ResampleStudy study = run_resample_study(params);
  CHECK(study.mean_mu > 4.0);
  CHECK(study.admissible_rate > 0.2);
  CHECK(study.reversibility_rate > 0.8);
  CHECK(study.woodbury.median_err.size() == 6);
  CHECK(study.woodbury.median_decay_ratio < 0.7);
}

TEST_SUITE_END();
