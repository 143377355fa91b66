#include <doctest.h>

#include <cmath>

#include "core/eigh.hpp"
#include "core/experiments.hpp"
#include "core/graph.hpp"
#include "core/greens.hpp"
#include "core/km.hpp"
#include "core/rng.hpp"
#include "helpers/test_oracles.hpp"

using namespace rrg;
using rrg_test::direct_minor_greens;
using rrg_test::petersen;
using rrg_test::truncated_tree;

namespace {

// Closed-form K4 Green's entries from the spectral projection onto the
// all-ones vector: diagonal a(z), off-diagonal b(z).
Complex k4_diag(Complex z) {
  const double l1 = 3.0 / std::sqrt(2.0), l2 = -1.0 / std::sqrt(2.0);
  return 0.25 / (l1 - z) + 0.75 / (l2 - z);
}
Complex k4_off(Complex z) {
  const double l1 = 3.0 / std::sqrt(2.0), l2 = -1.0 / std::sqrt(2.0);
  return 0.25 / (l1 - z) - 0.25 / (l2 - z);
}

}  // namespace

TEST_SUITE_BEGIN("greens");

TEST_CASE("K4 Green's function against the closed form") {
  RegularGraph k4 = RegularGraph::complete(4);
  SpectralPoint z(0.0, 1.0);
  GreensMatrix gm = greens(k4, z);
  Complex m_expect =
      (1.0 / (3.0 / std::sqrt(2.0) - z.z()) + 3.0 / (-1.0 / std::sqrt(2.0) - z.z())) /
      4.0;
  CHECK(std::abs(gm.m - m_expect) < 1e-12);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(gm.entries(i, i) - k4_diag(z.z())) < 1e-12);
    for (int j = i + 1; j < 4; ++j)
      CHECK(std::abs(gm.entries(i, j) - k4_off(z.z())) < 1e-12);
  }
}

TEST_CASE("defining identity, symmetry and Herglotz diagonal") {
  Rng rng(17);
  RegularGraph g = RegularGraph::sample_uniform(100, 3, rng);
  SpectralPoint z(0.4, 0.3);
  GreensMatrix gm = greens(g, z);
  Eigen::MatrixXcd h = normalized_adjacency(g).cast<Complex>();
  Eigen::MatrixXcd residual =
      (h - z.z() * Eigen::MatrixXcd::Identity(100, 100)) * gm.entries -
      Eigen::MatrixXcd::Identity(100, 100);
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);
  CHECK((gm.entries - gm.entries.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < 100; ++i) CHECK(gm.entries(i, i).imag() > 0.0);
}

TEST_CASE("Ward identity") {
  RegularGraph k4 = RegularGraph::complete(4);
  WardCheck k4_ward = ward_check(greens(k4, SpectralPoint(0.0, 2.0)));
  CHECK(k4_ward.row_max < 1e-12);
  CHECK(k4_ward.aggregate < 1e-12);

  Rng rng(23);
  double prev = 0.0;
  for (int n : {200, 600, 1200}) {
    RegularGraph g = RegularGraph::sample_uniform(n, 3, rng);
    WardCheck w = ward_check(greens(g, SpectralPoint(0.7, 0.2)));
    CHECK(w.row_max < 1e-11);
    CHECK(w.aggregate < 1e-11);
    // No growth with n.
    if (prev > 0.0) CHECK(w.row_max < 50 * prev + 1e-13);
    prev = std::max(prev, w.row_max);
  }
}

TEST_CASE("schur_minor equals direct minor inversion") {
  Rng rng(29);
  SpectralPoint z(0.3, 0.5);

  SUBCASE("empty set is the identity") {
    RegularGraph g = RegularGraph::sample_uniform(30, 3, rng);
    GreensMatrix gm = greens(g, z);
    CHECK((schur_minor(gm, {}) - gm.entries).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("single vertex formula") {
    for (int trial = 0; trial < 10; ++trial) {
      RegularGraph g = RegularGraph::sample_uniform(60, 3, rng);
      GreensMatrix gm = greens(g, z);
      Minor minor;
      Eigen::MatrixXcd direct = direct_minor_greens(g, {7}, z.z(), &minor);
      std::vector<int> kept;
      Eigen::MatrixXcd via_schur = schur_minor(gm, {7}, &kept);
      for (int a = 0; a < minor.n; ++a)
        for (int b = 0; b < minor.n; ++b)
          CHECK(std::abs(via_schur(a, b) - direct(a, b)) < 1e-10);
      // Spot-check the scalar identity G^(u)_vv = G_vv - G_uv^2 / G_uu.
      int v_parent = minor.orig_of[0];
      Complex scalar = gm.entries(v_parent, v_parent) -
                       gm.entries(7, v_parent) * gm.entries(7, v_parent) /
                           gm.entries(7, 7);
      CHECK(std::abs(scalar - direct(0, 0)) < 1e-10);
    }
  }

  SUBCASE("blocks up to size 4") {
    for (int trial = 0; trial < 8; ++trial) {
      RegularGraph g = RegularGraph::sample_uniform(50, 3, rng);
      GreensMatrix gm = greens(g, z);
      std::vector<int> s{1, 5, 11, 23};
      Eigen::MatrixXcd direct = direct_minor_greens(g, s, z.z());
      Eigen::MatrixXcd via_schur = schur_minor(gm, s);
      CHECK((via_schur - direct).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("Q on vertex-transitive graphs collapses to one summand") {
  SpectralPoint z(0.0, 1.0);
  for (const RegularGraph& g :
       {RegularGraph::complete(4), petersen()}) {
    GreensMatrix gm = greens(g, z);
    Complex q = q_of(gm, g);
    int i = 0, j = g.neighbors(0)[0];
    Complex single = gm.entries(j, j) -
                     gm.entries(i, j) * gm.entries(i, j) / gm.entries(i, i);
    CHECK(std::abs(q - single) < 1e-12);
  }
}

TEST_CASE("Q on K4 against the closed-form Green's entries") {
  SpectralPoint z(0.0, 1.0);
  RegularGraph k4 = RegularGraph::complete(4);
  Complex a = k4_diag(z.z()), b = k4_off(z.z());
  Complex expect = a - b * b / a;
  CHECK(std::abs(q_of(greens(k4, z), k4) - expect) < 1e-12);
}

TEST_CASE("Q via Schur equals Q via direct per-edge minors") {
  Rng rng(31);
  SpectralPoint z(0.3, 0.4);
  RegularGraph g = RegularGraph::sample_uniform(40, 3, rng);
  GreensMatrix gm = greens(g, z);
  Complex direct_sum(0.0, 0.0);
  for (int i = 0; i < 40; ++i) {
    Minor m;
    Eigen::MatrixXcd gi = direct_minor_greens(g, {i}, z.z(), &m);
    for (int j : g.neighbors(i)) direct_sum += gi(m.new_of[j], m.new_of[j]);
  }
  Complex direct_q = direct_sum / (40.0 * 3.0);
  CHECK(std::abs(q_of(gm, g) - direct_q) < 1e-10);

  // The eigensystem route must agree with the dense route.
  Eigensystem es = eigh(normalized_adjacency(g), true);
  Complex m_fast;
  Complex q_fast = q_of(es, g, z, &m_fast);
  CHECK(std::abs(q_fast - direct_q) < 1e-10);
  CHECK(std::abs(m_fast - gm.m) < 1e-12);
}

TEST_CASE("tree extension resolvent") {
  SUBCASE("single vertex, full compensation") {
    Subgraph t;
    t.vertices = {0};
    t.root = 0;
    SpectralPoint z(0.2, 0.9);
    Complex delta(0.1, 0.3);
    Eigen::MatrixXcd p = tree_extension_P(t, z, delta, 3, Compensation::kFull);
    Complex expect = 1.0 / (-z.z() - 3.0 * delta / 2.0);
    CHECK(std::abs(p(0, 0) - expect) < 1e-14);
  }
  SUBCASE("depth-1 binary tree, boundary-only, delta = 0") {
    Subgraph t = truncated_tree(2, 3, 1);
    Eigen::MatrixXcd p = tree_extension_P(t, SpectralPoint(0.0, 1.0),
                                          Complex(0, 0), 3,
                                          Compensation::kBoundaryOnly);
    CHECK(std::abs(p(0, 0) - Complex(0.0, 0.5)) < 1e-14);
  }
  SUBCASE("entry decay |P_ij| <= C (|m_sc|/sqrt(d-1))^dist") {
    for (int d : {3, 4}) {
      SpectralPoint z(0.6, 0.15);
      Complex msc = m_sc(z);
      Subgraph t = truncated_tree(d, d, 5);
      Eigen::MatrixXcd p =
          tree_extension_P(t, z, msc, d, Compensation::kFull);
      std::vector<std::vector<int>> adj(t.vertices.size());
      for (auto& [u, v] : t.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
      }
      std::vector<int> dist = bfs_distances(adj, {0});
      double base = std::abs(msc) / std::sqrt(static_cast<double>(d - 1));
      for (std::size_t j = 0; j < t.vertices.size(); ++j) {
        double bound = 4.0 * std::pow(base, dist[j]);
        CHECK(std::abs(p(0, static_cast<int>(j))) <= bound);
      }
      CHECK(std::abs(p(0, 0)) > 0.2);  // |P_ii| of order one
      CHECK(std::abs(p(0, 0)) < 5.0);
    }
  }
  SUBCASE("degree above d is rejected") {
    Subgraph t = truncated_tree(4, 3, 1);  // root degree 4 > d = 3
    CHECK_THROWS_AS(tree_extension_P(t, SpectralPoint(0, 1), Complex(0, 0), 3),
                    std::invalid_argument);
  }
}

TEST_CASE("scalar recursions match the explicit-tree matrices") {
  for (int d : {3, 4}) {
    for (int ell = 0; ell <= 6; ++ell) {
      SpectralPoint z(0.45, 0.35);
      Complex delta(0.05, 0.4);
      Subgraph y_tree = truncated_tree(d - 1, d, ell);
      Eigen::MatrixXcd py = tree_extension_P(y_tree, z, delta, d,
                                             Compensation::kBoundaryOnly);
      CHECK(std::abs(py(0, 0) - y_ell(delta, z, ell)) < 1e-10);
      Subgraph x_tree = truncated_tree(d, d, ell);
      Eigen::MatrixXcd px = tree_extension_P(x_tree, z, delta, d,
                                             Compensation::kBoundaryOnly);
      CHECK(std::abs(px(0, 0) - x_ell(delta, z, ell, d)) < 1e-10);
    }
  }
}

TEST_CASE("fixed points of the tree recursions") {
  double worst_y = 0.0, worst_x = 0.0;
  for (int k = 0; k < 50; ++k) {
    SpectralPoint z(-2.2 + 4.4 * k / 49.0, 0.05 + 10.0 * k / 49.0);
    Complex msc = m_sc(z);
    Complex md = m_d(z, 3);
    for (int ell = 1; ell <= 40; ++ell) {
      worst_y = std::max(worst_y, std::abs(y_ell(msc, z, ell) - msc));
      worst_x = std::max(worst_x, std::abs(x_ell(msc, z, ell, 3) - md));
    }
  }
  CHECK(worst_y < 1e-12);
  CHECK(worst_x < 1e-12);

  // Elementary values.
  CHECK(std::abs(y_ell(Complex(0, 0), SpectralPoint(0, 1), 1) -
                 Complex(0, 0.5)) < 1e-15);
  SpectralPoint z(0.3, 0.8);
  Complex delta(0.2, 0.1);
  CHECK(std::abs(x_ell(delta, z, 0, 3) - 1.0 / (-z.z() - 1.5 * delta)) <
        1e-15);
}

TEST_CASE("derivative of the Y recursion") {
  SpectralPoint z(0.7, 0.4);
  Complex msc = m_sc(z);
  for (int ell : {0, 1, 5, 13}) {
    CHECK(std::abs(y_ell_derivative(msc, z, ell) -
                   std::pow(msc, 2 * ell + 2)) < 1e-12);
  }
  // Central finite differences (step 1e-6) as the independent oracle.
  Complex delta(0.15, 0.35);
  for (int ell : {0, 2, 6}) {
    Complex fd_re = (y_ell(delta + 1e-6, z, ell) - y_ell(delta - 1e-6, z, ell)) /
                    2e-6;
    CHECK(std::abs(y_ell_derivative(delta, z, ell) - fd_re) < 1e-7);
  }
  // ell = 0: the derivative is phi(Delta)^2 = Y_0(Delta)^2.
  Complex y0 = y_ell(delta, z, 0);
  CHECK(std::abs(y_ell_derivative(delta, z, 0) - y0 * y0) < 1e-14);
}

TEST_CASE("Taylor residual orders around m_sc") {
  SpectralPoint z(0.4, 0.5);
  Complex msc = m_sc(z);
  TaylorResiduals center = taylor_check_recurbound(msc, z, 4, 3);
  CHECK(center.x_residual < 1e-12);
  CHECK(center.y_residual < 1e-12);

  Complex dir = std::polar(1.0, 0.3);
  TaylorResiduals big = taylor_check_recurbound(msc + 1e-2 * dir, z, 3, 3);
  TaylorResiduals small = taylor_check_recurbound(msc + 5e-3 * dir, z, 3, 3);
  CHECK(big.y_residual / small.y_residual > 6.0);
  CHECK(big.y_residual / small.y_residual < 10.0);
  CHECK(big.x_residual / small.x_residual > 3.5);
  CHECK(big.x_residual / small.x_residual < 4.5);
}

TEST_CASE("self-consistent residual bundle") {
  Rng rng(37);
  RegularGraph g = RegularGraph::sample_uniform(80, 3, rng);
  SpectralPoint z(0.25, 1.0);
  GreensMatrix gm = greens(g, z);
  ScResiduals res = sc_residuals(g, gm, 3, 0.1);
  CHECK(res.q_minus_y == res.q - res.y_of_q);  // exact bookkeeping
  CHECK(res.m_minus_x == gm.m - res.x_of_q);
  // Phi = N^c Im m / (N eta): order N^{c-1} at eta = 1.
  double scaled = res.phi * std::pow(80.0, 1.0 - 0.1);
  CHECK(scaled > 0.05);
  CHECK(scaled < 2.0);
}

TEST_CASE("m from the Green's matrix equals m from the spectrum") {
  Rng rng(41);
  RegularGraph g = RegularGraph::sample_uniform(120, 4, rng);
  SpectralPoint z(-0.7, 0.6);
  GreensMatrix gm = greens(g, z);
  SpectrumRecord rec = spectrum(g);
  Complex m_spec = stieltjes_from_eigenvalues(rec.eigenvalues, z);
  CHECK(std::abs(gm.m - m_spec) < 1e-10);
}

TEST_SUITE_END();
