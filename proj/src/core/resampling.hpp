#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "core/graph.hpp"
#include "core/greens.hpp"
#include "core/km.hpp"
#include "core/rng.hpp"

namespace rrg {

struct OrientedEdge {
  int from = -1;
  int to = -1;
  bool operator==(const OrientedEdge&) const = default;
};

// Resampling data around a center vertex: the oriented edge boundary
// (l_alpha, a_alpha) of T = B_ell(o) and the iid partner edges
// (b_alpha, c_alpha) drawn from the graph with T's vertex set removed.
// Repetitions among partners are allowed.
struct ResamplingData {
  int center = 0;
  int ell = 1;
  Subgraph ball_t;                      // T, rooted at center
  std::vector<OrientedEdge> boundary;   // deterministic sorted enumeration
  std::vector<OrientedEdge> partners;   // same length mu

  int mu() const { return static_cast<int>(boundary.size()); }
};

// Ball plus oriented boundary in sorted order.
struct BoundaryData {
  Subgraph ball_t;
  std::vector<OrientedEdge> boundary;
};

BoundaryData boundary_data(const RegularGraph& g, int o, int ell);

enum class PartnerSampling {
  kUniform,        // iid uniform oriented edges of G^(T)
  kBiasedSpectral  // fixed sub-list: the edges with the largest
                   // second-eigenvector correlation, a deliberately
                   // non-exchangeable sampler (negative control)
};

// Throws std::runtime_error when G^(T) has no edge (ball swallowed the graph)
// while mu > 0.
ResamplingData sample_resampling_data(const RegularGraph& g, int o, int ell,
                                      Rng& rng,
                                      PartnerSampling mode =
                                          PartnerSampling::kUniform);

struct AdmissibleSet {
  std::vector<char> flags;   // I_alpha
  std::vector<int> indices;  // W_S = { alpha : I_alpha }
};

// Definition-2.7 indicators with threshold r4 = max(1, floor(R/4)):
// (1) B_r4({a,b,c}, G^(T)) plus the edge {a,b} is a tree, and
// (2) the triple is at distance > r4 in G^(T) from every other triple.
AdmissibleSet admissible_set(const RegularGraph& g, const ResamplingData& rd,
                             int big_r);
bool indicator_alpha(const RegularGraph& g, const ResamplingData& rd,
                     int alpha, int big_r);

struct SwitchOutcome {
  RegularGraph g_tilde;
  ResamplingData t_of_s;     // transformed resampling data, valid on g_tilde
  AdmissibleSet admissible;
  std::vector<int> applied;  // alphas actually switched, ascending
  int collision_drops = 0;   // admissible alphas dropped by the legality check
};

// Applies the simple switchings T_{S_alpha} for admissible alpha in ascending
// order. Beyond the paper's indicator, each switch must have four distinct
// vertices and both created edges absent at application time; violators are
// dropped and counted, so the output is unconditionally simple d-regular.
SwitchOutcome apply_switch(const RegularGraph& g, const ResamplingData& rd,
                           int big_r);

// Rank decomposition of the switch: per applied alpha,
//   xi_alpha = (D_{l c} + D_{a b} - D_{l a} - D_{b c}) / sqrt(d-1)
// (D_{uv} the symmetric matrix unit), so that sum_alpha xi_alpha = Htilde - H
// exactly. Matrices are dense on the support vertex list.
struct SwitchDelta {
  std::vector<int> support;                 // sorted parent vertex ids
  std::vector<Eigen::MatrixXd> xi;          // per applied alpha, |F| x |F|
  Eigen::MatrixXd xi_sum;                   // sum of xi
};

SwitchDelta build_switch_delta(const ResamplingData& rd,
                               const std::vector<int>& applied, int d,
                               const std::vector<int>& support);

struct WoodburyResult {
  std::vector<int> support;            // the vertex set F
  Eigen::MatrixXcd delta;              // partial sum at k_max
  std::vector<double> truncation_err;  // max-entry error of partial sums, k=0..k_max
  bool p_ok = true;                    // tree extensions inverted cleanly
};

// Expansion G~ - G = sum_k G F ((G|_F - P) F)^k G with
// F = -sum xi + (sum xi) P~ (sum xi), P/P~ the tree extensions (Delta = m_sc)
// of the resampling support before/after the switch. `direct` is the
// independently computed difference used for the truncation-error report.
WoodburyResult woodbury_delta(const GreensMatrix& gm, const RegularGraph& g,
                              const RegularGraph& g_tilde,
                              const ResamplingData& rd,
                              const std::vector<int>& applied, SpectralPoint z,
                              int k_max, const Eigen::MatrixXcd& direct);

// G~ - G via two independent resolvent computations.
Eigen::MatrixXcd direct_delta(const RegularGraph& g,
                              const RegularGraph& g_tilde, SpectralPoint z);

enum class Statistic { kConstant, kLambda2, kTriangleCount, kImStieltjesAtI };

struct ExchangeabilityReport {
  int trials = 0;
  int nonzero_diffs = 0;
  int positives = 0;
  double sign_p = 1.0;
  double rank_p = 1.0;
  double mean_diff = 0.0;
  double mean_applied = 0.0;   // switches actually applied per trial
  std::int64_t collision_drops = 0;
};

double evaluate_statistic(Statistic stat, const RegularGraph& g);

// Draws (G, T_S(G)) pairs and tests the symmetry of the joint law: sign test
// on f(G) - f(T_S G) plus a two-sample rank test.
ExchangeabilityReport exchangeability_test(Statistic stat, int n, int d,
                                           int ell, int trials,
                                           std::uint64_t seed, int big_r,
                                           PartnerSampling mode, int threads);

// Default isolation radius when none is configured:
// R = max(1, floor((c/4) log_{d-1} n)).
int default_big_r(int n, int d, double c);

struct WoodburyStudyParams {
  int n = 500;
  int d = 3;
  int ell = 1;
  int trials = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  int big_r = 0;  // 0: default_big_r with c = 0.4
  SpectralPoint z{0.2, 0.6};
  int k_max = 5;
};

struct WoodburyStudy {
  std::vector<std::vector<double>> errors;  // per trial, k = 0..k_max
  std::vector<double> median_err;           // per k
  double monotone_fraction = 0.0;  // err strictly decreasing through k_max
  double median_decay_ratio = 1.0; // median of (err_kmax / err_0)^{1/k_max}
  int p_fallbacks = 0;             // singular tree extensions
};

WoodburyStudy run_woodbury_study(const WoodburyStudyParams& params);

struct ResampleStudyParams {
  int n = 500;
  int d = 3;
  int ell = 1;
  int trials = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  int big_r = 0;
  Statistic statistic = Statistic::kLambda2;
  PartnerSampling bias = PartnerSampling::kUniform;
  int woodbury_trials = 0;  // 0 disables the decay table
  int woodbury_k = 5;
  SpectralPoint woodbury_z{0.2, 0.6};
};

struct ResampleStudy {
  double mean_mu = 0.0;
  double admissible_rate = 0.0;    // mean |W_S| / mu
  double applied_rate = 0.0;       // after the legality check
  std::int64_t collision_total = 0;
  double reversibility_rate = 0.0; // double switch recovers the graph
  ExchangeabilityReport exchangeability;
  WoodburyStudy woodbury;          // empty when woodbury_trials == 0
};

ResampleStudy run_resample_study(const ResampleStudyParams& params);

}  // namespace rrg
