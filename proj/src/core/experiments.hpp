#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/graph.hpp"
#include "core/greens.hpp"
#include "core/km.hpp"

namespace rrg {

// Index-parallel loop with deterministic work assignment; used for
// sample-parallel Monte Carlo (each body derives its own RNG stream).
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

struct SpectrumRecord {
  int n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  std::vector<double> eigenvalues;  // descending
};

// Full dense symmetric eigensolve of H. Throws if lambda_1 deviates from
// d/sqrt(d-1) by more than 1e-9.
SpectrumRecord spectrum(const RegularGraph& g, std::uint64_t seed = 0);

struct RigidityProfile {
  std::vector<double> r;  // r_i at index i-2, for 2 <= i <= N
  double max_r = 0.0;
  int argmax_i = 2;
};

// r_i = |lambda_i - gamma_i| N^{2/3} min(i, N-i+1)^{1/3}; i = 1 is excluded
// since lambda_1 is the deterministic Perron value.
RigidityProfile rigidity_profile(const SpectrumRecord& rec,
                                 const std::vector<double>& gamma);

struct ScalingFit {
  std::vector<int> sizes;
  std::vector<double> means;
  std::vector<double> stds;
  double loglog_slope = 0.0;
  double slope_stderr = 0.0;
};

struct EdgeScanRow {
  int n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  double lambda2 = 0.0;
  double lambda_n = 0.0;
};

struct EdgeScanResult {
  std::vector<EdgeScanRow> rows;
  ScalingFit fit_lambda2;   // std(lambda2 - 2) vs N
  ScalingFit fit_lambda_n;  // std(|lambda_N| - 2) vs N
};

// Requires >= 3 ascending sizes (a slope standard error needs a residual
// degree of freedom).
EdgeScanResult edge_fluctuation_scan(const std::vector<int>& sizes,
                                     int samples_per_size, int d,
                                     std::uint64_t seed, int threads);

struct StieltjesPoint {
  SpectralPoint z;
  double quantile90 = 0.0;       // empirical 0.9-quantile of |m - m_d|
  double envelope = 0.0;         // theorem envelope at this z (constant-free)
  double ratio = 0.0;            // quantile90 / envelope
  std::vector<double> abs_dev;   // per-sample |m - m_d|
};

// Bulk envelope 1/(N eta); edge envelope (kappa+eta)^{-1/2}
// (N^{-1} eta^{-1/2} + (N eta)^{-2}).
double stieltjes_envelope(int n, SpectralPoint z);

std::vector<StieltjesPoint> stieltjes_concentration_scan(
    int n, int d, const std::vector<SpectralPoint>& z_grid, int samples,
    std::uint64_t seed, int threads);

struct EdgeWindowResult {
  int n = 0;
  int samples = 0;
  double kappa = 0.0;
  double eta = 0.0;
  int hits = 0;  // samples with an eigenvalue inside [2+kappa-eta, 2+kappa+eta]
};

// The no-eigenvalue window just outside the bulk edge: kappa = N^{-2/3+0.2},
// eta = N^{0.15} / (N sqrt(kappa)).
EdgeWindowResult edge_window_exclusion(int n, int d, int samples,
                                       std::uint64_t seed, int threads);

struct MomentReport {
  int n = 0;
  int samples = 0;
  int p = 1;
  double moment_qy = 0.0;     // E |Q - Y_ell(Q)|^{2p}
  double comparator = 0.0;    // E ((Im m + sqrt(|1-Y'| Im m))/(N eta) + |Q-m_sc|^2)^{2p}
  double ratio = 0.0;
};

// `fixed_graph` replaces the per-sample draw with one fixed graph (degenerate
// zero-variance input; the sample moment then equals the single-sample value).
MomentReport sc_moment_estimate(int n, int d, int ell, SpectralPoint z, int p,
                                int samples, std::uint64_t seed, int threads,
                                const RegularGraph* fixed_graph = nullptr);

// Kolmogorov-Smirnov distance between the empirical CDF of lambda_2..lambda_N
// and the Kesten-McKay CDF.
double esd_vs_km(const SpectrumRecord& rec);

}  // namespace rrg
