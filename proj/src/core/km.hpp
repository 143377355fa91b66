#pragma once

#include <complex>
#include <vector>

namespace rrg {

using Complex = std::complex<double>;

// A point z = E + i*eta in the upper half-plane with the edge distance
// kappa = min(|E-2|, |E+2|).
struct SpectralPoint {
  double e = 0.0;
  double eta = 0.0;

  SpectralPoint() = default;
  SpectralPoint(double e_in, double eta_in);
  explicit SpectralPoint(Complex z) : SpectralPoint(z.real(), z.imag()) {}

  Complex z() const { return {e, eta}; }
  double kappa() const;
};

struct LawParams {
  int d = 3;
  double a = 0.3;   // spectral-domain constant
  double c = 0.1;   // census / control-parameter constant, 0 < c < a
  int ell = 3;      // tree-approximation depth

  void validate() const;  // throws on violated constraints
};

// Kesten-McKay density on [-2, 2] for the normalized adjacency matrix.
double rho_d(int d, double x);

// Integral of rho_d over [x, 2] (CDF measured from the right edge),
// computed by adaptive quadrature after the substitution x = 2 cos(theta).
double km_cdf_from_right(int d, double x, double abs_tol = 1e-12);

// Stieltjes transform of the semicircle law, branch with Im > 0;
// satisfies m^2 + z m + 1 = 0.
Complex m_sc(SpectralPoint z);

// Stieltjes transform of the Kesten-McKay law:
// m_d(z) = 1 / (-z - d/(d-1) * m_sc(z)).
Complex m_d(SpectralPoint z, int d);

// Classical locations gamma_2 >= ... >= gamma_N: the i-th solves
// km_cdf_from_right(gamma_i) = (i - 1/2)/(n - 1). Returned vector holds
// gamma_i at index i-2.
std::vector<double> classical_locations(int n, int d, double x_tol = 1e-10);

// |E| <= 2 + a, 0 < eta <= 1/a, and N eta sqrt(kappa + eta) >= N^a.
bool in_spectral_domain(SpectralPoint z, int n, const LawParams& params);

struct ErrorParams {
  double eps_prime = 0.0;
  double eps = 0.0;
};

// eps' = (log N)^log_power * (N^-r + sqrt(Im m_d / (N eta)) + (N eta)^-2/3),
// eps = eps' / sqrt(kappa + eta + eps'). The asymptotic bookkeeping power 100
// swamps everything at accessible N, hence the configurable exponent.
ErrorParams error_params(SpectralPoint z, int d, double r_frac, int n,
                         double log_power = 1.0);

}  // namespace rrg
