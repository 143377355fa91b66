#include "core/km.hpp"

#include <cmath>
#include <stdexcept>

#include "core/numerics.hpp"

namespace rrg {

SpectralPoint::SpectralPoint(double e_in, double eta_in) : e(e_in), eta(eta_in) {
  if (!(eta > 0.0))
    throw std::invalid_argument("SpectralPoint: need Im z > 0");
}

double SpectralPoint::kappa() const {
  return std::min(std::abs(e - 2.0), std::abs(e + 2.0));
}

void LawParams::validate() const {
  if (d < 3) throw std::invalid_argument("LawParams: d >= 3 required");
  if (!(0.0 < c && c < a && a < 1.0))
    throw std::invalid_argument("LawParams: need 0 < c < a < 1");
  if (ell < 1) throw std::invalid_argument("LawParams: ell >= 1 required");
}

double rho_d(int d, double x) {
  if (d < 3) throw std::invalid_argument("rho_d: d >= 3 required");
  if (x < -2.0 || x > 2.0) return 0.0;
  double shape = 1.0 + 1.0 / (d - 1.0) - x * x / d;
  return std::sqrt(4.0 - x * x) / (2.0 * M_PI * shape);
}

double km_cdf_from_right(int d, double x, double abs_tol) {
  if (d < 3) throw std::invalid_argument("km_cdf_from_right: d >= 3 required");
  if (x >= 2.0) return 0.0;
  if (x <= -2.0) x = -2.0;
  // x = 2 cos(theta) removes the square-root edge singularity:
  // rho_d(x) dx -> (2/pi) sin^2(theta) / (1 + 1/(d-1) - 4 cos^2(theta)/d).
  const double theta = std::acos(x / 2.0);
  auto integrand = [d](double t) {
    double ct = std::cos(t), st = std::sin(t);
    double shape = 1.0 + 1.0 / (d - 1.0) - 4.0 * ct * ct / d;
    return (2.0 / M_PI) * st * st / shape;
  };
  return integrate_gk15(integrand, 0.0, theta, abs_tol);
}

Complex m_sc(SpectralPoint zp) {
  const Complex z = zp.z();
  const Complex s = std::sqrt(z * z - 4.0);
  Complex m = 0.5 * (-z + s);
  // The two quadratic roots multiply to 1; exactly one is Herglotz.
  if (m.imag() <= 0.0) m = 0.5 * (-z - s);
  return m;
}

Complex m_d(SpectralPoint z, int d) {
  if (d < 3) throw std::invalid_argument("m_d: d >= 3 required");
  const double ratio = static_cast<double>(d) / (d - 1.0);
  return 1.0 / (-z.z() - ratio * m_sc(z));
}

std::vector<double> classical_locations(int n, int d, double x_tol) {
  if (n < 3) throw std::invalid_argument("classical_locations: n >= 3");
  if (d < 3) throw std::invalid_argument("classical_locations: d >= 3");
  std::vector<double> gamma(n - 1);
  double lo = -2.0;  // gamma_i decreases with i, so brackets can shrink
  for (int i = n; i >= 2; --i) {
    // Midpoint quantile levels of the N-1 bulk eigenvalues: gamma_i sits at
    // mass (i-3/2)/(N-1) below the upper edge, so levels span (0,1) for
    // i in [2,N] and gamma_i = -gamma_{N+2-i}.
    const double target = (i - 1.5) / (n - 1.0);
    auto f = [&](double x) { return km_cdf_from_right(d, x) - target; };
    double hi = 2.0;
    gamma[i - 2] = bisect(f, lo, hi, x_tol);
    lo = gamma[i - 2] - 2.0 * x_tol;
    lo = std::max(lo, -2.0);
  }
  return gamma;
}

bool in_spectral_domain(SpectralPoint z, int n, const LawParams& params) {
  params.validate();
  if (std::abs(z.e) > 2.0 + params.a) return false;
  if (!(z.eta > 0.0 && z.eta <= 1.0 / params.a)) return false;
  const double lhs = n * z.eta * std::sqrt(z.kappa() + z.eta);
  return lhs >= std::pow(static_cast<double>(n), params.a);
}

ErrorParams error_params(SpectralPoint z, int d, double r_frac, int n,
                         double log_power) {
  if (!(r_frac > 0.0 && r_frac < 1.0))
    throw std::invalid_argument("error_params: need 0 < r < 1");
  const double dn = static_cast<double>(n);
  const double n_eta = dn * z.eta;
  const double im_md = m_d(z, d).imag();
  const double log_factor = std::pow(std::log(dn), log_power);
  ErrorParams out;
  out.eps_prime = log_factor * (std::pow(dn, -r_frac) +
                                std::sqrt(im_md / n_eta) +
                                std::pow(n_eta, -2.0 / 3.0));
  out.eps = out.eps_prime / std::sqrt(z.kappa() + z.eta + out.eps_prime);
  return out;
}

}  // namespace rrg
