#include "core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace rrg {

namespace {

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n + 1)) -
         std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad args");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double sign_test_pvalue(std::int64_t positives, std::int64_t trials) {
  if (trials <= 0) return 1.0;
  if (positives < 0 || positives > trials)
    throw std::invalid_argument("sign_test_pvalue: bad counts");
  std::int64_t k = std::min(positives, trials - positives);
  const double log_half_n = static_cast<double>(trials) * std::log(0.5);
  double tail = 0.0;
  for (std::int64_t j = 0; j <= k; ++j)
    tail += std::exp(log_choose(trials, j) + log_half_n);
  double p = 2.0 * tail;
  // The two tails overlap when positives == trials/2 exactly.
  if (2 * k == trials) p -= std::exp(log_choose(trials, k) + log_half_n);
  return std::min(1.0, p);
}

double mann_whitney_pvalue(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const std::size_t n1 = xs.size(), n2 = ys.size();
  if (n1 == 0 || n2 == 0) return 1.0;
  struct Tagged {
    double v;
    int group;
  };
  std::vector<Tagged> all;
  all.reserve(n1 + n2);
  for (double v : xs) all.push_back({v, 0});
  for (double v : ys) all.push_back({v, 1});
  std::sort(all.begin(), all.end(),
            [](const Tagged& a, const Tagged& b) { return a.v < b.v; });
  // Midranks plus the tie-correction term sum(t^3 - t).
  std::vector<double> rank(all.size());
  double tie_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1].v == all[i].v) ++j;
    double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[k] = r;
    double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    i = j + 1;
  }
  double r1 = 0.0;
  for (std::size_t k = 0; k < all.size(); ++k)
    if (all[k].group == 0) r1 += rank[k];
  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);
  const double u1 = r1 - dn1 * (dn1 + 1.0) / 2.0;
  const double mu = dn1 * dn2 / 2.0;
  const double n = dn1 + dn2;
  double var = dn1 * dn2 / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;  // all values tied
  double zstat = (std::abs(u1 - mu) - 0.5) / std::sqrt(var);
  if (zstat < 0.0) zstat = 0.0;
  return std::erfc(zstat / std::sqrt(2.0));
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return 1.0 - gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_stat(const std::vector<double>& observed,
                       const std::vector<double>& expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("chi_square_stat: size mismatch");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0)
      throw std::invalid_argument("chi_square_stat: nonpositive expectation");
    double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  return stat;
}

double ks_distance(std::vector<double> data,
                   const std::function<double(double)>& cdf) {
  if (data.empty()) throw std::invalid_argument("ks_distance: empty data");
  std::sort(data.begin(), data.end());
  const double m = static_cast<double>(data.size());
  double dist = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    double f = cdf(data[k]);
    double lo = static_cast<double>(k) / m;
    double hi = static_cast<double>(k + 1) / m;
    dist = std::max(dist, std::max(std::abs(f - lo), std::abs(f - hi)));
  }
  return dist;
}

}  // namespace rrg
