#pragma once

#include <functional>
#include <vector>

namespace rrg {

// Adaptive Gauss-Kronrod (G7,K15) quadrature on [a, b] to absolute
// tolerance `abs_tol`.
double integrate_gk15(const std::function<double(double)>& f, double a,
                      double b, double abs_tol = 1e-12);

// Bisection for monotone f on [lo, hi] with f(lo), f(hi) of opposite sign.
// Returns the midpoint once |hi - lo| <= x_tol.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_tol);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares y = slope * x + intercept. Needs >= 3 points for a
// finite slope standard error.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Linearly interpolated quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> data, double q);

double mean(const std::vector<double>& v);
// Sample standard deviation (ddof = 1).
double sample_stddev(const std::vector<double>& v);
double median(std::vector<double> v);

}  // namespace rrg
