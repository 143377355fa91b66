#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace rrg {

// Two-sided exact sign test: `positives` successes out of `trials` fair coin
// flips (ties must already be dropped by the caller).
double sign_test_pvalue(std::int64_t positives, std::int64_t trials);

// Two-sided Mann-Whitney U test with tie-corrected normal approximation.
double mann_whitney_pvalue(const std::vector<double>& xs,
                           const std::vector<double>& ys);

// Survival function of the chi-square distribution, P(X > x) with `dof`
// degrees of freedom.
double chi_square_sf(double x, double dof);

// Pearson chi-square statistic against expected counts (> 0 each).
double chi_square_stat(const std::vector<double>& observed,
                       const std::vector<double>& expected);

// Kolmogorov-Smirnov distance between the empirical CDF of `data` and the
// CDF `cdf` (sup over the data points of both one-sided gaps).
double ks_distance(std::vector<double> data,
                   const std::function<double(double)>& cdf);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

}  // namespace rrg
