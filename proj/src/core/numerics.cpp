#include "core/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rrg {

namespace {

// Kronrod-15 nodes on [0, 1] side (symmetric) with K15 weights; odd-index
// nodes are the embedded Gauss-7 points.
constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWeightsG[4] = {0.129484966168870, 0.279705391489277,
                                 0.381830050505119, 0.417959183673469};

struct PanelResult {
  double integral;
  double error;
};

PanelResult gk15_panel(const std::function<double(double)>& f, double a,
                       double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kNodes[i]);
    fv[14 - i] = f(c + h * kNodes[i]);
  }
  fv[7] = f(c);
  double resk = 0.0;
  for (int i = 0; i < 7; ++i) resk += kWeightsK[i] * (fv[i] + fv[14 - i]);
  resk += kWeightsK[7] * fv[7];
  double resg = 0.0;
  for (int i = 0; i < 3; ++i)
    resg += kWeightsG[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  resg += kWeightsG[3] * fv[7];
  return {resk * h, std::abs((resk - resg) * h)};
}

void gk15_adapt(const std::function<double(double)>& f, double a, double b,
                double tol, int depth, double& acc) {
  PanelResult r = gk15_panel(f, a, b);
  if (r.error <= tol || depth >= 48) {
    acc += r.integral;
    return;
  }
  const double c = 0.5 * (a + b);
  gk15_adapt(f, a, c, 0.5 * tol, depth + 1, acc);
  gk15_adapt(f, c, b, 0.5 * tol, depth + 1, acc);
}

}  // namespace

double integrate_gk15(const std::function<double(double)>& f, double a,
                      double b, double abs_tol) {
  if (a == b) return 0.0;
  double acc = 0.0;
  gk15_adapt(f, a, b, abs_tol, 0, acc);
  return acc;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::invalid_argument("bisect: no sign change on bracket");
  while (hi - lo > x_tol) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matching points");
  const std::size_t m = x.size();
  double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  fit.slope_stderr =
      m > 2 ? std::sqrt(rss / static_cast<double>(m - 2) / sxx) : 0.0;
  return fit;
}

double quantile(std::vector<double> data, double q) {
  if (data.empty()) throw std::invalid_argument("quantile: empty data");
  std::sort(data.begin(), data.end());
  q = std::clamp(q, 0.0, 1.0);
  double pos = q * static_cast<double>(data.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= data.size()) return data.back();
  double frac = pos - static_cast<double>(lo);
  return data[lo] * (1.0 - frac) + data[lo + 1] * frac;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace rrg
