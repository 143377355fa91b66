#include "core/greens.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rrg {

GreensMatrix greens(const Eigensystem& es, SpectralPoint z) {
  const int n = static_cast<int>(es.values.size());
  if (es.vectors.size() == 0)
    throw std::invalid_argument("greens: eigensystem lacks vectors");
  Eigen::VectorXd wr(n), wi(n);
  Complex m(0.0, 0.0);
  for (int k = 0; k < n; ++k) {
    Complex w = 1.0 / (es.values[k] - z.z());
    wr[k] = w.real();
    wi[k] = w.imag();
    m += w;
  }
  m /= static_cast<double>(n);
  // G = V diag(w) V^T, assembled as two real GEMM pairs.
  Eigen::MatrixXd re = (es.vectors * wr.asDiagonal()) * es.vectors.transpose();
  Eigen::MatrixXd im = (es.vectors * wi.asDiagonal()) * es.vectors.transpose();
  GreensMatrix gm;
  gm.z = z;
  gm.m = m;
  gm.entries.resize(n, n);
  gm.entries.real() = re;
  gm.entries.imag() = im;
  return gm;
}

GreensMatrix greens(const RegularGraph& g, SpectralPoint z) {
  Eigensystem es = eigh(normalized_adjacency(g), true);
  return greens(es, z);
}

Complex stieltjes_from_eigenvalues(const std::vector<double>& lambda,
                                   SpectralPoint z) {
  Complex m(0.0, 0.0);
  for (double l : lambda) m += 1.0 / (l - z.z());
  return m / static_cast<double>(lambda.size());
}

WardCheck ward_check(const GreensMatrix& gm) {
  const int n = gm.size();
  const double n_eta = n * gm.z.eta;
  WardCheck out;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = gm.entries.row(i).squaredNorm();
    total += row;
    double dev = std::abs(row / n - gm.entries(i, i).imag() / n_eta);
    out.row_max = std::max(out.row_max, dev);
  }
  out.aggregate = std::abs(total / (static_cast<double>(n) * n) -
                           gm.m.imag() / n_eta);
  return out;
}

Eigen::MatrixXcd schur_minor(const GreensMatrix& gm, const std::vector<int>& s,
                             std::vector<int>* kept) {
  const int n = gm.size();
  std::vector<char> drop(n, 0);
  for (int v : s) {
    if (v < 0 || v >= n)
      throw std::invalid_argument("schur_minor: vertex out of range");
    drop[v] = 1;
  }
  std::vector<int> keep;
  keep.reserve(n);
  for (int v = 0; v < n; ++v)
    if (!drop[v]) keep.push_back(v);
  if (kept) *kept = keep;
  const int k = static_cast<int>(s.size());
  if (k == 0) return gm.entries;

  std::vector<int> block(s);
  std::sort(block.begin(), block.end());
  block.erase(std::unique(block.begin(), block.end()), block.end());
  const int b = static_cast<int>(block.size());

  Eigen::MatrixXcd gss(b, b);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) gss(i, j) = gm.entries(block[i], block[j]);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(gss);
  if (!std::isfinite(std::abs(lu.determinant())) ||
      std::abs(lu.determinant()) == 0.0)
    throw std::runtime_error("schur_minor: singular block G|_s");

  const int r = static_cast<int>(keep.size());
  Eigen::MatrixXcd gxs(r, b);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < b; ++j) gxs(i, j) = gm.entries(keep[i], block[j]);
  // G^{(s)} = G_keep - G_{keep,s} (G|_s)^{-1} G_{s,keep}; symmetry of G makes
  // the right factor the transpose of the left.
  Eigen::MatrixXcd out(r, r);
  Eigen::MatrixXcd solved = lu.solve(gxs.transpose());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out(i, j) = gm.entries(keep[i], keep[j]);
  out.noalias() -= gxs * solved;
  return out;
}

Complex q_of(const GreensMatrix& gm, const RegularGraph& g) {
  const int n = g.vertex_count();
  if (n != gm.size()) throw std::invalid_argument("q_of: size mismatch");
  Complex sum(0.0, 0.0);
  for (const auto& [u, v] : g.edges()) {
    const Complex guv = gm.entries(u, v);
    // Ordered pairs (u,v) and (v,u).
    sum += gm.entries(v, v) - guv * guv / gm.entries(u, u);
    sum += gm.entries(u, u) - guv * guv / gm.entries(v, v);
  }
  return sum / (static_cast<double>(n) * g.degree());
}

Complex q_of(const Eigensystem& es, const RegularGraph& g, SpectralPoint z,
             Complex* m_out) {
  const int n = g.vertex_count();
  if (es.vectors.size() == 0)
    throw std::invalid_argument("q_of: eigensystem lacks vectors");
  Eigen::VectorXcd w(n);
  Complex m(0.0, 0.0);
  for (int k = 0; k < n; ++k) {
    w[k] = 1.0 / (es.values[k] - z.z());
    m += w[k];
  }
  m /= static_cast<double>(n);
  if (m_out) *m_out = m;

  Eigen::VectorXcd diag(n);
  for (int i = 0; i < n; ++i) {
    Complex acc(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
      double vik = es.vectors(i, k);
      acc += vik * vik * w[k];
    }
    diag[i] = acc;
  }
  Complex sum(0.0, 0.0);
  for (const auto& [u, v] : g.edges()) {
    Complex guv(0.0, 0.0);
    for (int k = 0; k < n; ++k)
      guv += es.vectors(u, k) * es.vectors(v, k) * w[k];
    sum += diag[v] - guv * guv / diag[u];
    sum += diag[u] - guv * guv / diag[v];
  }
  return sum / (static_cast<double>(n) * g.degree());
}

Eigen::MatrixXcd tree_extension_P(const Subgraph& t, SpectralPoint z,
                                  Complex delta, int d, Compensation mode) {
  const int k = static_cast<int>(t.vertices.size());
  if (k == 0) throw std::invalid_argument("tree_extension_P: empty subgraph");
  auto local_index = [&](int v) {
    auto it = std::lower_bound(t.vertices.begin(), t.vertices.end(), v);
    if (it == t.vertices.end() || *it != v)
      throw std::invalid_argument("tree_extension_P: edge leaves vertex set");
    return static_cast<int>(it - t.vertices.begin());
  };
  const double scale = 1.0 / std::sqrt(static_cast<double>(d - 1));
  Eigen::MatrixXcd inv = Eigen::MatrixXcd::Zero(k, k);
  std::vector<int> degree(k, 0);
  for (const auto& [u, v] : t.edges) {
    int a = local_index(u), b = local_index(v);
    inv(a, b) += scale;
    inv(b, a) += scale;
    ++degree[a];
    ++degree[b];
  }
  for (int i = 0; i < k; ++i) {
    if (degree[i] > d)
      throw std::invalid_argument("tree_extension_P: vertex degree exceeds d");
    Complex comp = delta / static_cast<double>(d - 1) *
                   static_cast<double>(d - degree[i]);
    if (mode == Compensation::kBoundaryOnly && t.root &&
        t.vertices[i] == *t.root)
      comp = Complex(0.0, 0.0);
    inv(i, i) += -z.z() - comp;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(inv);
  Eigen::MatrixXcd p = lu.inverse();
  if (!p.allFinite())
    throw std::runtime_error("tree_extension_P: singular matrix");
  return p;
}

Complex phi_map(Complex w, SpectralPoint z) { return 1.0 / (-z.z() - w); }

Complex y_ell(Complex delta, SpectralPoint z, int ell) {
  if (ell < 0) throw std::invalid_argument("y_ell: negative depth");
  Complex w = delta;
  for (int k = 0; k <= ell; ++k) w = phi_map(w, z);
  return w;
}

Complex x_ell(Complex delta, SpectralPoint z, int ell, int d) {
  if (ell < 0) throw std::invalid_argument("x_ell: negative depth");
  Complex w = delta;
  for (int k = 0; k < ell; ++k) w = phi_map(w, z);
  return 1.0 / (-z.z() - static_cast<double>(d) / (d - 1.0) * w);
}

Complex y_ell_derivative(Complex delta, SpectralPoint z, int ell) {
  if (ell < 0) throw std::invalid_argument("y_ell_derivative: negative depth");
  Complex w = delta;
  Complex prod(1.0, 0.0);
  for (int k = 0; k <= ell; ++k) {
    w = phi_map(w, z);
    prod *= w * w;  // phi'(u) = phi(u)^2
  }
  return prod;
}

TaylorResiduals taylor_check_recurbound(Complex delta, SpectralPoint z,
                                        int ell, int d) {
  const Complex msc = m_sc(z);
  const Complex md = m_d(z, d);
  const Complex dev = delta - msc;
  const Complex msc2l = std::pow(msc, 2 * ell);
  TaylorResiduals out;
  const Complex x_expansion =
      md + static_cast<double>(d) / (d - 1.0) * md * md * msc2l * dev;
  out.x_residual = std::abs(x_ell(delta, z, ell, d) - x_expansion);
  const Complex msc2l2 = msc2l * msc * msc;
  const Complex y_expansion =
      msc + msc2l2 * dev +
      msc2l2 * msc * ((1.0 - msc2l2) / (1.0 - msc * msc)) * dev * dev;
  out.y_residual = std::abs(y_ell(delta, z, ell) - y_expansion);
  return out;
}

ScResiduals sc_residuals(const RegularGraph& g, const GreensMatrix& gm,
                         int ell, double c) {
  ScResiduals out;
  out.q = q_of(gm, g);
  out.y_of_q = y_ell(out.q, gm.z, ell);
  out.x_of_q = x_ell(out.q, gm.z, ell, g.degree());
  out.q_minus_y = out.q - out.y_of_q;
  out.m_minus_x = gm.m - out.x_of_q;
  const double n = static_cast<double>(g.vertex_count());
  out.phi = std::pow(n, c) * gm.m.imag() / (n * gm.z.eta);
  return out;
}

}  // namespace rrg
