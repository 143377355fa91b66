#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "core/eigh.hpp"
#include "core/graph.hpp"
#include "core/km.hpp"

namespace rrg {

// Dense Green's function G(z) = (H - z)^{-1} of a d-regular graph, complex
// symmetric (not Hermitian), with the normalized trace cached.
struct GreensMatrix {
  SpectralPoint z;
  Eigen::MatrixXcd entries;
  Complex m;

  int size() const { return static_cast<int>(entries.rows()); }
};

// One real-symmetric eigendecomposition serves every z.
GreensMatrix greens(const Eigensystem& es, SpectralPoint z);
GreensMatrix greens(const RegularGraph& g, SpectralPoint z);

Complex stieltjes_from_eigenvalues(const std::vector<double>& lambda,
                                   SpectralPoint z);

struct WardCheck {
  double row_max = 0.0;    // max_i |1/N sum_j |G_ij|^2 - Im G_ii / (N eta)|
  double aggregate = 0.0;  // |1/N^2 sum_ij |G_ij|^2 - Im m / (N eta)|
};

WardCheck ward_check(const GreensMatrix& gm);

// Schur complement minor: G^{(s)}_{xy} = G_xy - G_{x,s} (G|_s)^{-1} G_{s,y}
// on the kept vertices (returned in `kept`, ascending).
Eigen::MatrixXcd schur_minor(const GreensMatrix& gm, const std::vector<int>& s,
                             std::vector<int>* kept = nullptr);

// Q(z; G) = (1/(Nd)) sum over ordered adjacent pairs (i,j) of G^{(i)}_{jj},
// via the rank-one Schur formula G^{(i)}_{jj} = G_jj - G_ij^2 / G_ii.
Complex q_of(const GreensMatrix& gm, const RegularGraph& g);

// Same Q without materializing G: only the diagonal and the adjacent entries
// are assembled from the eigensystem. Also returns m(z).
Complex q_of(const Eigensystem& es, const RegularGraph& g, SpectralPoint z,
             Complex* m_out = nullptr);

enum class Compensation {
  kFull,          // literal deficiency weight at every vertex
  kBoundaryOnly,  // root exempt: its deficiency is intrinsic, not truncation
};

// Tree-extension resolvent P(T, z, Delta) =
//   (-z + H(T) - Delta/(d-1) (d I - D(T)))^{-1},
// indexed by T.vertices order.
Eigen::MatrixXcd tree_extension_P(const Subgraph& t, SpectralPoint z,
                                  Complex delta, int d,
                                  Compensation mode = Compensation::kFull);

// phi(w) = 1/(-z - w); m_sc is its fixed point.
Complex phi_map(Complex w, SpectralPoint z);

// Root Green's value of the depth-ell truncated (d-1)-ary tree with boundary
// weight delta: the scalar iteration phi^{ell+1}(delta).
Complex y_ell(Complex delta, SpectralPoint z, int ell);

// Root Green's value of the depth-ell truncated d-regular tree:
// 1/(-z - d/(d-1) phi^{ell}(delta)).
Complex x_ell(Complex delta, SpectralPoint z, int ell, int d);

// d/dDelta of y_ell: exact chain-rule product of phi(w_k)^2 along the orbit.
Complex y_ell_derivative(Complex delta, SpectralPoint z, int ell);

struct TaylorResiduals {
  double x_residual = 0.0;  // |X_ell(Delta) - quadratic-order expansion|
  double y_residual = 0.0;  // |Y_ell(Delta) - cubic-order expansion|
};

// Residuals of the X/Y expansions around m_sc; they must scale like
// ell |Delta-m_sc|^2 resp. ell^2 |Delta-m_sc|^3.
TaylorResiduals taylor_check_recurbound(Complex delta, SpectralPoint z,
                                        int ell, int d);

struct ScResiduals {
  Complex q;
  Complex y_of_q;
  Complex x_of_q;
  Complex q_minus_y;
  Complex m_minus_x;
  double phi = 0.0;  // N^c Im m / (N eta)
};

ScResiduals sc_residuals(const RegularGraph& g, const GreensMatrix& gm,
                         int ell, double c);

}  // namespace rrg
