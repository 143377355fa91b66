#include "core/eigh.hpp"

#include <lapacke.h>

#include <mutex>
#include <stdexcept>

extern "C" void openblas_set_num_threads(int);

namespace rrg {

namespace {

void pin_blas_threads() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

}  // namespace

Eigen::MatrixXd normalized_adjacency(const RegularGraph& g) {
  const int n = g.vertex_count();
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.degree() - 1));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    h(u, v) = scale;
    h(v, u) = scale;
  }
  return h;
}

Eigensystem eigh(const Eigen::MatrixXd& sym, bool with_vectors) {
  pin_blas_threads();
  if (sym.rows() != sym.cols())
    throw std::invalid_argument("eigh: matrix not square");
  const lapack_int n = static_cast<lapack_int>(sym.rows());
  Eigensystem out;
  out.values.resize(n);
  Eigen::MatrixXd work = sym;  // dsyevd overwrites with eigenvectors
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N',
                                   'L', n, work.data(), n, out.values.data());
  if (info != 0)
    throw std::runtime_error("eigh: LAPACK dsyevd failed, info=" +
                             std::to_string(info));
  if (with_vectors) out.vectors = std::move(work);
  return out;
}

std::vector<double> spectrum_descending(const RegularGraph& g) {
  Eigensystem es = eigh(normalized_adjacency(g), false);
  std::vector<double> vals(es.values.data(), es.values.data() + es.values.size());
  std::reverse(vals.begin(), vals.end());
  return vals;
}

}  // namespace rrg
