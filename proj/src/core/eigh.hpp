#pragma once

#include <Eigen/Dense>

#include "core/graph.hpp"

namespace rrg {

// Normalized adjacency matrix H = A / sqrt(d-1) as a dense symmetric matrix.
Eigen::MatrixXd normalized_adjacency(const RegularGraph& g);

struct Eigensystem {
  Eigen::VectorXd values;   // ascending (LAPACK order)
  Eigen::MatrixXd vectors;  // columns, empty when values-only
};

// Full symmetric eigendecomposition via LAPACK dsyevd. `with_vectors=false`
// skips the back-transformation (tridiagonal + dsterf path), which is what
// the large Monte-Carlo scans want. BLAS is pinned to one thread; parallelism
// lives at the sample level.
Eigensystem eigh(const Eigen::MatrixXd& sym, bool with_vectors);

// Eigenvalues of H in descending order.
std::vector<double> spectrum_descending(const RegularGraph& g);

}  // namespace rrg
