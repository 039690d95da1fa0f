#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace subpop {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SvdOptions {
  int rank = 32;
  std::uint64_t seed = 0;
  // Stop once every tracked singular value moves by less than this, relative
  // to its own magnitude, between consecutive iterations.
  double tol = 1e-7;
  int max_iter = 300;
  int oversample = 8;
  int min_power_iter = 2;
};

struct TruncatedSvd {
  // cols x rank; column j is sigma_j * v_j, sign fixed so the entry of
  // largest magnitude is positive.
  Eigen::MatrixXd item_factors;
  // rank values, non-increasing.
  Eigen::VectorXd singular_values;
  int iterations = 0;
};

// Randomized subspace iteration (Gaussian sketch of rank + oversample
// columns, re-orthonormalised after every product with A or A^T) followed by
// Rayleigh-Ritz on the projected matrix. Deterministic for a fixed seed.
TruncatedSvd truncated_svd(const SparseMatrix& matrix, const SvdOptions& options);

}  // namespace subpop
