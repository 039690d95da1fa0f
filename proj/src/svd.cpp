#include "subpop/svd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subpop/error.hpp"
#include "subpop/rng.hpp"

namespace subpop {

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

double max_relative_change(const Eigen::VectorXd& now, const Eigen::VectorXd& before,
                           int rank) {
  const double floor = std::max(now(0), 0.0) * 1e-6;
  double worst = 0.0;
  for (int j = 0; j < rank; ++j) {
    const double scale = std::max(now(j), floor);
    if (scale <= 0.0) continue;
    worst = std::max(worst, std::abs(now(j) - before(j)) / scale);
  }
  return worst;
}

}  // namespace

TruncatedSvd truncated_svd(const SparseMatrix& matrix, const SvdOptions& options) {
  const Eigen::Index rows = matrix.rows();
  const Eigen::Index cols = matrix.cols();
  const Eigen::Index smaller = std::min(rows, cols);
  if (options.rank < 1 || options.rank > smaller) {
    throw RankTooLarge("rank " + std::to_string(options.rank) +
                       " outside [1, " + std::to_string(smaller) + "]");
  }
  if (!(options.tol > 0.0)) throw ConfigError("SVD tolerance must be positive");
  if (options.max_iter < 1) throw ConfigError("SVD max_iter must be positive");
  const int rank = options.rank;
  const Eigen::Index width =
      std::min<Eigen::Index>(rank + std::max(options.oversample, 0), smaller);

  SplitMix64 rng(options.seed);
  Eigen::MatrixXd sketch(cols, width);
  for (Eigen::Index c = 0; c < width; ++c) {
    for (Eigen::Index r = 0; r < cols; ++r) sketch(r, c) = rng.normal();
  }

  const SparseMatrix transposed = matrix.transpose();
  Eigen::MatrixXd right = sketch;  // cols x width
  Eigen::VectorXd previous;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd right_vectors;
  int iteration = 0;
  for (;;) {
    ++iteration;
    const Eigen::MatrixXd left = orthonormal_basis(matrix * right);
    const Eigen::MatrixXd projected = transposed * left;  // = (Q^T A)^T
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(projected);
    right = qr.householderQ() * Eigen::MatrixXd::Identity(cols, width);
    const Eigen::MatrixXd upper =
        qr.matrixQR().topRows(width).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Eigen::MatrixXd> small(upper, Eigen::ComputeFullU);
    sigma = small.singularValues();
    if (sigma(0) <= 0.0) {
      right_vectors = right * small.matrixU();
      break;
    }
    if (iteration > options.min_power_iter &&
        max_relative_change(sigma, previous, rank) < options.tol) {
      right_vectors = right * small.matrixU();
      break;
    }
    if (iteration >= options.max_iter) throw ConvergenceFailure(options.max_iter);
    previous = sigma;
  }

  TruncatedSvd result;
  result.iterations = iteration;
  result.singular_values = sigma.head(rank);
  result.item_factors.resize(cols, rank);
  for (int j = 0; j < rank; ++j) {
    Eigen::VectorXd v = right_vectors.col(j);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v(pivot) < 0.0) v = -v;
    result.item_factors.col(j) = v * sigma(j);
  }
  return result;
}

}  // namespace subpop
