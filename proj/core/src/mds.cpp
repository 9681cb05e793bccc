#include <Eigen/Dense>
#include <cmath>

#include "t4d/errors.hpp"
#include "t4d/sequence_tools.hpp"

namespace t4d {

Eigen::MatrixXd mds_project(const Eigen::MatrixXd& distances, int dims) {
  const Eigen::Index n = distances.rows();
  if (n == 0 || distances.cols() != n) {
    throw ValidationError("mds_project: square matrix required");
  }
  if (dims < 1 || dims >= n) {
    throw ValidationError("mds_project: dims must be in [1, n)");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (distances(i, i) != 0.0) {
      throw ValidationError("mds_project: diagonal must be zero");
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double scale = std::max({std::abs(distances(i, j)),
                                     std::abs(distances(j, i)), 1.0});
      if (std::abs(distances(i, j) - distances(j, i)) > 1e-9 * scale) {
        throw ValidationError("mds_project: matrix is not symmetric");
      }
      if (distances(i, j) < 0.0) {
        throw ValidationError("mds_project: negative distance");
      }
    }
  }

  // double-centered Gram matrix B = -1/2 J D^2 J
  const Eigen::MatrixXd d2 = distances.array().square().matrix();
  const Eigen::VectorXd row_mean = d2.rowwise().mean();
  const double grand_mean = row_mean.mean();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gram(i, j) = -0.5 * (d2(i, j) - row_mean[i] - row_mean[j] + grand_mean);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("mds_project: eigensolver failed");
  }
  // eigenvalues ascending; the top `dims` carry the embedding
  if (solver.eigenvalues()[n - 1] <= 0.0) {
    const bool all_zero = distances.cwiseAbs().maxCoeff() == 0.0;
    if (!all_zero) {
      throw NumericalError("mds_project: no positive eigenvalue, not embeddable");
    }
  }

  Eigen::MatrixXd coords(n, dims);
  for (int k = 0; k < dims; ++k) {
    const Eigen::Index col = n - 1 - k;
    const double lambda = std::max(solver.eigenvalues()[col], 0.0);
    coords.col(k) = solver.eigenvectors().col(col) * std::sqrt(lambda);
  }
  return coords;
}

}  // namespace t4d
