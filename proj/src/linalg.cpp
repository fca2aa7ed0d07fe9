#include "tdclt/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace tdclt {

CovarianceFactor factor_covariance(const std::vector<double>& cov,
                                   std::size_t dim) {
  if (cov.size() != dim * dim) {
    throw std::invalid_argument("covariance size does not match dimension");
  }
  CovarianceFactor out;
  out.dim = dim;
  out.matrix.assign(dim * dim, 0.0);
  if (dim == 0) return out;

  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const Mat> a(cov.data(), dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double d = a(i, j) - a(j, i);
      if (!(std::abs(d) <= 1e-12 * (1 + std::abs(a(i, j))))) {
        throw std::invalid_argument("covariance is not symmetric");
      }
    }
  }
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const auto& lambda = solver.eigenvalues();
  out.min_eigenvalue = lambda.minCoeff();
  out.max_eigenvalue = lambda.maxCoeff();
  const double tol = -1e-10 * std::max(sym.trace(), 0.0) / static_cast<double>(dim);
  if (out.min_eigenvalue < tol) {
    std::ostringstream os;
    os.precision(17);
    os << "covariance not positive semidefinite: min eigenvalue "
       << out.min_eigenvalue << " below tolerance " << tol;
    throw FactorizationError(os.str(), out.min_eigenvalue, out.max_eigenvalue, tol);
  }
  Eigen::VectorXd root(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    if (lambda(k) < 0) ++out.clipped;
    root(k) = std::sqrt(std::max(lambda(k), 0.0));
  }
  Mat f = solver.eigenvectors() * root.asDiagonal();
  Eigen::Map<Mat>(out.matrix.data(), dim, dim) = f;
  return out;
}

}  // namespace tdclt
