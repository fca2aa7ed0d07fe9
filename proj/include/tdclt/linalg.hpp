#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdclt {

//! Raised when a covariance matrix is not positive semidefinite within the
//! clipping tolerance. Carries the spectrum extremes for diagnostics.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(const std::string& what, double min_eigenvalue,
                     double max_eigenvalue, double tolerance)
      : std::runtime_error(what),
        min_eigenvalue(min_eigenvalue),
        max_eigenvalue(max_eigenvalue),
        tolerance(tolerance) {}

  double min_eigenvalue;
  double max_eigenvalue;
  double tolerance;
};

//! Row-major dim x dim matrix A with A A^T equal to the (clipped) input.
struct CovarianceFactor {
  std::size_t dim = 0;
  std::vector<double> matrix;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  //! Number of negative eigenvalues set to zero.
  std::size_t clipped = 0;
};

/*!
 * Symmetric factorization V diag(sqrt(max(lambda, 0))) of a row-major
 * covariance. Eigenvalues down to -1e-10 * trace / dim are clipped to 0;
 * anything more negative throws FactorizationError.
 */
CovarianceFactor factor_covariance(const std::vector<double>& cov,
                                   std::size_t dim);

}  // namespace tdclt
