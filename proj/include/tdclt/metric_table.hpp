#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tdclt {

//! Symmetric nonnegative distance matrix on points 0..size-1. `stderr_`
//! is empty for exact tables and holds per-entry MC errors otherwise.
class PseudoMetricTable {
 public:
  PseudoMetricTable() = default;
  explicit PseudoMetricTable(std::size_t n, bool exact = true);

  std::size_t size() const { return n_; }
  bool exact() const { return exact_; }

  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  double stderr_at(std::size_t i, std::size_t j) const {
    return se_.empty() ? 0.0 : se_[i * n_ + j];
  }
  //! Sets d(i,j) = d(j,i) = v (and the MC error when given).
  void set(std::size_t i, std::size_t j, double v, double se = 0.0);

  //! max d over pairs of `members`; 0 for fewer than two members.
  double diameter(std::span<const std::size_t> members) const;
  double diameter() const;

  //! Largest excess d(i,k) - d(i,j) - d(j,k) - slack(i,j,k) over all
  //! triples, where slack is `tol` for exact tables and `se_mult` times the
  //! combined entry errors otherwise. <= 0 means the triangle law holds.
  double worst_triangle_excess(double tol = 1e-9, double se_mult = 3.0) const;

 private:
  std::size_t n_ = 0;
  bool exact_ = true;
  std::vector<double> d_;
  std::vector<double> se_;
};

}  // namespace tdclt
