#include "tdclt/metric_table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tdclt {

PseudoMetricTable::PseudoMetricTable(std::size_t n, bool exact)
    : n_(n), exact_(exact), d_(n * n, 0.0) {
  if (!exact_) se_.assign(n * n, 0.0);
}

void PseudoMetricTable::set(std::size_t i, std::size_t j, double v, double se) {
  if (i >= n_ || j >= n_) throw std::out_of_range("metric index");
  if (!(v >= 0) || !std::isfinite(v)) {
    throw std::invalid_argument("distance must be finite and >= 0");
  }
  if (i == j && v != 0) throw std::invalid_argument("d(i,i) must be 0");
  d_[i * n_ + j] = d_[j * n_ + i] = v;
  if (!se_.empty()) se_[i * n_ + j] = se_[j * n_ + i] = se;
}

double PseudoMetricTable::diameter(std::span<const std::size_t> members) const {
  double best = 0;
  for (std::size_t a = 0; a < members.size(); ++a) {
    const double* row = d_.data() + members[a] * n_;
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      best = std::max(best, row[members[b]]);
    }
  }
  return best;
}

double PseudoMetricTable::diameter() const {
  double best = 0;
  for (double v : d_) best = std::max(best, v);
  return best;
}

double PseudoMetricTable::worst_triangle_excess(double tol, double se_mult) const {
  double worst = -std::numeric_limits<double>::infinity();
  if (n_ < 3) return 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t k = 0; k < n_; ++k) {
        double slack = tol;
        if (!exact_) {
          const double a = stderr_at(i, k), b = stderr_at(i, j), c = stderr_at(j, k);
          slack = se_mult * std::sqrt(a * a + b * b + c * c);
        }
        worst = std::max(worst, (*this)(i, k) - (*this)(i, j) - (*this)(j, k) - slack);
      }
    }
  }
  return worst;
}

}  // namespace tdclt
