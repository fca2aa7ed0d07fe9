#include "tdclt/cdf.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tdclt {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::pair<double, double> CdfImpl::bracket(double) const { return support(); }

double CdfImpl::quantile(double c) const {
  auto [lo, hi] = bracket(c);
  if (!(std::isfinite(lo) && std::isfinite(hi))) {
    throw std::logic_error("quantile bracket must be finite");
  }
  if (eval(lo) >= c) return lo;
  // Invariant: F(lo) < c <= F(hi). Stops when lo and hi are adjacent doubles.
  while (true) {
    const double mid = std::midpoint(lo, hi);
    if (mid <= lo || mid >= hi) break;
    if (eval(mid) >= c) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

CdfModel::CdfModel(std::shared_ptr<const CdfImpl> impl)
    : impl_(std::move(impl)) {
  if (!impl_) throw std::invalid_argument("null cdf");
}

double CdfModel::quantile(double c) const {
  if (std::isnan(c)) throw std::invalid_argument("quantile of NaN");
  if (c <= 0) return -inf;
  if (c > 1) return inf;
  // F(x) >= 1 may first hold at the right end of the support.
  if (c == 1) {
    const double hi = support().second;
    if (!std::isfinite(hi)) return inf;
    return impl_->quantile(c);
  }
  return impl_->quantile(c);
}

namespace cdf {

double std_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
}

double std_normal_quantile(double c) {
  if (c <= 0) return -inf;
  if (c >= 1) return inf;
  return boost::math::quantile(boost::math::normal_distribution<double>(), c);
}

namespace {

class PointMassImpl final : public CdfImpl {
 public:
  explicit PointMassImpl(double at) : at_(at) {}
  double eval(double x) const override { return x >= at_ ? 1.0 : 0.0; }
  double left_limit(double x) const override { return x > at_ ? 1.0 : 0.0; }
  double quantile(double) const override { return at_; }
  std::vector<double> atoms() const override { return {at_}; }
  std::pair<double, double> support() const override { return {at_, at_}; }
  std::string describe() const override { return "point-mass(" + fmt(at_) + ")"; }

 private:
  double at_;
};

class NormalImpl final : public CdfImpl {
 public:
  explicit NormalImpl(double sigma) : sigma_(sigma) {}
  double eval(double x) const override { return std_normal_cdf(x / sigma_); }
  double left_limit(double x) const override { return eval(x); }
  double quantile(double c) const override {
    return sigma_ * std_normal_quantile(c);
  }
  std::pair<double, double> support() const override { return {-inf, inf}; }
  std::string describe() const override { return "normal(0," + fmt(sigma_) + ")"; }

 private:
  double sigma_;
};

// P(sigma*G + U <= y) = sigma * [g(y/sigma) - g((y-1)/sigma)],
// g(z) = z*Phi(z) + phi(z).
class NormalPlusUniformImpl final : public CdfImpl {
 public:
  explicit NormalPlusUniformImpl(double sigma) : sigma_(sigma) {}
  double eval(double y) const override {
    const double v =
        sigma_ * (g(y / sigma_) - g((y - 1) / sigma_));
    return std::clamp(v, 0.0, 1.0);
  }
  double left_limit(double x) const override { return eval(x); }
  std::pair<double, double> support() const override { return {-inf, inf}; }
  std::string describe() const override {
    return "normal(0," + fmt(sigma_) + ")+uniform(0,1)";
  }

 protected:
  std::pair<double, double> bracket(double c) const override {
    const double z = sigma_ * std_normal_quantile(c);
    return {z, z + 1};
  }

 private:
  static double g(double z) { return z * std_normal_cdf(z) + std_normal_pdf(z); }
  double sigma_;
};

class UniformImpl final : public CdfImpl {
 public:
  UniformImpl(double lo, double hi) : lo_(lo), hi_(hi) {}
  double eval(double x) const override {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    return (x - lo_) / (hi_ - lo_);
  }
  double left_limit(double x) const override { return eval(x); }
  double quantile(double c) const override {
    return std::min(hi_, lo_ + c * (hi_ - lo_));
  }
  std::pair<double, double> support() const override { return {lo_, hi_}; }
  std::string describe() const override {
    return "uniform(" + fmt(lo_) + "," + fmt(hi_) + ")";
  }

 private:
  double lo_, hi_;
};

class MixtureImpl final : public CdfImpl {
 public:
  MixtureImpl(std::vector<CdfModel> parts, std::vector<double> weights)
      : parts_(std::move(parts)), weights_(std::move(weights)) {
    for (const auto& p : parts_) {
      for (double a : p.atoms()) atoms_.push_back(a);
    }
    std::sort(atoms_.begin(), atoms_.end());
    atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
  }
  double eval(double x) const override {
    double s = 0;
    for (std::size_t i = 0; i < parts_.size(); ++i) s += weights_[i] * parts_[i](x);
    return std::min(s, 1.0);
  }
  double left_limit(double x) const override {
    double s = 0;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      s += weights_[i] * parts_[i].left_limit(x);
    }
    return std::min(s, 1.0);
  }
  double quantile(double c) const override {
    // An atom a is the answer when it carries the level c.
    for (double a : atoms_) {
      if (left_limit(a) < c && c <= eval(a)) return a;
    }
    return CdfImpl::quantile(c);
  }
  std::vector<double> atoms() const override { return atoms_; }
  std::pair<double, double> support() const override {
    double lo = inf, hi = -inf;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (weights_[i] == 0) continue;
      const auto [l, h] = parts_[i].support();
      lo = std::min(lo, l);
      hi = std::max(hi, h);
    }
    return {lo, hi};
  }
  std::string describe() const override {
    std::string s = "mixture(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ";";
      s += fmt(weights_[i]) + "*" + parts_[i].describe();
    }
    return s + ")";
  }

 protected:
  // Q lies between the smallest and largest component quantile at c.
  std::pair<double, double> bracket(double c) const override {
    double lo = inf, hi = -inf;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (weights_[i] == 0) continue;
      const double q = parts_[i].quantile(c);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    return {lo, hi};
  }

 private:
  std::vector<CdfModel> parts_;
  std::vector<double> weights_;
  std::vector<double> atoms_;
};

class EmpiricalImpl final : public CdfImpl {
 public:
  explicit EmpiricalImpl(std::vector<double> sorted)
      : sorted_(std::move(sorted)), n_(static_cast<double>(sorted_.size())) {}
  double eval(double x) const override {
    const auto k = std::upper_bound(sorted_.begin(), sorted_.end(), x) -
                   sorted_.begin();
    return static_cast<double>(k) / n_;
  }
  double left_limit(double x) const override {
    const auto k = std::lower_bound(sorted_.begin(), sorted_.end(), x) -
                   sorted_.begin();
    return static_cast<double>(k) / n_;
  }
  // Smallest order statistic x_(k) with k/n >= c.
  double quantile(double c) const override {
    const std::size_t n = sorted_.size();
    auto k = static_cast<std::size_t>(std::ceil(c * n_));
    k = std::clamp<std::size_t>(k, 1, n);
    while (k > 1 && static_cast<double>(k - 1) / n_ >= c) --k;
    while (k < n && static_cast<double>(k) / n_ < c) ++k;
    return sorted_[k - 1];
  }
  std::vector<double> atoms() const override {
    std::vector<double> a = sorted_;
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
  }
  std::pair<double, double> support() const override {
    return {sorted_.front(), sorted_.back()};
  }
  CdfKind kind() const override { return CdfKind::empirical; }
  std::string describe() const override {
    return "empirical(n=" + std::to_string(sorted_.size()) + ")";
  }

 private:
  std::vector<double> sorted_;
  double n_;
};

}  // namespace

CdfModel normal(double sigma) {
  if (!(sigma >= 0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("normal sigma must be finite and >= 0");
  }
  if (sigma == 0) return point_mass(0.0);
  return CdfModel(std::make_shared<NormalImpl>(sigma));
}

CdfModel normal_plus_uniform(double sigma) {
  if (!(sigma >= 0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("normal sigma must be finite and >= 0");
  }
  if (sigma == 0) return uniform(0.0, 1.0);
  return CdfModel(std::make_shared<NormalPlusUniformImpl>(sigma));
}

CdfModel uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) {
    throw std::invalid_argument("uniform needs finite lo <= hi");
  }
  if (lo == hi) return point_mass(lo);
  return CdfModel(std::make_shared<UniformImpl>(lo, hi));
}

CdfModel point_mass(double at) {
  if (!std::isfinite(at)) throw std::invalid_argument("point mass must be finite");
  return CdfModel(std::make_shared<PointMassImpl>(at));
}

CdfModel bernoulli(double p) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("p must lie in [0,1]");
  if (p == 0) return point_mass(0.0);
  if (p == 1) return point_mass(1.0);
  return mixture({point_mass(0.0), point_mass(1.0)}, {1 - p, p});
}

CdfModel mixture(std::vector<CdfModel> parts, std::vector<double> weights) {
  if (parts.empty() || parts.size() != weights.size()) {
    throw std::invalid_argument("mixture needs one weight per component");
  }
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw std::invalid_argument("mixture weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1) > 1e-12) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
  return CdfModel(
      std::make_shared<MixtureImpl>(std::move(parts), std::move(weights)));
}

CdfModel empirical(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  for (double v : sorted) {
    if (std::isnan(v)) throw std::invalid_argument("NaN in sample");
  }
  std::sort(sorted.begin(), sorted.end());
  return CdfModel(std::make_shared<EmpiricalImpl>(std::move(sorted)));
}

}  // namespace cdf

}  // namespace tdclt
