#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tdclt {

enum class CdfKind { analytic, empirical };

//! Backend of a CdfModel. `quantile` is the generalized inverse
//! inf{x : F(x) >= c}; the default bisects between `bracket(c)` bounds.
class CdfImpl {
 public:
  virtual ~CdfImpl() = default;
  virtual double eval(double x) const = 0;
  virtual double left_limit(double x) const = 0;
  virtual double quantile(double c) const;
  //! Points with F(x) > F(x-), ascending. Continuous laws return none.
  virtual std::vector<double> atoms() const { return {}; }
  //! Smallest closed interval carrying all mass (may be infinite).
  virtual std::pair<double, double> support() const = 0;
  virtual CdfKind kind() const { return CdfKind::analytic; }
  virtual std::string describe() const = 0;

 protected:
  //! Bounds lo <= Q(c) <= hi for 0 < c < 1.
  virtual std::pair<double, double> bracket(double c) const;
};

/*!
 * A distribution function on R: right-continuous evaluation, exact left
 * limits and generalized-inverse quantiles. Immutable and cheap to copy.
 */
class CdfModel {
 public:
  explicit CdfModel(std::shared_ptr<const CdfImpl> impl);

  double operator()(double x) const { return impl_->eval(x); }
  double eval(double x) const { return impl_->eval(x); }
  double left_limit(double x) const { return impl_->left_limit(x); }
  double jump(double x) const { return eval(x) - left_limit(x); }
  //! inf{x : F(x) >= c}; -inf for c <= 0, +inf for c > 1.
  double quantile(double c) const;
  std::vector<double> atoms() const { return impl_->atoms(); }
  std::pair<double, double> support() const { return impl_->support(); }
  CdfKind kind() const { return impl_->kind(); }
  std::string describe() const { return impl_->describe(); }

 private:
  std::shared_ptr<const CdfImpl> impl_;
};

namespace cdf {

double std_normal_cdf(double z);
double std_normal_pdf(double z);
double std_normal_quantile(double c);

//! N(0, sigma^2); sigma == 0 gives the point mass at 0.
CdfModel normal(double sigma);
//! Law of sigma*G + U with G standard normal, U uniform on [0,1].
CdfModel normal_plus_uniform(double sigma);
CdfModel uniform(double lo, double hi);
CdfModel point_mass(double at);
//! Two-point law: 1 with probability p, 0 otherwise.
CdfModel bernoulli(double p);
//! Convex combination; weights must be nonnegative and sum to 1.
CdfModel mixture(std::vector<CdfModel> parts, std::vector<double> weights);
//! Step CDF of the sample; throws on an empty sample.
CdfModel empirical(std::span<const double> sample);

}  // namespace cdf

}  // namespace tdclt
