#include "tdclt/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdclt {

double distributional_transform(const CdfModel& f, double y, double v) {
  if (!(v >= 0 && v <= 1)) throw std::invalid_argument("v must lie in [0,1]");
  const double lo = f.left_limit(y);
  const double hi = f.eval(y);
  return std::clamp(lo + v * (hi - lo), 0.0, 1.0);
}

Sampler quantile_sampler(CdfModel f) {
  return [f = std::move(f)](RandomStream& rng) {
    const double w = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    return f.quantile(w);
  };
}

std::vector<TransformSample> transform_samples(const CdfModel& f,
                                               const Sampler& draw,
                                               std::size_t n,
                                               std::uint64_t master_seed,
                                               const Exec& exec) {
  std::vector<TransformSample> out(n);
  parallel_for(n, exec, [&](std::size_t i) {
    const SeedSpec seed{master_seed, i};
    RandomStream ys(seed, Substream::sample);
    RandomStream vs(seed, Substream::aux);
    TransformSample& s = out[i];
    s.y = draw(ys);
    s.v = vs.uniform();
    s.u = distributional_transform(f, s.y, s.v);
  });
  return out;
}

double uniformity_check(const CdfModel& f, const Sampler& draw, std::size_t n,
                        std::uint64_t master_seed, const Exec& exec) {
  if (n < 100) throw std::invalid_argument("uniformity check needs n >= 100");
  const auto samples = transform_samples(f, draw, n, master_seed, exec);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = samples[i].u;
  return ks_uniform(std::move(u));
}

CdfModel empirical_cdf(std::span<const double> sample) {
  return cdf::empirical(sample);
}

double ks_uniform(std::vector<double> u) {
  return ks_one_sample(std::move(u), cdf::uniform(0.0, 1.0));
}

double ks_one_sample(std::vector<double> x, const CdfModel& f) {
  if (x.empty()) throw std::invalid_argument("empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  std::size_t i = 0;
  while (i < x.size()) {
    // Walk past ties: F_n jumps from i/n to j/n at x[i].
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    const double below = static_cast<double>(i) / n;
    const double at = static_cast<double>(j) / n;
    d = std::max(d, std::abs(below - f.left_limit(x[i])));
    d = std::max(d, std::abs(at - f.eval(x[i])));
    i = j;
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace tdclt
