#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tdclt/cdf.hpp"
#include "tdclt/parallel.hpp"
#include "tdclt/rng.hpp"

namespace tdclt {

struct TransformSample {
  double y = 0.0;
  double v = 0.0;
  double u = 0.0;
};

//! F(y-) + v (F(y) - F(y-)). Throws unless v is in [0,1].
double distributional_transform(const CdfModel& f, double y, double v);

//! Draws one observation from a stream.
using Sampler = std::function<double(RandomStream&)>;

//! Inverse-CDF sampler Y = Q(W), W uniform on the open interval (0,1).
Sampler quantile_sampler(CdfModel f);

//! The n transformed samples: replicate i draws Y from its `sample`
//! substream and V from its `aux` substream under `master_seed`.
std::vector<TransformSample> transform_samples(const CdfModel& f,
                                               const Sampler& draw,
                                               std::size_t n,
                                               std::uint64_t master_seed,
                                               const Exec& exec = {});

//! sup_u |G_n(u) - u| for the empirical CDF G_n of the transformed sample.
//! Requires n >= 100.
double uniformity_check(const CdfModel& f, const Sampler& draw, std::size_t n,
                        std::uint64_t master_seed, const Exec& exec = {});

CdfModel empirical_cdf(std::span<const double> sample);

//! Kolmogorov distance between the sample's empirical CDF and the
//! uniform law on [0,1].
double ks_uniform(std::vector<double> u);
//! sup_x |F_n(x) - F(x)| with exact handling of atoms of F.
double ks_one_sample(std::vector<double> x, const CdfModel& f);
//! sup_x |F_n(x) - G_m(x)|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace tdclt
