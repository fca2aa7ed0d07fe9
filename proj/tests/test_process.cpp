#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "tdclt/cdf.hpp"
#include "tdclt/grid.hpp"
#include "tdclt/linalg.hpp"
#include "tdclt/process.hpp"

using namespace tdclt;

namespace {

ProcessSpec family(Family f) {
  ProcessSpec s;
  s.family = f;
  return s;
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("factories and validation") {
  auto u = TimeGrid::uniform(5);
  CHECK(u.size() == 5);
  CHECK(u[4].s == 1.0);
  auto d = TimeGrid::dyadic(3);
  REQUIRE(d.size() == 5);
  CHECK(d[0].s == 0.0);
  CHECK(d[1].s == 0.125);
  CHECK(d[4].s == 1.0);
  CHECK_THROWS(TimeGrid::interval({0.5, 0.2}));
  CHECK_THROWS(TimeGrid::interval({}));
  CHECK_THROWS(TimeGrid::interval({0.5, 1.5}));
  CHECK_THROWS(TimeGrid::sheet({{0.5, 0.5}, {0.5, 0.25}}));
  CHECK_THROWS(TimeGrid::discrete_points({0, 1}));
  CHECK(TimeGrid::sheet_uniform(3).size() == 9);
  CHECK(u.index_of({0.5, 0}) == 2);
  CHECK_THROWS(u.index_of({0.3, 0}));
  CHECK(grid_kind_from_string("sheet-2d") == GridKind::sheet_2d);
}

}  // TEST_SUITE

TEST_SUITE("process") {

TEST_CASE("bm-tied is pinned at zero") {
  auto p = generate_path(family(Family::bm_tied), TimeGrid::interval({0.0}), {3, 9});
  CHECK(p.values[0] == 0.0);
  auto q = generate_path(family(Family::bm_tied), TimeGrid::dyadic(60), {3, 9});
  CHECK(q.values[0] == 0.0);
  for (double v : q.values) CHECK(std::isfinite(v));
}

TEST_CASE("lip1-osc branch bands at (5/4) 2^-j") {
  auto spec = family(Family::lip1_osc);
  spec.oscillator_intervals = 30;
  std::vector<double> pts;
  for (int j = 30; j >= 1; --j) pts.push_back(1.25 * std::ldexp(1.0, -j));
  const TimeGrid grid = TimeGrid::interval(pts);
  int fast = 0, slow = 0;
  for (std::uint64_t r = 0; r < 40; ++r) {
    auto p = generate_path(spec, grid, {4, r});
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double t = grid[g].s;
      const double x = p.values[g];
      const bool in_fast = x >= 3 * t && x <= 4 * t;
      const bool in_slow = x >= 4.5 * t && x <= 6 * t;
      CHECK((in_fast || in_slow));
      fast += in_fast;
      slow += in_slow;
    }
  }
  CHECK(fast > 0);
  CHECK(slow > 0);
  CHECK(oscillator_branch(1.25 * 0.125, 3, 0) == 1.0);
  CHECK(oscillator_branch(1.25 * 0.125, 3, 1) == 0.0);
  CHECK(oscillator_interval(0.5) == 2);
  CHECK(oscillator_interval(0.51) == 1);
  CHECK(oscillator_interval(1.0) == 1);
}

TEST_CASE("lip1-osc vanishes on (0, 2^-J] and at 0") {
  auto spec = family(Family::lip1_osc);
  spec.oscillator_intervals = 4;
  const TimeGrid grid = TimeGrid::interval({0.0, 0.03, 0.0625, 0.07, 0.9});
  auto p = generate_path(spec, grid, {1, 1});
  CHECK(p.values[0] == 0.0);
  CHECK(p.values[1] == 0.0);
  CHECK(p.values[2] == 0.0);
  CHECK(p.values[3] > 0.0);
}

TEST_CASE("lip1-osc Lipschitz constant") {
  auto spec = family(Family::lip1_osc);
  spec.oscillator_intervals = 12;
  const TimeGrid grid = TimeGrid::uniform(2049);
  const PathSampler sampler(spec, grid);
  double worst_loose = 0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto p = sampler.path({2, r});
    const double u_max = 2.0;  // U lies in [1.5, 2)
    for (std::size_t g = 1; g < grid.size(); ++g) {
      const double slope = std::fabs(p.values[g] - p.values[g - 1]) / (grid[g].s - grid[g - 1].s);
      CHECK(slope <= (8 * std::numbers::pi + 3) * u_max);
      worst_loose = std::max(worst_loose, slope / (4 * std::numbers::pi + 3));
    }
  }
  // The faster branch exceeds (4 pi + 3) U somewhere on a fine grid.
  CHECK(worst_loose > 1.5);
}

TEST_CASE("linear-u is t X(1), nondecreasing, zero at 0") {
  const TimeGrid grid = TimeGrid::uniform(33);
  for (std::uint64_t r = 0; r < 10; ++r) {
    auto p = generate_path(family(Family::linear_u), grid, {8, r});
    CHECK(p.values[0] == 0.0);
    for (std::size_t g = 1; g < grid.size(); ++g) {
      CHECK(p.values[g] >= p.values[g - 1]);
      CHECK(p.values[g] == grid[g].s * p.values.back());
    }
  }
}

TEST_CASE("discrete-bernoulli values are 0/1 and independent of grid membership") {
  auto spec = family(Family::discrete_bernoulli);
  auto a = generate_path(spec, TimeGrid::discrete(10), {5, 2});
  auto b = generate_path(spec, TimeGrid::discrete_points({3, 7}), {5, 2});
  for (double v : a.values) CHECK((v == 0.0 || v == 1.0));
  CHECK(a.values[2] == b.values[0]);
  CHECK(a.values[6] == b.values[1]);
}

TEST_CASE("generation is pure") {
  const TimeGrid grid = TimeGrid::uniform(16);
  auto a = generate_path(family(Family::fbm_shift), grid, {1, 5});
  auto b = generate_path(family(Family::fbm_shift), grid, {1, 5});
  CHECK(a.values == b.values);
  const PathSampler s(family(Family::fbm_shift), grid);
  auto b1 = s.batch(3, 0, 50, Exec{1});
  auto b4 = s.batch(3, 0, 50, Exec{4});
  CHECK(b1.data == b4.data);
}

TEST_CASE("fbm-shift increment variance") {
  const TimeGrid grid = TimeGrid::interval({0.25, 0.75});
  const PathSampler s(family(Family::fbm_shift), grid);
  const std::size_t n = 100000;
  auto b = s.batch(17, 0, n);
  double m1 = 0, m2 = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const double d = b(1, r) - b(0, r);
    m1 += d;
    m2 += d * d;
  }
  m1 /= n;
  const double var = m2 / n - m1 * m1;
  // Var of the sample variance of a normal: 2 sigma^4 / n.
  CHECK(std::fabs(var - 0.5) <= 3 * std::sqrt(2 * 0.25 / n));
}

TEST_CASE("empirical covariance of the Gaussian families") {
  for (auto f : {Family::fbm_shift, Family::bm_tied, Family::sheet_shift}) {
    CAPTURE(to_string(f));
    auto spec = family(f);
    spec.gamma = 0.3;
    const TimeGrid grid = f == Family::sheet_shift ? TimeGrid::sheet_uniform(3) : TimeGrid::uniform(6);
    const PathSampler s(spec, grid);
    const std::size_t n = 100000, m = grid.size();
    auto b = s.batch(23, 0, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k <= i; ++k) {
        double c = 0;
        double c2 = 0;
        for (std::size_t r = 0; r < n; ++r) {
          const double v = b(i, r) * b(k, r);
          c += v;
          c2 += v * v;
        }
        c /= n;
        const double se = std::sqrt((c2 / n - c * c) / n);
        const GridPoint a = grid[i], q = grid[k];
        double exact;
        if (f == Family::fbm_shift)
          exact = 0.5 * (std::pow(a.s, 0.6) + std::pow(q.s, 0.6) - std::pow(std::fabs(a.s - q.s), 0.6)) + 1;
        else if (f == Family::bm_tied)
          exact = std::min(a.s, q.s);
        else
          exact = std::min(a.s, q.s) * std::min(a.u, q.u) + 1;
        CHECK(std::fabs(c - exact) <= 4 * se + 1e-12);
      }
  }
}

TEST_CASE("incompatible grid and family") {
  CHECK_THROWS(PathSampler(family(Family::sheet_shift), TimeGrid::uniform(4)));
  CHECK_THROWS(PathSampler(family(Family::discrete_bernoulli), TimeGrid::uniform(4)));
  CHECK_THROWS(PathSampler(family(Family::fbm_shift), TimeGrid::discrete(4)));
  auto bad = family(Family::fbm_shift);
  bad.gamma = 1.0;
  CHECK_FALSE(validate_spec(bad).empty());
}

TEST_CASE("analytic marginals") {
  CHECK(analytic_cdf(family(Family::linear_u), {0.5, 0})(0.25) == doctest::Approx(0.5));
  const double p1 = std::pow(std::log(3.0), -2.0);
  CHECK(analytic_cdf(family(Family::discrete_bernoulli), {1, 0})(0.0) == doctest::Approx(1 - p1));
  CHECK(analytic_cdf(family(Family::bm_tied), {0, 0})(0.0) == 1.0);
  CHECK(analytic_cdf(family(Family::bm_tied), {0, 0})(3.0) == 1.0);
  auto f = analytic_cdf(family(Family::fbm_shift), {0.49, 0});
  CHECK(f(0.3) == doctest::Approx(cdf::std_normal_cdf(0.3 / std::sqrt(0.49 + 1))));
}

TEST_CASE("analytic rho") {
  auto fbm = family(Family::fbm_shift);  // theta = 0.2
  CHECK(analytic_rho(fbm, 1.0, {0.3, 0}, {0.3, 0}) == 0.0);
  fbm.holder_theta = 0.25;
  CHECK(analytic_rho(fbm, 1.0, {0, 0}, {1, 0}) == doctest::Approx(1.0));
  auto d = family(Family::discrete_bernoulli);
  CHECK(analytic_rho(d, 1.0, {1, 0}, {2, 0}) ==
        doctest::Approx(std::sqrt(std::pow(std::log(3.0), -1.5) + std::pow(std::log(4.0), -1.5))));
  CHECK(analytic_rho(d, 1.0, {2, 0}, {2, 0}) == 0.0);
  CHECK_THROWS(analytic_rho(family(Family::fbm_shift), 6.0, {0, 0}, {1, 0}));
  CHECK_THROWS(analytic_rho(family(Family::fbm_shift), 0.0, {0, 0}, {1, 0}));
}

TEST_CASE("factorization clipping and failure") {
  // Rank one: eigenvalues 2 and 0.
  auto f = factor_covariance({1, 1, 1, 1}, 2);
  CHECK(f.dim == 2);
  CHECK_THROWS_AS(factor_covariance({1, 2, 2, 1}, 2), FactorizationError);
  try {
    factor_covariance({1, 2, 2, 1}, 2);
  } catch (const FactorizationError& e) {
    CHECK(e.min_eigenvalue == doctest::Approx(-1.0));
  }
}

}  // TEST_SUITE
