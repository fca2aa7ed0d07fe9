#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "tdclt/cdf.hpp"
#include "tdclt/lcondition.hpp"
#include "tdclt/metrics.hpp"
#include "tdclt/process.hpp"
#include "tdclt/rng.hpp"
#include "tdclt/transform.hpp"

using namespace tdclt;

namespace {

ProcessSpec fbm_half() {
  ProcessSpec s;
  s.family = Family::fbm_shift;
  s.gamma = 0.5;
  return s;
}

ProcessSpec discrete_log2() {
  ProcessSpec s;
  s.family = Family::discrete_bernoulli;
  s.pt = {PtFamily::Kind::log_power, 2.0};
  return s;
}

}  // namespace

TEST_SUITE("transform") {

TEST_CASE("distributional transform values") {
  CHECK(distributional_transform(cdf::point_mass(0), 0, 0.25) == doctest::Approx(0.25));
  CHECK(distributional_transform(cdf::uniform(0, 1), 0.7, 0.1) == doctest::Approx(0.7));
  CHECK(distributional_transform(cdf::uniform(0, 1), 0.7, 0.9) == doctest::Approx(0.7));
  CHECK(distributional_transform(cdf::bernoulli(0.3), 1, 0.5) == doctest::Approx(0.85));
  CHECK_THROWS(distributional_transform(cdf::bernoulli(0.3), 1, 1.5));
  CHECK_THROWS(distributional_transform(cdf::bernoulli(0.3), 1, -0.1));
}

TEST_CASE("transform is nondecreasing in y") {
  const auto f = cdf::mixture({cdf::point_mass(0.5), cdf::uniform(0, 1)}, {1.0 / 3, 2.0 / 3});
  for (double v : {0.0, 0.3, 1.0}) {
    double prev = -1;
    for (int i = -10; i <= 110; ++i) {
      const double y = i / 100.0;
      const double z = distributional_transform(f, y, v);
      CHECK(z >= prev);
      prev = z;
    }
  }
}

TEST_CASE("uniformity over laws with and without atoms") {
  const std::vector<CdfModel> laws = {
      cdf::point_mass(0), cdf::bernoulli(0.3), cdf::uniform(0, 1),
      cdf::mixture({cdf::point_mass(0.5), cdf::uniform(0, 1)}, {1.0 / 3, 2.0 / 3})};
  for (const auto& f : laws) {
    CAPTURE(f.describe());
    CHECK(uniformity_check(f, quantile_sampler(f), 100000, 11, Exec{4}) < 0.01);
  }
  CHECK_THROWS(uniformity_check(cdf::uniform(0, 1), quantile_sampler(cdf::uniform(0, 1)), 50, 1));
}

TEST_CASE("transform samples use disjoint streams and ignore workers") {
  const auto f = cdf::bernoulli(0.3);
  auto a = transform_samples(f, quantile_sampler(f), 1000, 5, Exec{1});
  auto b = transform_samples(f, quantile_sampler(f), 1000, 5, Exec{8});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].u == b[i].u);
  }
}

TEST_CASE("empirical cdf") {
  const std::vector<double> one{1};
  auto f = empirical_cdf(one);
  CHECK(f(0.999) == 0.0);
  CHECK(f(1) == 1.0);
  CHECK(f.left_limit(1) == 0.0);
  const std::vector<double> three{1, 1, 2};
  auto g = empirical_cdf(three);
  CHECK(g(1) == doctest::Approx(2.0 / 3));
  CHECK(g.left_limit(2) == doctest::Approx(2.0 / 3));
  CHECK(g(2) == 1.0);
  CHECK_THROWS(empirical_cdf(std::vector<double>{}));

  RandomStream rng({3, 0}, Substream::sample);
  std::vector<double> z(10000);
  for (double& v : z) v = rng.normal();
  CHECK(ks_one_sample(z, cdf::normal(1.0)) < 0.03);
}

TEST_CASE("ks statistics against hand counts") {
  CHECK(ks_uniform({0.5}) == doctest::Approx(0.5));
  CHECK(ks_uniform({0.25, 0.75}) == doctest::Approx(0.25));
  CHECK(ks_two_sample({1, 2}, {1, 2}) == 0.0);
  CHECK(ks_two_sample({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_two_sample({1, 3}, {2, 4}) == doctest::Approx(0.5));
  // Atoms: a sample equal to the atom has zero distance.
  CHECK(ks_one_sample({0, 0, 0}, cdf::point_mass(0)) == 0.0);
}

}  // TEST_SUITE

TEST_SUITE("metrics") {

TEST_CASE("lambda") {
  CHECK(lambda_metric(0.3, 0.2) == 0.3);
  CHECK(lambda_metric(0, 0) == 0.0);
  CHECK(lambda_metric(0.1, 0.5) == 0.5);
}

TEST_CASE("tau: identity and independent halves") {
  const PathSampler fbm(fbm_half(), TimeGrid::uniform(8));
  const auto same = estimate_tau(fbm, {3, 0.1}, {3, 0.1}, 2000, 1);
  CHECK(same.value == 0.0);

  ProcessSpec geo;
  geo.family = Family::discrete_bernoulli;
  geo.pt = {PtFamily::Kind::geometric, 0.5};
  // P(X_1 <= 0) = 1/2 and X_1, X_2 independent: tau^2 = a + b - 2ab = 1/2 for any b.
  const PathSampler disc(geo, TimeGrid::discrete(2));
  const auto paths = disc.batch(9, 0, 100000);
  const auto t2 = estimate_tau_sq(paths, {0, 0}, {1, 0});
  CHECK(std::fabs(t2.value - 0.5) <= 4 * t2.se);
  CHECK_THROWS(estimate_tau(fbm, {0, 0}, {1, 0}, 10, 1));
}

TEST_CASE("lemma 1 trivial and fbm pair") {
  const auto spec = fbm_half();
  const TimeGrid grid = TimeGrid::interval({0.49, 0.51});
  const PathSampler s(spec, grid);
  const auto paths = s.batch(21, 0, 100000, Exec{4});
  const auto xs = quantile_x_grid(analytic_cdf(spec, grid[0]), analytic_cdf(spec, grid[1]), 64);
  const auto same = check_lemma1(paths, spec, grid, 0, 0, xs, 0.0, 1.0);
  CHECK(same.p_st.value == 0.0);
  CHECK(same.l1.value == 0.0);
  CHECK(same.sup_diff.value == 0.0);
  CHECK_FALSE(same.violated);
  const auto r = check_lemma1(paths, spec, grid, 0, 1, xs, 0.0, 1.0);
  CHECK_FALSE(r.violated);
  CHECK(r.bound_double == doctest::Approx(2 * r.bound_single));
  CHECK(r.rho == doctest::Approx(std::pow(0.02, 0.2)));
}

TEST_CASE("corollary 1 diameters") {
  const auto spec = fbm_half();
  const TimeGrid grid = TimeGrid::uniform(64);
  const PathSampler s(spec, grid);
  const auto paths = s.batch(22, 0, 20000, Exec{4});
  const std::size_t one[] = {10};
  const auto triv = check_corollary1_diameter(paths, spec, grid, one, 10, 0.3, 0.3, 0.0, 1.0, 1);
  CHECK(triv.tau.value.value == 0.0);
  CHECK_FALSE(triv.violated);
  std::vector<std::size_t> cell;
  for (std::size_t g = 0; g < grid.size(); ++g)
    if (grid[g].s >= 0.4 && grid[g].s <= 0.6) cell.push_back(g);
  const auto r = check_corollary1_diameter(paths, spec, grid, cell, cell[cell.size() / 2], 0.0, 0.1, 1.0, 1.0);
  CHECK_FALSE(r.violated);
  CHECK(r.tau.value.value <= r.bound);
}

TEST_CASE("theorem 5 condition III holds for alpha <= 1") {
  const auto spec = fbm_half();
  const TimeGrid grid = TimeGrid::uniform(16);
  const std::vector<double> xs{1, 2, 4, 8};
  const auto rep = check_theorem5_conditions(spec, grid, 1.0, 1.0, 1.0, 0.8, 0.2, 2000, 3, xs);
  CHECK(rep.cond3);
  CHECK(rep.cond3_worst <= 1e-12);
  CHECK(rep.tail.size() == xs.size());
  CHECK(rep.density_sup > 0);
}

TEST_CASE("theorem 5 tail of the Hoelder ratio") {
  const TimeGrid grid = TimeGrid::uniform(64);
  std::vector<double> xs;
  for (double x = 1; x <= 8; x += 0.5) xs.push_back(x);
  const auto rep = check_theorem5_conditions(fbm_half(), grid, 1.0, 1.0, 4.0, 1.0, 0.2, 20000, 17, xs, Exec{4});
  CHECK(rep.x0 <= 4);
  for (const auto& p : rep.tail) {
    CHECK(p.bound == doctest::Approx(std::pow(p.x, -4.0)));
    if (p.x >= 4) CHECK(p.exceed.value - 4 * p.exceed.se <= p.bound);
  }
}

TEST_CASE("metric table triangle law") {
  const auto d = rho_table(fbm_half(), 1.0, TimeGrid::uniform(20));
  CHECK(d.worst_triangle_excess() <= 0);
  CHECK(d(3, 3) == 0.0);
  CHECK(d(2, 7) == d(7, 2));
}

}  // TEST_SUITE

TEST_SUITE("lcondition") {

TEST_CASE("weak L is zero with trivial balls") {
  const auto spec = fbm_half();
  const std::vector<double> eps{1e-6};
  const auto rep = estimate_weak_l(spec, TimeGrid::uniform(8), eps, 1000, 4);
  REQUIRE_FALSE(rep.rows.empty());
  for (const auto& row : rep.rows) {
    CHECK(row.prob.value == 0.0);
    CHECK(row.ball_trivial);
  }
  CHECK(rep.l_hat == 0.0);
}

TEST_CASE("strong L of the constant process vanishes") {
  ProcessSpec c;
  c.family = Family::constant;
  const auto eps = dyadic_eps_grid(6);
  const auto rep = estimate_strong_l(c, TimeGrid::uniform(10), eps, 5000, 6);
  for (const auto& row : rep.rows) CHECK(row.prob.value == 0.0);
}

TEST_CASE("fbm strong-L estimate is finite across eps") {
  auto spec = fbm_half();
  const std::vector<double> eps{0.05, 0.1, 0.2, 0.4};
  const auto rep = estimate_strong_l(spec, TimeGrid::uniform(32), eps, 20000, 8, 0.5, Exec{4});
  CHECK(std::isfinite(rep.l_hat));
  CHECK(rep.l_hat < 10);
  CHECK(rep.l_hat >= 0);
}

TEST_CASE("exact modified L") {
  const PtFamily pt{PtFamily::Kind::log_power, 2.0};
  CHECK(exact_modified_l_prob(pt, 1.5, 5, 0.1) == 0.0);
  // p_t <= eps^2 branch.
  CHECK(exact_modified_l_prob(pt, 1.5, 1e6, 0.5) == 0.0);
  const auto eps = dyadic_eps_grid(20);
  const auto rep = exact_modified_l(pt, 1.5, 20000, eps);
  CHECK(rep.l_hat == 0.0);
  for (const auto& row : rep.rows) CHECK(row.prob.value == 0.0);
}

TEST_CASE("MC strong L agrees with the exact evaluation on the discrete model") {
  const auto eps = dyadic_eps_grid(6);
  const auto mc = estimate_strong_l(discrete_log2(), TimeGrid::discrete(40), eps, 5000, 12);
  const auto ex = exact_modified_l(discrete_log2().pt, 1.5, 40, eps);
  CHECK(mc.l_hat == ex.l_hat);
}

TEST_CASE("lemma 4 ball") {
  const auto spec = fbm_half();
  const TimeGrid grid = TimeGrid::uniform(33);
  const std::size_t mid = grid.index_of({0.5, 0});
  const auto tiny = estimate_lemma4_ball(spec, grid, {mid, 0.0}, 1e-9, 1.0, 4000, 2);
  CHECK(tiny.prob.value == 0.0);
  const auto r = estimate_lemma4_ball(spec, grid, {mid, 0.0}, 0.2, 1.0, 20000, 2, 1.0, Exec{4});
  const double c = std::sqrt(4.0) + 1;
  CHECK(r.bound == doctest::Approx((2 * c * c + 3) * 0.04));
  CHECK(r.prob.value <= r.bound + 4 * r.prob.se);
}

TEST_CASE("lemma 4 ball for the constant process") {
  ProcessSpec c;
  c.family = Family::constant;
  const TimeGrid grid = TimeGrid::uniform(4);
  const double eps = 0.2;
  const auto r = estimate_lemma4_ball(c, grid, {1, 0.0}, eps, 0.0, 20000, 5);
  // Every ball member has |Phi(x) - 1/2| <= eps^2, so the straddle
  // probability is at most 2 eps^2.
  CHECK(r.prob.value <= 2 * eps * eps + 4 * r.prob.se);
  CHECK(r.prob.value > 0);
  CHECK(r.prob.value <= r.bound);
}

TEST_CASE("proposition 2 criteria") {
  const std::vector<double> rs{0.5, 1, 2};
  const auto lp2 = proposition2_criteria({PtFamily::Kind::log_power, 2.0}, 1000, rs);
  CHECK(lp2.pregaussian);
  CHECK_FALSE(lp2.clt);
  const auto lp1 = proposition2_criteria({PtFamily::Kind::log_power, 1.0}, 1000, rs);
  CHECK_FALSE(lp1.pregaussian);
  const auto geo = proposition2_criteria({PtFamily::Kind::geometric, 0.5}, 200, rs);
  CHECK(geo.clt);
  // sum 2^-t (1 - 2^-t) = 1 - 1/3
  CHECK(geo.partial_sums[1] == doctest::Approx(2.0 / 3));
  CHECK_THROWS(proposition2_criteria({PtFamily::Kind::geometric, 1.5}, 10, rs));
}

}  // TEST_SUITE
