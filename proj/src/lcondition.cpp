#include "tdclt/lcondition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tdclt/kernels.hpp"
#include "tdclt/transform.hpp"

namespace tdclt {

std::string_view to_string(LVariant v) {
  switch (v) {
    case LVariant::weak: return "weak";
    case LVariant::strong: return "strong";
    case LVariant::modified: return "modified";
  }
  return "?";
}

std::vector<double> dyadic_eps_grid(int count) {
  std::vector<double> e;
  for (int k = 1; k <= count; ++k) e.push_back(std::ldexp(1.0, -k));
  return e;
}

namespace {

Estimate proportion(std::size_t hits, std::size_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1 - p) / static_cast<double>(n))};
}

std::vector<std::size_t> rho_ball(const ProcessSpec& spec, const TimeGrid& grid,
                                  std::size_t t, double radius, double alpha) {
  std::vector<std::size_t> ball;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    if (s == t) continue;
    if (analytic_rho(spec, alpha, grid[s], grid[t], grid.horizon()) <= radius) {
      ball.push_back(s);
    }
  }
  return ball;
}

// F~_t(x, v); continuous laws skip the left limit.
struct Transformer {
  explicit Transformer(CdfModel f) : f(std::move(f)), continuous(this->f.atoms().empty()) {}
  double operator()(double x, double v) const {
    return continuous ? f(x) : distributional_transform(f, x, v);
  }
  CdfModel f;
  bool continuous;
};

LConditionReport sweep(const PathBatch& paths, const ProcessSpec& spec,
                       const TimeGrid& grid, std::span<const double> eps_grid,
                       double alpha, std::uint64_t aux_seed, LVariant variant) {
  LConditionReport rep;
  rep.variant = variant;
  rep.eps_grid.assign(eps_grid.begin(), eps_grid.end());
  for (std::size_t t = 0; t < grid.size(); ++t) {
    for (double eps : eps_grid) {
      LConditionRow row;
      row.variant = variant;
      row.t = t;
      row.eps = eps;
      row.ball_size = rho_ball(spec, grid, t, eps, alpha).size();
      row.ball_trivial = row.ball_size == 0;
      if (!row.ball_trivial) {
        row.prob = l_exceedance(paths, spec, grid, t, eps, eps * eps, alpha,
                                aux_seed, variant == LVariant::weak);
      }
      row.ratio = row.prob.value / (eps * eps);
      rep.l_hat = std::max(rep.l_hat, row.ratio);
      rep.rows.push_back(row);
    }
  }
  return rep;
}

}  // namespace

Estimate l_exceedance(const PathBatch& paths, const ProcessSpec& spec,
                      const TimeGrid& grid, std::size_t t, double radius,
                      double threshold, double alpha,
                      std::uint64_t aux_seed, bool per_point) {
  const auto ball = rho_ball(spec, grid, t, radius, alpha);
  if (ball.empty() || paths.reps == 0) return {};
  const Transformer ft(analytic_cdf(spec, grid[t]));
  const auto xt = paths.at_point(t);
  std::vector<std::size_t> hits(per_point ? ball.size() : 1, 0);
  for (std::size_t r = 0; r < paths.reps; ++r) {
    RandomStream vs(SeedSpec{aux_seed, r}, Substream::aux, t);
    const double v = vs.uniform();
    const double ut = ft(xt[r], v);
    for (std::size_t k = 0; k < ball.size(); ++k) {
      const double us = ft(paths(ball[k], r), v);
      if (std::abs(us - ut) > threshold) {
        if (!per_point) {
          ++hits[0];
          break;
        }
        ++hits[k];
      }
    }
  }
  const std::size_t best = *std::max_element(hits.begin(), hits.end());
  return proportion(best, paths.reps);
}

LConditionReport estimate_weak_l(const PathBatch& paths, const ProcessSpec& spec,
                                 const TimeGrid& grid,
                                 std::span<const double> eps_grid, double alpha,
                                 std::uint64_t aux_seed) {
  return sweep(paths, spec, grid, eps_grid, alpha, aux_seed, LVariant::weak);
}

LConditionReport estimate_strong_l(const PathBatch& paths, const ProcessSpec& spec,
                                   const TimeGrid& grid,
                                   std::span<const double> eps_grid, double alpha,
                                   std::uint64_t aux_seed) {
  return sweep(paths, spec, grid, eps_grid, alpha, aux_seed, LVariant::strong);
}

LConditionReport estimate_weak_l(const ProcessSpec& spec, const TimeGrid& grid,
                                 std::span<const double> eps_grid, std::size_t n,
                                 std::uint64_t master_seed, double alpha,
                                 const Exec& exec) {
  const PathBatch paths = PathSampler(spec, grid).batch(master_seed, 0, n, exec);
  return estimate_weak_l(paths, spec, grid, eps_grid, alpha, master_seed);
}

LConditionReport estimate_strong_l(const ProcessSpec& spec, const TimeGrid& grid,
                                   std::span<const double> eps_grid, std::size_t n,
                                   std::uint64_t master_seed, double alpha,
                                   const Exec& exec) {
  const PathBatch paths = PathSampler(spec, grid).batch(master_seed, 0, n, exec);
  return estimate_strong_l(paths, spec, grid, eps_grid, alpha, master_seed);
}

double exact_modified_l_prob(const PtFamily& pt, double h_variance, double t,
                             double eps) {
  const double e2 = eps * eps;
  const double p = pt.p(t);
  // A disagreement moves F_t by exactly p_t.
  if (p <= e2) return 0.0;
  const double vt = std::pow(std::log(t + 2), -h_variance);
  // rho(s,t)^2 = v_s + v_t > v_t, so the ball is empty unless v_t < eps^2.
  if (vt >= e2) return 0.0;
  // Ball = {s != t : s >= s0}, an infinite tail.
  if (pt.kind == PtFamily::Kind::log_power) return 1.0;  // sum p_s diverges
  const double gap = e2 - vt;
  const double s0 = std::max(1.0, std::ceil(std::exp(std::pow(gap, -1 / h_variance)) - 2));
  const double q = pt.param;
  double log_prod = 0;
  if (std::isfinite(s0)) {
    double s = s0;
    double qs = std::pow(q, s);
    while (qs > 1e-18) {
      if (s != t) log_prod += std::log1p(-qs);
      s += 1;
      qs *= q;
    }
    log_prod -= qs / (1 - q);
  }
  return 1 - (1 - p) * std::exp(log_prod);
}

LConditionReport exact_modified_l(const PtFamily& pt, double h_variance,
                                  std::size_t t_max,
                                  std::span<const double> eps_grid) {
  if (pt.kind == PtFamily::Kind::log_power && !(pt.param > 0)) {
    throw std::invalid_argument("log-power exponent must be > 0");
  }
  if (pt.kind == PtFamily::Kind::geometric && !(pt.param > 0 && pt.param < 1)) {
    throw std::invalid_argument("geometric ratio must lie in (0,1)");
  }
  if (!(h_variance > 0)) throw std::invalid_argument("h-variance must be > 0");
  if (t_max == 0) throw std::invalid_argument("t_max must be >= 1");
  LConditionReport rep;
  rep.variant = LVariant::modified;
  rep.eps_grid.assign(eps_grid.begin(), eps_grid.end());
  for (double eps : eps_grid) {
    if (!(eps > 0)) throw std::invalid_argument("eps must be > 0");
    LConditionRow row;
    row.variant = LVariant::modified;
    row.eps = eps;
    row.t = 1;
    for (std::size_t t = 1; t <= t_max; ++t) {
      const double p = exact_modified_l_prob(pt, h_variance, static_cast<double>(t), eps);
      if (p > row.prob.value) {
        row.prob.value = p;
        row.t = t;
      }
    }
    row.ratio = row.prob.value / (eps * eps);
    rep.l_hat = std::max(rep.l_hat, row.ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

BallEstimate estimate_lemma4_ball(const PathBatch& pilot, const PathBatch& fresh,
                                  const ProcessSpec& spec, const TimeGrid& grid,
                                  IndexPoint anchor, double eps, double L,
                                  double alpha, std::size_t levels) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be > 0");
  if (fresh.reps == 0 || pilot.reps == 0) throw std::invalid_argument("empty batch");
  BallEstimate out;
  const double c = std::sqrt(2 * L + 2) + 1;
  out.bound = (2 * c * c + 2 * L + 1) * eps * eps;

  const std::size_t words = kernels::words_for(fresh.reps);
  std::vector<std::uint64_t> anchor_bits(words), any(words, 0), bits(words);
  kernels::pack_leq(fresh.at_point(anchor.t), anchor.y, anchor_bits);

  for (std::size_t s = 0; s < grid.size(); ++s) {
    const double rho = analytic_rho(spec, alpha, grid[s], grid[anchor.t], grid.horizon());
    if (rho > eps) continue;
    const CdfModel fs = analytic_cdf(spec, grid[s]);
    std::vector<double> xs;
    for (std::size_t k = 0; k < levels; ++k) {
      const double q = fs.quantile((static_cast<double>(k) + 0.5) /
                                   static_cast<double>(levels));
      if (std::isfinite(q)) xs.push_back(q);
    }
    const auto atoms = fs.atoms();
    xs.insert(xs.end(), atoms.begin(), atoms.end());
    if (!atoms.empty()) xs.push_back(atoms.front() - 1);
    xs.push_back(anchor.y);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (double x : xs) {
      const Estimate tau = estimate_tau(pilot, anchor, {s, x});
      if (lambda_metric(tau.value, rho) > eps) continue;
      ++out.candidates;
      kernels::pack_leq(fresh.at_point(s), x, bits);
      for (std::size_t w = 0; w < words; ++w) any[w] |= bits[w] ^ anchor_bits[w];
    }
  }
  std::size_t hits = 0;
  for (std::uint64_t w : any) hits += static_cast<std::size_t>(std::popcount(w));
  out.prob = proportion(hits, fresh.reps);
  return out;
}

BallEstimate estimate_lemma4_ball(const ProcessSpec& spec, const TimeGrid& grid,
                                  IndexPoint anchor, double eps, double L,
                                  std::size_t n, std::uint64_t master_seed,
                                  double alpha, const Exec& exec) {
  const PathSampler sampler(spec, grid);
  const std::uint64_t pilot_seed =
      random_word(SeedSpec{master_seed, 0}, Substream::pilot, 0, 0);
  const PathBatch pilot = sampler.batch(pilot_seed, 0, n, exec);
  const PathBatch fresh = sampler.batch(master_seed, 0, n, exec);
  return estimate_lemma4_ball(pilot, fresh, spec, grid, anchor, eps, L, alpha);
}

Prop2Report proposition2_criteria(const PtFamily& pt, std::size_t t_max,
                                  std::span<const double> r_grid) {
  if (pt.kind == PtFamily::Kind::log_power && !(pt.param > 0)) {
    throw std::invalid_argument("log-power exponent must be > 0");
  }
  if (pt.kind == PtFamily::Kind::geometric && !(pt.param > 0 && pt.param < 1)) {
    throw std::invalid_argument("geometric ratio must lie in (0,1)");
  }
  Prop2Report rep;
  rep.pt = pt;
  rep.t_max = t_max;
  rep.r_grid.assign(r_grid.begin(), r_grid.end());
  const bool log_power = pt.kind == PtFamily::Kind::log_power;
  // p_t (log(t+2)) = (log(t+2))^{1-a} -> 0 iff a > 1; q^t log t -> 0.
  rep.pregaussian = log_power ? pt.param > 1 : true;
  for (double r : r_grid) {
    if (!(r > 0)) throw std::invalid_argument("r must be > 0");
    // (log t)^{-a r} is never summable; (q^t)^r always is.
    rep.summable.push_back(!log_power);
    double sum = 0;
    for (std::size_t t = 1; t <= t_max; ++t) {
      const double p = pt.p(static_cast<double>(t));
      sum += std::pow(p * (1 - p), r);
    }
    rep.partial_sums.push_back(sum);
  }
  rep.clt = std::any_of(rep.summable.begin(), rep.summable.end(),
                        [](bool b) { return b; });
  return rep;
}

}  // namespace tdclt
