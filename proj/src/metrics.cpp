#include "tdclt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tdclt/kernels.hpp"

namespace tdclt {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

Estimate proportion(std::size_t hits, std::size_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1 - p) / static_cast<double>(n))};
}

std::vector<std::uint64_t> pack(const PathBatch& paths, IndexPoint a) {
  std::vector<std::uint64_t> bits(kernels::words_for(paths.reps));
  kernels::pack_leq(paths.at_point(a.t), a.y, bits);
  return bits;
}

Estimate tau_from_sq(Estimate sq, std::size_t n) {
  const double nn = static_cast<double>(n);
  // With no observed disagreement the binomial SE is 0; use the 1/n
  // resolution instead so the upper confidence limit stays honest.
  const double se2 = std::max(sq.se, 1.0 / nn);
  const double tau = std::sqrt(sq.value);
  return {tau, se2 / std::max(2 * tau, std::sqrt(se2))};
}

double rho_of(const ProcessSpec& spec, const TimeGrid& grid, double alpha,
              std::size_t s, std::size_t t) {
  return analytic_rho(spec, alpha, grid[s], grid[t], grid.horizon());
}

}  // namespace

Estimate estimate_tau_sq(const PathBatch& paths, IndexPoint a, IndexPoint b) {
  if (paths.reps == 0) throw std::invalid_argument("empty path batch");
  const auto pa = pack(paths, a);
  const auto pb = pack(paths, b);
  return proportion(kernels::popcount_xor(pa, pb), paths.reps);
}

Estimate estimate_tau(const PathBatch& paths, IndexPoint a, IndexPoint b) {
  return tau_from_sq(estimate_tau_sq(paths, a, b), paths.reps);
}

Estimate estimate_tau(const PathSampler& sampler, IndexPoint a, IndexPoint b,
                      std::size_t n, std::uint64_t master_seed,
                      const Exec& exec) {
  if (n < 1000) throw std::invalid_argument("estimate_tau needs n >= 1000");
  const PathBatch paths = sampler.batch(master_seed, 0, n, exec);
  return estimate_tau(paths, a, b);
}

double lambda_metric(double tau, double rho) {
  if (!(tau >= 0) || !(rho >= 0)) {
    throw std::invalid_argument("lambda needs nonnegative arguments");
  }
  return std::max(tau, rho);
}

std::vector<double> quantile_x_grid(const CdfModel& a, const CdfModel& b,
                                    std::size_t per) {
  std::vector<double> xs;
  xs.reserve(2 * per);
  for (const CdfModel* f : {&a, &b}) {
    for (std::size_t k = 0; k < per; ++k) {
      const double q = f->quantile((static_cast<double>(k) + 0.5) /
                                   static_cast<double>(per));
      if (std::isfinite(q)) xs.push_back(q);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

Lemma1Report check_lemma1(const PathBatch& paths, const ProcessSpec& spec,
                          const TimeGrid& grid, std::size_t s, std::size_t t,
                          std::span<const double> x_grid, double L,
                          double alpha) {
  if (!std::is_sorted(x_grid.begin(), x_grid.end())) {
    throw std::invalid_argument("x-grid must be sorted");
  }
  Lemma1Report rep;
  rep.s = s;
  rep.t = t;
  rep.L = L;
  rep.rho = rho_of(spec, grid, alpha, s, t);
  rep.bound_single = (L + 1) * rep.rho * rep.rho;
  rep.bound_double = 2 * rep.bound_single;
  const std::size_t k = x_grid.size();
  if (k == 0) return rep;

  // {X_s <= x < X_t} holds exactly for x in [X_s, X_t): a run of the grid.
  // Difference arrays turn the per-path runs into counts per x.
  std::vector<long> d_st(k + 1, 0), d_ts(k + 1, 0);
  const auto xs = paths.at_point(s);
  const auto xt = paths.at_point(t);
  auto first_geq = [&](double v) {
    return static_cast<std::size_t>(
        std::lower_bound(x_grid.begin(), x_grid.end(), v) - x_grid.begin());
  };
  for (std::size_t r = 0; r < paths.reps; ++r) {
    const double a = xs[r], b = xt[r];
    if (a < b) {
      ++d_st[first_geq(a)];
      --d_st[first_geq(b)];
    } else if (b < a) {
      ++d_ts[first_geq(b)];
      --d_ts[first_geq(a)];
    }
  }
  const double n = static_cast<double>(paths.reps);
  rep.excess = -inf;
  long c_st = 0, c_ts = 0;
  const CdfModel fs = analytic_cdf(spec, grid[s]);
  const CdfModel ft = analytic_cdf(spec, grid[t]);
  for (std::size_t i = 0; i < k; ++i) {
    c_st += d_st[i];
    c_ts += d_ts[i];
    const Estimate st = proportion(static_cast<std::size_t>(c_st), paths.reps);
    const Estimate ts = proportion(static_cast<std::size_t>(c_ts), paths.reps);
    // The two events are disjoint: their sum is the L1 distance and their
    // difference is F_t(x) - F_s(x).
    const double sum = st.value + ts.value;
    const double diff = ts.value - st.value;
    const Estimate l1{sum, std::sqrt(std::max(sum * (1 - sum), 0.0) / n)};
    const Estimate dd{std::abs(diff),
                      std::sqrt(std::max(sum - diff * diff, 0.0) / n)};
    if (st.value >= rep.p_st.value) { rep.p_st = st; rep.x_st = x_grid[i]; }
    if (ts.value >= rep.p_ts.value) { rep.p_ts = ts; rep.x_ts = x_grid[i]; }
    if (l1.value >= rep.l1.value) { rep.l1 = l1; rep.x_l1 = x_grid[i]; }
    if (dd.value >= rep.sup_diff.value) { rep.sup_diff = dd; rep.x_diff = x_grid[i]; }
    rep.analytic_sup_diff =
        std::max(rep.analytic_sup_diff, std::abs(ft(x_grid[i]) - fs(x_grid[i])));
    rep.excess = std::max({rep.excess,
                           st.value - kFlagSe * st.se - rep.bound_single,
                           ts.value - kFlagSe * ts.se - rep.bound_single,
                           l1.value - kFlagSe * l1.se - rep.bound_double,
                           dd.value - kFlagSe * dd.se - rep.bound_double});
  }
  rep.violated = rep.excess > 0;
  return rep;
}

TauPairReport check_tau_pair(const PathBatch& paths, const ProcessSpec& spec,
                             const TimeGrid& grid, IndexPoint a, IndexPoint b,
                             double L, double alpha) {
  TauPairReport rep;
  rep.a = a;
  rep.b = b;
  rep.tau_sq = estimate_tau_sq(paths, a, b);
  rep.rho = rho_of(spec, grid, alpha, a.t, b.t);
  const CdfModel fs = analytic_cdf(spec, grid[a.t]);
  const CdfModel ft = analytic_cdf(spec, grid[b.t]);
  const double x = a.y, y = b.y;
  const double spread_s = std::abs(fs(y) - fs(x));
  const double spread_t = std::abs(ft(y) - ft(x));
  const double r2 = rep.rho * rep.rho;
  rep.lemma2_bound = std::min(spread_s, spread_t) + (2 * L + 2) * r2;
  rep.lemma2_excess =
      rep.tau_sq.value - kFlagSe * rep.tau_sq.se - rep.lemma2_bound;

  const Estimate tau = tau_from_sq(rep.tau_sq, paths.reps);
  const double c = std::sqrt(2 * L + 2) + 1;
  const double eps = std::max(tau.value + kFlagSe * tau.se, rep.rho);
  rep.lemma3_lhs = spread_t;
  rep.lemma3_bound = c * c * eps * eps;
  rep.lemma3_excess = rep.lemma3_lhs - rep.lemma3_bound;
  rep.violated = rep.lemma2_excess > 0 || rep.lemma3_excess > 0;
  return rep;
}

TauDiameter tau_diameter(const PathBatch& paths,
                         std::span<const IndexPoint> points) {
  TauDiameter best;
  if (points.empty()) return best;
  best.a = best.b = points.front();
  std::vector<std::vector<std::uint64_t>> bits;
  bits.reserve(points.size());
  for (const auto& p : points) bits.push_back(pack(paths, p));
  std::size_t top = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const std::size_t c = kernels::popcount_xor(bits[i], bits[j]);
      if (c > top) {
        top = c;
        best.a = points[i];
        best.b = points[j];
      }
    }
  }
  best.value = tau_from_sq(proportion(top, paths.reps), paths.reps);
  return best;
}

DiameterReport check_corollary1_diameter(
    const PathBatch& paths, const ProcessSpec& spec, const TimeGrid& grid,
    std::span<const std::size_t> cell, std::size_t anchor, double d_lo,
    double d_hi, double L, double alpha, std::size_t d_points) {
  if (cell.empty()) throw std::invalid_argument("empty cell");
  if (std::find(cell.begin(), cell.end(), anchor) == cell.end()) {
    throw std::invalid_argument("anchor must belong to the cell");
  }
  if (!(d_lo <= d_hi)) throw std::invalid_argument("D must be an interval");
  std::vector<double> ds;
  if (d_lo == d_hi || d_points < 2) {
    ds = {d_lo};
    if (d_hi != d_lo) ds.push_back(d_hi);
  } else {
    for (std::size_t i = 0; i < d_points; ++i) {
      ds.push_back(d_lo + (d_hi - d_lo) * static_cast<double>(i) /
                              static_cast<double>(d_points - 1));
    }
    ds.back() = d_hi;
  }
  std::vector<IndexPoint> pts;
  for (std::size_t s : cell) {
    for (double y : ds) pts.push_back({s, y});
  }
  DiameterReport rep;
  rep.tau = tau_diameter(paths, pts);
  for (std::size_t i = 0; i < cell.size(); ++i) {
    for (std::size_t j = i + 1; j < cell.size(); ++j) {
      rep.rho_diameter =
          std::max(rep.rho_diameter, rho_of(spec, grid, alpha, cell[i], cell[j]));
    }
  }
  const CdfModel f = analytic_cdf(spec, grid[anchor]);
  rep.f_spread = f(d_hi) - f(d_lo);
  rep.bound = 2 * (std::sqrt(2 * L + 2) * rep.rho_diameter + std::sqrt(rep.f_spread));
  rep.excess = rep.tau.value.value - kFlagSe * rep.tau.value.se - rep.bound;
  rep.violated = rep.excess > 0;
  return rep;
}

double holder_phi(const TimeGrid& grid, GridPoint s, GridPoint t, double theta) {
  if (grid.kind() == GridKind::sheet_2d) {
    const double a = (s.s - t.s) / grid.horizon();
    const double b = (s.u - t.u) / grid.horizon();
    return std::pow(a * a + b * b, theta / 2);
  }
  return std::pow(std::abs(s.s - t.s), theta);
}

namespace {

// sup over x of the density of the marginal at p.
double marginal_density_sup(const ProcessSpec& spec, GridPoint p) {
  const double var = spec.family == Family::fbm_shift
                         ? std::pow(p.s, 2 * spec.gamma)
                         : p.s * p.u;
  if (spec.shift_law == ShiftLaw::uniform_01) {
    // Density of sigma G + U is Phi(y/sigma) - Phi((y-1)/sigma), largest at 1/2.
    const double sigma = std::sqrt(var);
    if (sigma == 0) return 1.0;
    return 2 * cdf::std_normal_cdf(0.5 / sigma) - 1;
  }
  return 1 / std::sqrt(2 * std::numbers::pi * (var + 1));
}

}  // namespace

Theorem5Report check_theorem5_conditions(const ProcessSpec& spec,
                                         const TimeGrid& grid, double beta,
                                         double k, double eta, double alpha,
                                         double theta, std::size_t n,
                                         std::uint64_t master_seed,
                                         std::span<const double> x_grid,
                                         const Exec& exec) {
  if (spec.family != Family::fbm_shift && spec.family != Family::sheet_shift) {
    throw std::invalid_argument(
        "Hoelder conditions are only available for fbm-shift and sheet-shift");
  }
  if (!(beta > 0) || !(theta > 0) || !(eta > 0) || n == 0) {
    throw std::invalid_argument("beta, theta, eta and n must be positive");
  }
  Theorem5Report rep;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rep.density_sup = std::max(rep.density_sup, marginal_density_sup(spec, grid[i]));
  }
  // min(1, d h) <= d^beta h^beta for beta <= 1.
  rep.k_required = beta <= 1 ? std::pow(rep.density_sup, beta) : inf;
  rep.cond1 = rep.k_required <= k;

  const std::size_t m = grid.size();
  std::vector<double> inv_phi(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double phi = holder_phi(grid, grid[i], grid[j], theta);
      inv_phi[i * m + j] = phi > 0 ? 1 / phi : 0.0;
      const double rho = analytic_rho(spec, alpha, grid[i], grid[j], grid.horizon());
      const double d = std::pow(phi, alpha) - rho;
      rep.cond3_worst = (i == 0 && j == 1) ? d : std::max(rep.cond3_worst, d);
    }
  }
  rep.cond3 = rep.cond3_worst <= 1e-12;

  const PathSampler sampler(spec, grid);
  rep.gamma_samples.assign(n, 0.0);
  parallel_for(n, exec, [&](std::size_t r) {
    std::vector<double> x(m);
    sampler.sample(SeedSpec{master_seed, r}, x);
    double g = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        g = std::max(g, std::abs(x[j] - x[i]) * inv_phi[i * m + j]);
      }
    }
    rep.gamma_samples[r] = g;
  });
  std::vector<double> sorted = rep.gamma_samples;
  std::sort(sorted.begin(), sorted.end());
  for (double x : x_grid) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    TailPoint tp;
    tp.x = x;
    tp.exceed = proportion(n - static_cast<std::size_t>(below), n);
    tp.bound = std::pow(x, -eta);
    rep.tail.push_back(tp);
  }
  rep.x0 = inf;
  for (std::size_t i = rep.tail.size(); i-- > 0;) {
    const auto& tp = rep.tail[i];
    if (tp.exceed.value - kFlagSe * tp.exceed.se > tp.bound) break;
    rep.x0 = tp.x;
  }
  return rep;
}

}  // namespace tdclt
