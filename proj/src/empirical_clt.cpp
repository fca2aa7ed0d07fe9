#include "tdclt/empirical_clt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tdclt/kernels.hpp"
#include "tdclt/transform.hpp"

namespace tdclt {

std::vector<IndexPoint> quantile_index(const ProcessSpec& spec,
                                       const TimeGrid& grid, std::size_t levels) {
  if (levels == 0) throw std::invalid_argument("quantile_index: levels must be >= 1");
  std::vector<IndexPoint> out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const CdfModel f = analytic_cdf(spec, grid[g]);
    double last = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= levels; ++i) {
      const double y = f.quantile(static_cast<double>(i) / static_cast<double>(levels + 1));
      if (!std::isfinite(y) || y <= last) continue;
      out.push_back({g, y});
      last = y;
    }
  }
  return out;
}

std::vector<double> centering(const ProcessSpec& spec, const TimeGrid& grid,
                              std::span<const IndexPoint> index) {
  std::vector<double> out(index.size());
  std::size_t cached = grid.size();
  CdfModel f = cdf::point_mass(0.0);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i].t >= grid.size()) throw std::out_of_range("centering: index point outside grid");
    if (index[i].t != cached) {
      f = analytic_cdf(spec, grid[index[i].t]);
      cached = index[i].t;
    }
    out[i] = f(index[i].y);
  }
  return out;
}

EmpiricalField empirical_field(const PathBatch& paths,
                               std::span<const IndexPoint> index,
                               std::span<const double> center) {
  if (center.size() != index.size())
    throw std::invalid_argument("empirical_field: centering size mismatch");
  EmpiricalField field;
  field.index.assign(index.begin(), index.end());
  field.n = paths.reps;
  field.values.resize(index.size());
  const double n = static_cast<double>(paths.reps);
  const double root = std::sqrt(n);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const double c = static_cast<double>(kernels::count_leq(paths.at_point(index[i].t), index[i].y));
    field.values[i] = (c - n * center[i]) / root;
  }
  return field;
}

EmpiricalField build_empirical_field(const PathSampler& sampler,
                                     std::span<const IndexPoint> index,
                                     std::size_t n, std::uint64_t master_seed,
                                     std::uint64_t first, const Exec& exec) {
  if (n == 0) throw std::invalid_argument("build_empirical_field: n must be >= 1");
  const PathBatch paths = sampler.batch(master_seed, first, n, exec);
  const auto center = centering(sampler.spec(), sampler.grid(), index);
  return empirical_field(paths, index, center);
}

namespace {

// Index entries grouped by grid point, thresholds sorted, so one binary
// search per (path, grid point) bins a value against every threshold.
struct GroupedIndex {
  std::vector<std::size_t> points;          // grid points in use
  std::vector<std::vector<double>> ys;      // sorted distinct thresholds
  std::vector<std::vector<double>> center;  // F at each threshold
};

GroupedIndex group_index(const ProcessSpec& spec, const TimeGrid& grid,
                         std::span<const IndexPoint> index) {
  std::vector<IndexPoint> sorted(index.begin(), index.end());
  std::sort(sorted.begin(), sorted.end(), [](const IndexPoint& a, const IndexPoint& b) {
    return a.t != b.t ? a.t < b.t : a.y < b.y;
  });
  GroupedIndex g;
  for (const auto& p : sorted) {
    if (p.t >= grid.size()) throw std::out_of_range("index point outside grid");
    if (g.points.empty() || g.points.back() != p.t) {
      g.points.push_back(p.t);
      g.ys.emplace_back();
    }
    if (g.ys.back().empty() || g.ys.back().back() != p.y) g.ys.back().push_back(p.y);
  }
  for (std::size_t k = 0; k < g.points.size(); ++k) {
    const CdfModel f = analytic_cdf(spec, grid[g.points[k]]);
    std::vector<double> c(g.ys[k].size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = f(g.ys[k][j]);
    g.center.push_back(std::move(c));
  }
  return g;
}

// sup |nu_n| for every n in the ascending ladder, from one stream of paths
// (replicates first, first+1, ...).
std::vector<double> ladder_sups(const PathSampler& sampler, const GroupedIndex& gi,
                                std::span<const std::size_t> ladder,
                                std::uint64_t master_seed, std::uint64_t first) {
  const std::size_t m = sampler.grid().size();
  std::vector<double> path(m);
  std::vector<std::vector<std::uint32_t>> hist(gi.points.size());
  for (std::size_t k = 0; k < gi.points.size(); ++k) hist[k].assign(gi.ys[k].size() + 1, 0);
  std::vector<double> sups;
  sups.reserve(ladder.size());
  std::size_t drawn = 0;
  for (std::size_t n : ladder) {
    for (; drawn < n; ++drawn) {
      sampler.sample({master_seed, first + drawn}, path);
      for (std::size_t k = 0; k < gi.points.size(); ++k) {
        const auto& ys = gi.ys[k];
        const double x = path[gi.points[k]];
        const auto bin = std::lower_bound(ys.begin(), ys.end(), x) - ys.begin();
        ++hist[k][static_cast<std::size_t>(bin)];
      }
    }
    const double dn = static_cast<double>(n);
    const double root = std::sqrt(dn);
    double sup = 0.0;
    for (std::size_t k = 0; k < gi.points.size(); ++k) {
      std::size_t count = 0;
      for (std::size_t j = 0; j < gi.ys[k].size(); ++j) {
        count += hist[k][j];
        sup = std::max(sup, std::fabs(static_cast<double>(count) - dn * gi.center[k][j]) / root);
      }
    }
    sups.push_back(sup);
  }
  return sups;
}

std::vector<SupStatDistribution> sample_sup_ladder(const PathSampler& sampler,
                                                   std::span<const IndexPoint> index,
                                                   std::span<const std::size_t> ladder,
                                                   std::size_t reps,
                                                   std::uint64_t master_seed,
                                                   const Exec& exec) {
  if (ladder.empty()) throw std::invalid_argument("empty n-ladder");
  std::vector<std::size_t> sorted(ladder.begin(), ladder.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == 0) throw std::invalid_argument("n-ladder entries must be >= 1");
  const std::size_t stride = sorted.back();
  const GroupedIndex gi = group_index(sampler.spec(), sampler.grid(), index);
  std::vector<std::vector<double>> per_rep(reps);
  parallel_for(reps, exec, [&](std::size_t r) {
    per_rep[r] = ladder_sups(sampler, gi, sorted, master_seed, r * stride);
  });
  std::vector<SupStatDistribution> out;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), ladder[i]) - sorted.begin());
    SupStatDistribution d;
    d.source = SupSource::empirical;
    d.n = ladder[i];
    d.values.resize(reps);
    for (std::size_t r = 0; r < reps; ++r) d.values[r] = per_rep[r][pos];
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

SupStatDistribution sample_sup_empirical(const PathSampler& sampler,
                                         std::span<const IndexPoint> index,
                                         std::size_t n, std::size_t reps,
                                         std::uint64_t master_seed,
                                         std::size_t stride, const Exec& exec) {
  if (stride < n) throw std::invalid_argument("sample_sup_empirical: stride < n");
  if (n == 0) throw std::invalid_argument("sample_sup_empirical: n must be >= 1");
  const GroupedIndex gi = group_index(sampler.spec(), sampler.grid(), index);
  const std::size_t ladder[] = {n};
  SupStatDistribution d;
  d.n = n;
  d.values.resize(reps);
  parallel_for(reps, exec, [&](std::size_t r) {
    d.values[r] = ladder_sups(sampler, gi, ladder, master_seed, r * stride)[0];
  });
  return d;
}

LimitFieldModel estimate_limit_field(const PathSampler& sampler,
                                     std::span<const IndexPoint> index,
                                     std::size_t m_paths,
                                     std::uint64_t master_seed, const Exec& exec) {
  if (m_paths < 10000) throw std::invalid_argument("estimate_limit_field: m-paths must be >= 10000");
  const std::size_t k = index.size();
  if (k == 0) throw std::invalid_argument("estimate_limit_field: empty index");
  if (k > kMaxLimitIndex)
    throw std::invalid_argument("estimate_limit_field: index larger than " +
                                std::to_string(kMaxLimitIndex));
  const std::uint64_t seed = random_word({master_seed, 0}, Substream::limit, 0, 1);
  const PathBatch paths = sampler.batch(seed, 0, m_paths, exec);

  const std::size_t words = kernels::words_for(m_paths);
  std::vector<std::uint64_t> bits(k * words);
  std::vector<double> freq(k);
  parallel_for(k, exec, [&](std::size_t i) {
    std::span<std::uint64_t> row(bits.data() + i * words, words);
    kernels::pack_leq(paths.at_point(index[i].t), index[i].y, row);
  });
  const double m = static_cast<double>(m_paths);
  for (std::size_t i = 0; i < k; ++i) {
    std::span<const std::uint64_t> row(bits.data() + i * words, words);
    freq[i] = static_cast<double>(kernels::popcount_and(row, row)) / m;
  }

  LimitFieldModel model;
  model.index.assign(index.begin(), index.end());
  model.paths = m_paths;
  model.covariance.assign(k * k, 0.0);
  model.stderr_matrix.assign(k * k, 0.0);
  parallel_for(k, exec, [&](std::size_t i) {
    std::span<const std::uint64_t> a(bits.data() + i * words, words);
    for (std::size_t j = i; j < k; ++j) {
      std::span<const std::uint64_t> b(bits.data() + j * words, words);
      const double pij = static_cast<double>(kernels::popcount_and(a, b)) / m;
      model.covariance[i * k + j] = pij - freq[i] * freq[j];
      model.stderr_matrix[i * k + j] = std::sqrt(pij * (1.0 - pij) / m);
    }
  });
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      model.covariance[i * k + j] = model.covariance[j * k + i];
      model.stderr_matrix[i * k + j] = model.stderr_matrix[j * k + i];
    }
  model.factor = factor_covariance(model.covariance, k);
  return model;
}

SupStatDistribution sample_sup_limit(const LimitFieldModel& model, std::size_t reps,
                                     std::uint64_t master_seed, const Exec& exec) {
  const std::size_t k = model.factor.dim;
  SupStatDistribution d;
  d.source = SupSource::gaussian_limit;
  d.values.resize(reps);
  parallel_for(reps, exec, [&](std::size_t r) {
    RandomStream rng({master_seed, r}, Substream::limit, 0);
    std::vector<double> z(k), out(k);
    for (auto& v : z) v = rng.normal();
    kernels::matvec(model.factor.matrix, k, k, z, out);
    d.values[r] = k ? kernels::max_abs(out) : 0.0;
  });
  return d;
}

double linear_u_phi(double t, double y) {
  if (t <= 0.0) return 0.0;
  const double r = y / t;
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  return r;
}

SupStatDistribution sample_sup_bridge(std::span<const double> r_values,
                                      std::size_t reps, std::uint64_t master_seed,
                                      BridgeMethod method, const Exec& exec) {
  std::vector<double> r;
  for (double v : r_values) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("bridge times must lie in [0,1]");
    // The bridge vanishes at both ends.
    if (v > 0.0 && v < 1.0) r.push_back(v);
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());

  SupStatDistribution d;
  d.source = SupSource::gaussian_limit;
  d.values.resize(reps);
  parallel_for(reps, exec, [&](std::size_t rep) {
    double sup = 0.0;
    if (method == BridgeMethod::increments) {
      RandomStream rng({master_seed, rep}, Substream::limit, 2);
      std::vector<double> b(r.size());
      double prev = 0.0, w = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        w += std::sqrt(r[i] - prev) * rng.normal();
        b[i] = w;
        prev = r[i];
      }
      const double b1 = w + std::sqrt(1.0 - prev) * rng.normal();
      for (std::size_t i = 0; i < r.size(); ++i) sup = std::max(sup, std::fabs(b[i] - r[i] * b1));
    } else {
      RandomStream rng({master_seed, rep}, Substream::limit, 3);
      double prev = 0.0, x = 0.0;
      for (double ri : r) {
        const double rest = 1.0 - prev;
        const double mean = x * (1.0 - ri) / rest;
        const double var = (ri - prev) * (1.0 - ri) / rest;
        x = mean + std::sqrt(var) * rng.normal();
        prev = ri;
        sup = std::max(sup, std::fabs(x));
      }
    }
    d.values[rep] = sup;
  });
  return d;
}

double ks_null_sd(std::size_t a, std::size_t b) {
  return 0.2603 * std::sqrt(1.0 / static_cast<double>(a) + 1.0 / static_cast<double>(b));
}

CltReport clt_diagnostic(const PathSampler& sampler, std::span<const IndexPoint> index,
                         std::span<const std::size_t> n_ladder, std::size_t reps,
                         std::uint64_t master_seed, const CltOptions& options,
                         const Exec& exec) {
  if (reps < 500) throw std::invalid_argument("clt_diagnostic: reps must be >= 500");
  if (index.empty()) throw std::invalid_argument("clt_diagnostic: empty index");
  LimitKind kind = options.limit;
  if (kind == LimitKind::automatic)
    kind = sampler.spec().family == Family::linear_u ? LimitKind::phi_bridge
                                                     : LimitKind::estimated;

  CltReport report;
  const std::uint64_t limit_seed = random_word({master_seed, 0}, Substream::limit, 0, 0);
  if (kind == LimitKind::phi_bridge) {
    if (sampler.spec().family != Family::linear_u)
      throw std::invalid_argument("phi-bridge limit is only defined for linear-u");
    std::vector<double> rv;
    for (const auto& p : index) rv.push_back(linear_u_phi(sampler.grid()[p.t].s, p.y));
    report.limit = sample_sup_bridge(rv, reps, limit_seed, BridgeMethod::increments, exec);
  } else {
    const auto model = estimate_limit_field(sampler, index, options.limit_paths, master_seed, exec);
    report.limit = sample_sup_limit(model, reps, limit_seed, exec);
  }

  report.empirical = sample_sup_ladder(sampler, index, n_ladder, reps, master_seed, exec);
  const double sd = ks_null_sd(reps, reps);
  for (const auto& e : report.empirical) {
    CltRow row;
    row.n = e.n;
    row.ks = ks_two_sample(e.values, report.limit.values);
    row.se = sd;
    row.verdict = row.ks < options.ks_threshold ? "below-threshold" : "above-threshold";
    report.rows.push_back(row);
  }
  bool ok = report.rows.back().ks < options.ks_threshold &&
            report.rows.back().ks <= report.rows.front().ks;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].ks > report.rows[i - 1].ks + 2.0 * sd) ok = false;
  report.trend = ok ? "consistent" : "inconsistent";
  return report;
}

RefinementReport clt_refinement_diagnostic(const ProcessSpec& spec,
                                           std::span<const int> depths,
                                           std::size_t levels, std::size_t n,
                                           std::size_t reps,
                                           std::uint64_t master_seed,
                                           const CltOptions& options,
                                           const Exec& exec) {
  if (depths.empty()) throw std::invalid_argument("clt_refinement_diagnostic: no depths");
  if (reps < 500) throw std::invalid_argument("clt_refinement_diagnostic: reps must be >= 500");
  RefinementReport report;
  const double sd = ks_null_sd(reps, reps);
  const std::uint64_t limit_seed = random_word({master_seed, 0}, Substream::limit, 0, 0);
  for (int depth : depths) {
    const PathSampler sampler(spec, TimeGrid::dyadic(depth));
    const auto index = quantile_index(spec, sampler.grid(), levels);
    const auto model = estimate_limit_field(sampler, index, options.limit_paths, master_seed, exec);
    const auto limit = sample_sup_limit(model, reps, limit_seed, exec);
    const auto emp = sample_sup_empirical(sampler, index, n, reps, master_seed, n, exec);
    report.rows.push_back({depth, index.size(), ks_two_sample(emp.values, limit.values), sd});
  }
  const auto& first = report.rows.front();
  const auto& last = report.rows.back();
  const bool falls = last.ks < first.ks - 2.0 * sd && last.ks < options.ks_threshold;
  report.trend = falls ? "consistent" : "inconsistent";
  return report;
}

}  // namespace tdclt
