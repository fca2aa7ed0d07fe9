#include "tdclt/shattering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tdclt {

SubsetRegistry::SubsetRegistry(std::size_t n) : n_(n) {
  if (n == 0 || n > kMaxShatterN)
    throw std::invalid_argument("shatter registry needs 1 <= n <= " + std::to_string(kMaxShatterN));
  bits_.assign(((std::size_t{1} << n) + 63) / 64, 0);
}

bool SubsetRegistry::contains(std::uint32_t mask) const {
  if (mask >> n_) return false;
  return (bits_[mask >> 6] >> (mask & 63)) & 1u;
}

void SubsetRegistry::insert(std::uint32_t mask) {
  if (mask >> n_) throw std::out_of_range("mask wider than registry");
  auto& w = bits_[mask >> 6];
  const std::uint64_t bit = std::uint64_t{1} << (mask & 63);
  if (!(w & bit)) {
    w |= bit;
    ++count_;
  }
}

std::vector<std::uint32_t> SubsetRegistry::masks() const {
  std::vector<std::uint32_t> out;
  out.reserve(count_);
  for (std::size_t w = 0; w < bits_.size(); ++w) {
    std::uint64_t v = bits_[w];
    while (v) {
      const int b = std::countr_zero(v);
      out.push_back(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(b)));
      v &= v - 1;
    }
  }
  return out;
}

PathSet make_path_set(std::span<const SamplePath> paths) {
  PathSet set;
  set.n = paths.size();
  if (paths.empty()) return set;
  set.points = paths[0].values.size();
  for (const auto& p : paths) {
    if (p.values.size() != set.points || !(p.grid.points() == paths[0].grid.points()))
      throw std::invalid_argument("paths must share a common grid");
    set.values.insert(set.values.end(), p.values.begin(), p.values.end());
  }
  return set;
}

std::vector<std::uint32_t> prefix_masks(const PathSet& paths, std::size_t g) {
  std::vector<std::size_t> order(paths.n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return paths(a, g) < paths(b, g);
  });
  std::vector<std::uint32_t> out;
  std::uint32_t mask = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    mask |= std::uint32_t{1} << order[k];
    // Only emit at the end of a run of equal values.
    if (k + 1 == order.size() || paths(order[k + 1], g) != paths(order[k], g)) out.push_back(mask);
  }
  return out;
}

SubsetRegistry shatter_count(const PathSet& paths, const Exec& exec) {
  SubsetRegistry reg(paths.n);
  std::vector<std::vector<std::uint32_t>> per_point(paths.points);
  parallel_for(paths.points, exec, [&](std::size_t g) { per_point[g] = prefix_masks(paths, g); });
  reg.insert(0);
  reg.insert(static_cast<std::uint32_t>((std::uint64_t{1} << paths.n) - 1));
  for (const auto& masks : per_point)
    for (auto m : masks) reg.insert(m);
  return reg;
}

SubsetRegistry shatter_count(std::span<const SamplePath> paths, const Exec& exec) {
  return shatter_count(make_path_set(paths), exec);
}

namespace {

double quantile_sorted(const std::vector<double>& v, double q) {
  // Type-7 interpolation.
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

GrowthReport delta_growth_diagnostic(const ProcessSpec& spec, const TimeGrid& grid,
                                     std::span<const std::size_t> n_ladder,
                                     std::size_t trials, std::uint64_t master_seed,
                                     const Exec& exec) {
  if (n_ladder.empty()) throw std::invalid_argument("delta_growth_diagnostic: empty n-ladder");
  if (trials == 0) throw std::invalid_argument("delta_growth_diagnostic: trials must be >= 1");
  const std::size_t max_n = *std::max_element(n_ladder.begin(), n_ladder.end());
  for (auto n : n_ladder)
    if (n == 0 || n > kMaxShatterN)
      throw std::invalid_argument("delta_growth_diagnostic: n must lie in [1, 24]");
  const PathSampler sampler(spec, grid);
  const std::size_t m = grid.size();

  std::vector<std::vector<std::size_t>> counts(trials);
  parallel_for(trials, exec, [&](std::size_t k) {
    PathSet all;
    all.n = max_n;
    all.points = m;
    all.values.resize(max_n * m);
    for (std::size_t j = 0; j < max_n; ++j)
      sampler.sample({master_seed, k * max_n + j},
                     std::span<double>(all.values.data() + j * m, m));
    for (auto n : n_ladder) {
      PathSet sub = all;
      sub.n = n;
      sub.values.resize(n * m);
      counts[k].push_back(shatter_count(sub).size());
    }
  });

  GrowthReport report;
  for (std::size_t i = 0; i < n_ladder.size(); ++i) {
    GrowthRow row;
    row.n = n_ladder[i];
    std::vector<double> ratios;
    for (std::size_t k = 0; k < trials; ++k) {
      const std::size_t c = counts[k][i];
      row.counts.push_back(c);
      if (c > row.n + 1) ++row.above_linear;
      ratios.push_back(std::log(static_cast<double>(c)) / std::sqrt(static_cast<double>(row.n)));
    }
    for (double r : ratios) row.mean_ratio += r;
    row.mean_ratio /= static_cast<double>(trials);
    std::sort(ratios.begin(), ratios.end());
    row.q10 = quantile_sorted(ratios, 0.1);
    row.q50 = quantile_sorted(ratios, 0.5);
    row.q90 = quantile_sorted(ratios, 0.9);
    report.rows.push_back(std::move(row));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (!(report.rows[i].mean_ratio < report.rows[i - 1].mean_ratio)) decreasing = false;
  report.trend = decreasing ? "decreasing" : "not-decreasing";
  return report;
}

double lemma8_time(int j) { return 1.25 * std::ldexp(1.0, -j); }

Lemma8Result lemma8_construct(std::size_t n, int J, std::uint64_t master_seed,
                              std::uint64_t first) {
  if (n == 0 || n > kMaxShatterN) throw std::invalid_argument("lemma8_construct: n must lie in [1, 24]");
  if (J < 1) throw std::invalid_argument("lemma8_construct: J must be >= 1");
  std::vector<double> times;
  for (int j = J; j >= 1; --j) times.push_back(lemma8_time(j));
  ProcessSpec spec;
  spec.family = Family::lip1_osc;
  spec.oscillator_intervals = J;
  Lemma8Result res{PathSet{}, TimeGrid::interval(times, 1.0), {}};
  const PathSampler sampler(spec, res.grid);
  const std::size_t m = res.grid.size();
  res.paths.n = n;
  res.paths.points = m;
  res.paths.values.resize(n * m);
  for (std::size_t i = 0; i < n; ++i)
    sampler.sample({master_seed, first + i}, std::span<double>(res.paths.values.data() + i * m, m));

  std::vector<bool> seen(std::size_t{1} << n, false);
  res.witnesses.push_back({0, times.back(), -1.0, 0});
  seen[0] = true;
  // Walk j = 1, 2, ... so each mask keeps its coarsest witness.
  for (std::size_t g = m; g-- > 0;) {
    const double t = times[g];
    const double y = 17.0 * t / 4.0;
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (res.paths(i, g) <= y) mask |= std::uint32_t{1} << i;
    if (!seen[mask]) {
      seen[mask] = true;
      res.witnesses.push_back({mask, t, y, J - static_cast<int>(g)});
    }
  }
  std::sort(res.witnesses.begin(), res.witnesses.end(),
            [](const Witness& a, const Witness& b) { return a.mask < b.mask; });
  return res;
}

bool validate_witnesses(const Lemma8Result& result) {
  for (const auto& w : result.witnesses) {
    std::size_t g = result.grid.size();
    for (std::size_t k = 0; k < result.grid.size(); ++k)
      if (result.grid[k].s == w.t) g = k;
    if (g == result.grid.size()) return false;
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < result.paths.n; ++i)
      if (result.paths(i, g) <= w.y) mask |= std::uint32_t{1} << i;
    if (mask != w.mask) return false;
  }
  return true;
}

}  // namespace tdclt
