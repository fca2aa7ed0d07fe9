#include "tdclt/process.hpp"

#include <algorithm>
#include <boost/math/special_functions/sin_pi.hpp>
#include <cmath>
#include <stdexcept>

#include "tdclt/kernels.hpp"

namespace tdclt {

double PtFamily::p(double t) const {
  if (kind == Kind::log_power) return std::pow(std::log(t + 2), -param);
  return std::pow(param, t);
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::bm_tied: return "bm-tied";
    case Family::fbm_shift: return "fbm-shift";
    case Family::sheet_shift: return "sheet-shift";
    case Family::linear_u: return "linear-u";
    case Family::lip1_osc: return "lip1-osc";
    case Family::discrete_bernoulli: return "discrete-bernoulli";
    case Family::constant: return "constant";
  }
  return "?";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::bm_tied, Family::fbm_shift, Family::sheet_shift,
                   Family::linear_u, Family::lip1_osc,
                   Family::discrete_bernoulli, Family::constant}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown process family '" + std::string(name) + "'");
}

std::string_view to_string(ShiftLaw s) {
  switch (s) {
    case ShiftLaw::standard_normal: return "standard-normal";
    case ShiftLaw::uniform_01: return "uniform-01";
    case ShiftLaw::bernoulli: return "bernoulli";
  }
  return "?";
}

ShiftLaw shift_law_from_string(std::string_view name) {
  for (ShiftLaw s : {ShiftLaw::standard_normal, ShiftLaw::uniform_01,
                     ShiftLaw::bernoulli}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown shift law '" + std::string(name) + "'");
}

std::string to_string(const PtFamily& pt) {
  const char* name = pt.kind == PtFamily::Kind::log_power ? "log-power" : "geometric";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s(%.17g)", name, pt.param);
  return buf;
}

double ProcessSpec::theta() const {
  if (!std::isnan(holder_theta)) return holder_theta;
  return family == Family::fbm_shift ? 0.4 * gamma : 0.5;
}

GridKind required_grid_kind(Family f) {
  switch (f) {
    case Family::sheet_shift: return GridKind::sheet_2d;
    case Family::discrete_bernoulli: return GridKind::discrete_n;
    default: return GridKind::interval_1d;
  }
}

std::vector<std::string> validate_spec(const ProcessSpec& spec) {
  std::vector<std::string> v;
  if (spec.family == Family::fbm_shift && !(spec.gamma > 0 && spec.gamma < 1)) {
    v.push_back("gamma must lie in (0,1)");
  }
  if (spec.shift_law == ShiftLaw::bernoulli && spec.family != Family::constant) {
    v.push_back("shift-law bernoulli is only available for the constant family");
  }
  if (spec.shift_law == ShiftLaw::bernoulli &&
      !(spec.shift_p >= 0 && spec.shift_p <= 1)) {
    v.push_back("shift-p must lie in [0,1]");
  }
  if (spec.family == Family::discrete_bernoulli) {
    if (spec.pt.kind == PtFamily::Kind::log_power && !(spec.pt.param > 0)) {
      v.push_back("log-power exponent a must be > 0");
    }
    if (spec.pt.kind == PtFamily::Kind::geometric &&
        !(spec.pt.param > 0 && spec.pt.param < 1)) {
      v.push_back("geometric ratio q must lie in (0,1)");
    }
    if (!(spec.h_variance > 0)) v.push_back("h-variance must be > 0");
  }
  if (spec.family == Family::lip1_osc &&
      !(spec.oscillator_intervals >= 1 && spec.oscillator_intervals <= 1000)) {
    v.push_back("oscillator-intervals J must lie in [1, 1000]");
  }
  const double th = spec.theta();
  if (!(th > 0 && th <= 1)) v.push_back("holder-theta must lie in (0,1]");
  return v;
}

std::vector<std::string> validate_spec(const ProcessSpec& spec,
                                       const TimeGrid& grid) {
  auto v = validate_spec(spec);
  if (grid.kind() != required_grid_kind(spec.family)) {
    v.push_back(std::string(to_string(spec.family)) + " requires a " +
                std::string(to_string(required_grid_kind(spec.family))) +
                " grid, got " + std::string(to_string(grid.kind())));
  } else if (spec.family == Family::lip1_osc && grid.horizon() > 1) {
    v.push_back("lip1-osc is defined on [0,1]; horizon must be <= 1");
  }
  return v;
}

int oscillator_interval(double t) {
  if (!(t > 0 && t <= 1)) throw std::domain_error("oscillator needs t in (0,1]");
  int e = 0;
  const double f = std::frexp(t, &e);
  // t = f 2^e with f in [1/2, 1): t in [2^(e-1), 2^e).
  return f == 0.5 ? 2 - e : 1 - e;
}

double oscillator_branch(double t, int j, int branch) {
  const double phase = std::ldexp(t, j + branch);
  const double frac = phase - std::floor(phase);
  return boost::math::sin_pi(2 * frac);
}

namespace {

double oscillator_value(const ProcessSpec& spec, SeedSpec seed, double t,
                        double u) {
  if (!(t > 0) || t <= std::ldexp(1.0, -spec.oscillator_intervals)) return 0.0;
  const int j = oscillator_interval(t);
  const int branch =
      static_cast<int>(random_word(seed, Substream::branch, 0,
                                   static_cast<std::uint64_t>(j)) & 1u);
  return t * (oscillator_branch(t, j, branch) + 2) * u;
}

std::vector<double> gaussian_covariance(const ProcessSpec& spec,
                                        const TimeGrid& grid) {
  const std::size_t m = grid.size();
  std::vector<double> cov(m * m);
  const double h2 = 2 * spec.gamma;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k <= i; ++k) {
      const GridPoint a = grid[i], b = grid[k];
      double c = 0;
      if (spec.family == Family::fbm_shift) {
        c = 0.5 * (std::pow(a.s, h2) + std::pow(b.s, h2) -
                   std::pow(std::abs(a.s - b.s), h2));
      } else {
        c = std::min(a.s, b.s) * std::min(a.u, b.u);
      }
      cov[i * m + k] = cov[k * m + i] = c;
    }
  }
  return cov;
}

}  // namespace

PathSampler::PathSampler(ProcessSpec spec, TimeGrid grid)
    : spec_(spec), grid_(std::move(grid)) {
  const auto v = validate_spec(spec_, grid_);
  if (!v.empty()) throw std::invalid_argument(v.front());
  if (spec_.family == Family::fbm_shift || spec_.family == Family::sheet_shift) {
    factor_ = factor_covariance(gaussian_covariance(spec_, grid_), grid_.size());
  } else if (spec_.family == Family::bm_tied) {
    // Independent increments: X_i = sum_{k<=i} sqrt(t_k - t_{k-1}) g_k.
    sqrt_increments_.resize(grid_.size());
    double prev = 0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      sqrt_increments_[i] = std::sqrt(grid_[i].s - prev);
      prev = grid_[i].s;
    }
  }
}

double PathSampler::draw_shift(RandomStream& rng) const {
  switch (spec_.shift_law) {
    case ShiftLaw::standard_normal: return rng.normal();
    case ShiftLaw::uniform_01: return rng.uniform();
    case ShiftLaw::bernoulli: return rng.uniform() < spec_.shift_p ? 1.0 : 0.0;
  }
  return 0.0;
}

void PathSampler::sample(SeedSpec seed, std::span<double> out) const {
  const std::size_t m = grid_.size();
  if (out.size() != m) throw std::invalid_argument("output size != grid size");
  RandomStream rng(seed, Substream::path);
  switch (spec_.family) {
    case Family::bm_tied: {
      double x = 0;
      for (std::size_t i = 0; i < m; ++i) {
        x += sqrt_increments_[i] * rng.normal();
        out[i] = x;
      }
      break;
    }
    case Family::fbm_shift:
    case Family::sheet_shift: {
      std::vector<double> z(m);
      for (auto& v : z) v = rng.normal();
      kernels::matvec(factor_.matrix, m, m, z, out);
      const double shift = draw_shift(rng);
      for (auto& v : out) v += shift;
      break;
    }
    case Family::linear_u: {
      const double u = rng.uniform();
      for (std::size_t i = 0; i < m; ++i) out[i] = grid_[i].s * u;
      break;
    }
    case Family::lip1_osc: {
      const double u = 1.5 + 0.5 * rng.uniform();
      for (std::size_t i = 0; i < m; ++i) {
        out[i] = oscillator_value(spec_, seed, grid_[i].s, u);
      }
      break;
    }
    case Family::discrete_bernoulli: {
      // Keyed by the integer index, so a point's value does not depend on
      // which other points the grid holds.
      for (std::size_t i = 0; i < m; ++i) {
        const double t = grid_[i].s;
        const double u = to_unit(random_word(seed, Substream::path, 0,
                                             static_cast<std::uint64_t>(t)));
        out[i] = u < spec_.pt.p(t) ? 1.0 : 0.0;
      }
      break;
    }
    case Family::constant: {
      const double z = draw_shift(rng);
      std::fill(out.begin(), out.end(), z);
      break;
    }
  }
}

SamplePath PathSampler::path(SeedSpec seed) const {
  SamplePath p{grid_, std::vector<double>(grid_.size())};
  sample(seed, p.values);
  return p;
}

PathBatch PathSampler::batch(std::uint64_t master, std::uint64_t first,
                             std::size_t count, const Exec& exec) const {
  PathBatch b;
  b.points = grid_.size();
  b.reps = count;
  b.data.resize(b.points * count);
  parallel_for(count, exec, [&](std::size_t r) {
    std::vector<double> buf(b.points);
    sample(SeedSpec{master, first + r}, buf);
    for (std::size_t g = 0; g < b.points; ++g) b.data[g * count + r] = buf[g];
  });
  return b;
}

SamplePath generate_path(const ProcessSpec& spec, const TimeGrid& grid,
                         SeedSpec seed) {
  return PathSampler(spec, grid).path(seed);
}

CdfModel analytic_cdf(const ProcessSpec& spec, GridPoint p) {
  const double t = p.s;
  auto shifted = [&](double var) {
    if (spec.shift_law == ShiftLaw::uniform_01) {
      return cdf::normal_plus_uniform(std::sqrt(var));
    }
    return cdf::normal(std::sqrt(var + 1));
  };
  switch (spec.family) {
    case Family::bm_tied: return cdf::normal(std::sqrt(t));
    case Family::fbm_shift: return shifted(std::pow(t, 2 * spec.gamma));
    case Family::sheet_shift: return shifted(p.s * p.u);
    case Family::linear_u: return cdf::uniform(0.0, t);
    case Family::lip1_osc: {
      if (!(t > 0) || t <= std::ldexp(1.0, -spec.oscillator_intervals)) {
        return cdf::point_mass(0.0);
      }
      const int j = oscillator_interval(t);
      const double c0 = oscillator_branch(t, j, 0) + 2;
      const double c1 = oscillator_branch(t, j, 1) + 2;
      if (c0 == c1) return cdf::uniform(1.5 * t * c0, 2 * t * c0);
      return cdf::mixture({cdf::uniform(1.5 * t * c0, 2 * t * c0),
                           cdf::uniform(1.5 * t * c1, 2 * t * c1)},
                          {0.5, 0.5});
    }
    case Family::discrete_bernoulli: return cdf::bernoulli(spec.pt.p(t));
    case Family::constant:
      switch (spec.shift_law) {
        case ShiftLaw::standard_normal: return cdf::normal(1.0);
        case ShiftLaw::uniform_01: return cdf::uniform(0.0, 1.0);
        case ShiftLaw::bernoulli: return cdf::bernoulli(spec.shift_p);
      }
  }
  throw std::logic_error("unhandled family");
}

double analytic_rho(const ProcessSpec& spec, double alpha, GridPoint s,
                    GridPoint t, double horizon) {
  if (spec.family == Family::discrete_bernoulli) {
    if (s == t) return 0.0;
    return std::sqrt(std::pow(std::log(s.s + 2), -spec.h_variance) +
                     std::pow(std::log(t.s + 2), -spec.h_variance));
  }
  const double h = alpha * spec.theta();
  if (!(alpha > 0) || !(h > 0 && h <= 1)) {
    throw std::invalid_argument("alpha out of range: need alpha > 0 and alpha*theta in (0,1]");
  }
  if (spec.family == Family::constant) return 0.0;
  if (spec.family == Family::sheet_shift) {
    return std::sqrt(std::pow(std::abs(s.s - t.s) / horizon, 2 * h) +
                     std::pow(std::abs(s.u - t.u) / horizon, 2 * h));
  }
  return std::pow(std::abs(s.s - t.s), h);
}

PseudoMetricTable rho_table(const ProcessSpec& spec, double alpha,
                            const TimeGrid& grid) {
  PseudoMetricTable d(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      d.set(i, j, analytic_rho(spec, alpha, grid[i], grid[j], grid.horizon()));
    }
  }
  return d;
}

}  // namespace tdclt
