#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdclt/cdf.hpp"
#include "tdclt/grid.hpp"
#include "tdclt/linalg.hpp"
#include "tdclt/metric_table.hpp"
#include "tdclt/parallel.hpp"
#include "tdclt/rng.hpp"

namespace tdclt {

enum class Family {
  bm_tied,
  fbm_shift,
  sheet_shift,
  linear_u,
  lip1_osc,
  discrete_bernoulli,
  //! X_t = Z for every t.
  constant,
};

enum class ShiftLaw { standard_normal, uniform_01, bernoulli };

struct PtFamily {
  enum class Kind { log_power, geometric };
  Kind kind = Kind::log_power;
  //! Exponent a of (log(t+2))^{-a}, or ratio q of q^t.
  double param = 2.0;

  double p(double t) const;
};

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);
std::string_view to_string(ShiftLaw s);
ShiftLaw shift_law_from_string(std::string_view name);
std::string to_string(const PtFamily& pt);

struct ProcessSpec {
  Family family = Family::fbm_shift;
  double gamma = 0.5;
  ShiftLaw shift_law = ShiftLaw::standard_normal;
  //! Success probability when shift_law is bernoulli.
  double shift_p = 0.5;
  PtFamily pt;
  int oscillator_intervals = 400;
  //! Hoelder exponent of the rho metric; NaN selects the family default.
  double holder_theta = std::numeric_limits<double>::quiet_NaN();
  //! Exponent h of the discrete variance (log(t+2))^{-h}.
  double h_variance = 1.5;

  double theta() const;
};

//! Violations of the ProcessSpec invariants; empty when valid.
std::vector<std::string> validate_spec(const ProcessSpec& spec);
//! Spec violations plus grid/family incompatibility.
std::vector<std::string> validate_spec(const ProcessSpec& spec,
                                       const TimeGrid& grid);
GridKind required_grid_kind(Family f);

struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;
};

//! Paths stored point-major: values at grid point g for replicates
//! 0..reps-1 are contiguous, which is what threshold counting wants.
struct PathBatch {
  std::size_t points = 0;
  std::size_t reps = 0;
  std::vector<double> data;

  std::span<const double> at_point(std::size_t g) const {
    return {data.data() + g * reps, reps};
  }
  double operator()(std::size_t g, std::size_t r) const { return data[g * reps + r]; }
};

/*!
 * Draws paths of one process on one grid. Construction validates the pair
 * and prepares (caches) any covariance factor; sampling is then a pure
 * function of the seed and safe to call concurrently.
 */
class PathSampler {
 public:
  PathSampler(ProcessSpec spec, TimeGrid grid);

  const ProcessSpec& spec() const { return spec_; }
  const TimeGrid& grid() const { return grid_; }

  void sample(SeedSpec seed, std::span<double> out) const;
  SamplePath path(SeedSpec seed) const;
  //! Replicates first .. first+count-1 under master seed `master`.
  PathBatch batch(std::uint64_t master, std::uint64_t first, std::size_t count,
                  const Exec& exec = {}) const;

  //! Covariance factor of the Gaussian part (empty for other families).
  const CovarianceFactor& factor() const { return factor_; }

 private:
  double draw_shift(RandomStream& rng) const;

  ProcessSpec spec_;
  TimeGrid grid_;
  CovarianceFactor factor_;
  std::vector<double> sqrt_increments_;
};

SamplePath generate_path(const ProcessSpec& spec, const TimeGrid& grid,
                         SeedSpec seed);

//! Marginal law of X at grid point p.
CdfModel analytic_cdf(const ProcessSpec& spec, GridPoint p);

//! rho_alpha(s, t). Continuous interval families use |s-t|^{alpha*theta};
//! the sheet uses sqrt((|ds|/T)^{2h} + (|du|/T)^{2h}), h = alpha*theta; the
//! discrete family uses sqrt(v_s + v_t), v_t = (log(t+2))^{-h_variance},
//! and ignores alpha. Throws when alpha is out of range.
double analytic_rho(const ProcessSpec& spec, double alpha, GridPoint s,
                    GridPoint t, double horizon = 1.0);
PseudoMetricTable rho_table(const ProcessSpec& spec, double alpha,
                            const TimeGrid& grid);

//! Oscillator helpers: the interval index j with t in (2^-j, 2^-(j-1)],
//! and sin(2 pi 2^{j+k} t) for branch k in {0, 1}, exact at quarter phases.
int oscillator_interval(double t);
double oscillator_branch(double t, int j, int branch);

}  // namespace tdclt
