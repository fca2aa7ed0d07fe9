#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tdclt/metric_table.hpp"
#include "tdclt/process.hpp"

namespace tdclt {

//! A point (t, y) of E x R; t is an index into the ambient grid.
struct IndexPoint {
  std::size_t t = 0;
  double y = 0.0;
};

//! Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

//! Flag threshold for all inequality oracles: estimate - 4 SE > bound.
inline constexpr double kFlagSe = 4.0;

//! tau^2 = P(1{X_s <= x} != 1{X_t <= y}) from the joint draws in `paths`.
Estimate estimate_tau_sq(const PathBatch& paths, IndexPoint a, IndexPoint b);
//! tau with a delta-method standard error (floored at the 1/n resolution
//! when no disagreement is observed).
Estimate estimate_tau(const PathBatch& paths, IndexPoint a, IndexPoint b);
//! Draws n >= 1000 joint paths and estimates tau.
Estimate estimate_tau(const PathSampler& sampler, IndexPoint a, IndexPoint b,
                      std::size_t n, std::uint64_t master_seed,
                      const Exec& exec = {});

double lambda_metric(double tau, double rho);

//! Sorted distinct finite quantiles of both laws at levels (k + 1/2)/per.
std::vector<double> quantile_x_grid(const CdfModel& a, const CdfModel& b,
                                    std::size_t per = 256);

struct Lemma1Report {
  std::size_t s = 0, t = 0;
  double rho = 0, L = 0;
  //! max over x of P(X_s <= x < X_t), of P(X_t <= x < X_s), of their sum
  //! (the L1 distance) and of |F_t(x) - F_s(x)|, each with its SE.
  Estimate p_st, p_ts, l1, sup_diff;
  double x_st = 0, x_ts = 0, x_l1 = 0, x_diff = 0;
  //! sup_x |F_t - F_s| from the analytic marginals over the same x-grid.
  double analytic_sup_diff = 0;
  double bound_single = 0;  // (L+1) rho^2
  double bound_double = 0;  // 2 (L+1) rho^2
  //! max of (estimate - 4 SE - bound) over the four checks.
  double excess = 0;
  bool violated = false;
};

Lemma1Report check_lemma1(const PathBatch& paths, const ProcessSpec& spec,
                          const TimeGrid& grid, std::size_t s, std::size_t t,
                          std::span<const double> x_grid, double L,
                          double alpha);

struct TauPairReport {
  IndexPoint a, b;
  Estimate tau_sq;
  double rho = 0;
  //! min_u |F_u(y) - F_u(x)| + (2L+2) rho^2
  double lemma2_bound = 0;
  double lemma2_excess = 0;
  //! |F_t(x) - F_t(y)| against (c max(tau, rho))^2, c = sqrt(2L+2) + 1,
  //! with tau taken at its upper 4 SE confidence limit.
  double lemma3_lhs = 0;
  double lemma3_bound = 0;
  double lemma3_excess = 0;
  bool violated = false;
};

TauPairReport check_tau_pair(const PathBatch& paths, const ProcessSpec& spec,
                             const TimeGrid& grid, IndexPoint a, IndexPoint b,
                             double L, double alpha);

struct TauDiameter {
  Estimate value;
  IndexPoint a, b;
};

//! Largest estimated tau over pairs of `points`.
TauDiameter tau_diameter(const PathBatch& paths,
                         std::span<const IndexPoint> points);

struct DiameterReport {
  TauDiameter tau;
  double rho_diameter = 0;
  double f_spread = 0;  // sup_{x,y in D} |F_{t_B}(y) - F_{t_B}(x)|
  double bound = 0;
  double excess = 0;
  bool violated = false;
};

//! tau-diameter of B x D (D = [d_lo, d_hi] sampled at `d_points` values)
//! against 2 ((2L+2)^{1/2} diam_rho(B) + spread^{1/2}).
DiameterReport check_corollary1_diameter(
    const PathBatch& paths, const ProcessSpec& spec, const TimeGrid& grid,
    std::span<const std::size_t> cell, std::size_t anchor, double d_lo,
    double d_hi, double L, double alpha, std::size_t d_points = 9);

struct TailPoint {
  double x = 0;
  Estimate exceed;
  double bound = 0;  // x^{-eta}
};

struct Theorem5Report {
  //! (I): sup over grid and x of the marginal density; the Hoelder
  //! constant it implies for exponent beta, and whether that is <= k.
  double density_sup = 0;
  double k_required = 0;
  bool cond1 = false;
  //! (II): tail of Gamma = max_{s != t} |X_t - X_s| / phi(s,t).
  std::vector<TailPoint> tail;
  //! Smallest x on the grid from which the exceedance stays below x^{-eta}
  //! within 4 SE; +inf when it never does.
  double x0 = 0;
  std::vector<double> gamma_samples;
  //! (III): phi^alpha <= rho_alpha on every grid pair (1e-12 slack).
  double cond3_worst = 0;
  bool cond3 = false;
};

//! phi(s, t) = |s - t|^theta on intervals and
//! ((|ds|/T)^2 + (|du|/T)^2)^{theta/2} on the sheet.
double holder_phi(const TimeGrid& grid, GridPoint s, GridPoint t, double theta);

Theorem5Report check_theorem5_conditions(const ProcessSpec& spec,
                                         const TimeGrid& grid, double beta,
                                         double k, double eta, double alpha,
                                         double theta, std::size_t n,
                                         std::uint64_t master_seed,
                                         std::span<const double> x_grid,
                                         const Exec& exec = {});

}  // namespace tdclt
