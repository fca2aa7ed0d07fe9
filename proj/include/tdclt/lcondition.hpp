#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tdclt/metrics.hpp"
#include "tdclt/process.hpp"

namespace tdclt {

enum class LVariant { weak, strong, modified };
std::string_view to_string(LVariant v);

struct LConditionRow {
  LVariant variant = LVariant::strong;
  //! Grid index of the anchor t (for exact rows: the integer t itself).
  std::size_t t = 0;
  double eps = 0;
  Estimate prob;
  double ratio = 0;  // prob / eps^2
  std::size_t ball_size = 0;  // grid points s != t with rho(s,t) <= eps
  bool ball_trivial = false;
};

struct LConditionReport {
  LVariant variant = LVariant::strong;
  std::vector<double> eps_grid;
  std::vector<LConditionRow> rows;
  //! max over rows of prob / eps^2
  double l_hat = 0;
};

//! 2^{-k}, k = 1..count.
std::vector<double> dyadic_eps_grid(int count = 8);

//! P(sup_{s in ball} |F~_t(X_s) - F~_t(X_t)| > threshold), the ball being
//! the grid points within rho <= radius of t. A single auxiliary uniform per
//! (replicate, anchor) is shared by every s. With `per_point` the sup moves
//! outside the probability and the largest single-s probability is returned.
Estimate l_exceedance(const PathBatch& paths, const ProcessSpec& spec,
                      const TimeGrid& grid, std::size_t t, double radius,
                      double threshold, double alpha,
                      std::uint64_t aux_seed, bool per_point);

//! Weak (per pair) and strong (sup inside) L-condition sweeps on a batch.
LConditionReport estimate_weak_l(const PathBatch& paths, const ProcessSpec& spec,
                                 const TimeGrid& grid,
                                 std::span<const double> eps_grid, double alpha,
                                 std::uint64_t aux_seed);
LConditionReport estimate_strong_l(const PathBatch& paths, const ProcessSpec& spec,
                                   const TimeGrid& grid,
                                   std::span<const double> eps_grid, double alpha,
                                   std::uint64_t aux_seed);

//! Convenience overloads that draw n paths under master_seed.
LConditionReport estimate_weak_l(const ProcessSpec& spec, const TimeGrid& grid,
                                 std::span<const double> eps_grid, std::size_t n,
                                 std::uint64_t master_seed, double alpha = 1.0,
                                 const Exec& exec = {});
LConditionReport estimate_strong_l(const ProcessSpec& spec, const TimeGrid& grid,
                                   std::span<const double> eps_grid, std::size_t n,
                                   std::uint64_t master_seed, double alpha = 1.0,
                                   const Exec& exec = {});

//! Exact modified-L sweep for the independent two-point model: p_t from
//! `pt`, rho(s,t)^2 = v_s + v_t with v_t = (log(t+2))^{-h}, over
//! t = 1..t_max. One row per eps carrying the largest probability (and the
//! first t attaining it).
LConditionReport exact_modified_l(const PtFamily& pt, double h_variance,
                                  std::size_t t_max,
                                  std::span<const double> eps_grid);
//! The exact probability for a single (t, eps).
double exact_modified_l_prob(const PtFamily& pt, double h_variance, double t,
                             double eps);

struct BallEstimate {
  Estimate prob;
  double bound = 0;  // (2c^2 + 2L + 1) eps^2, c = (2L+2)^{1/2} + 1
  std::size_t candidates = 0;  // (s, x) pairs in the lambda-ball
};

//! P(some (s,x) with lambda((t,y),(s,x)) <= eps has 1{X_s <= x} != 1{X_t <= y}).
//! Ball membership uses tau estimated on `pilot`; the probability is
//! estimated on `fresh`. x ranges over `levels` quantiles of each F_s plus y.
BallEstimate estimate_lemma4_ball(const PathBatch& pilot, const PathBatch& fresh,
                                  const ProcessSpec& spec, const TimeGrid& grid,
                                  IndexPoint anchor, double eps, double L,
                                  double alpha, std::size_t levels = 64);
BallEstimate estimate_lemma4_ball(const ProcessSpec& spec, const TimeGrid& grid,
                                  IndexPoint anchor, double eps, double L,
                                  std::size_t n, std::uint64_t master_seed,
                                  double alpha = 1.0, const Exec& exec = {});

struct Prop2Report {
  PtFamily pt;
  //! (i): p_t = o((log(t+2))^{-1}).
  bool pregaussian = false;
  //! (ii): sum_t (p_t (1 - p_t))^r < inf for some r in r_grid.
  bool clt = false;
  std::vector<double> r_grid;
  std::vector<bool> summable;  // analytic verdict per r
  std::vector<double> partial_sums;  // up to t_max, per r
  std::size_t t_max = 0;
};

Prop2Report proposition2_criteria(const PtFamily& pt, std::size_t t_max,
                                  std::span<const double> r_grid);

}  // namespace tdclt
