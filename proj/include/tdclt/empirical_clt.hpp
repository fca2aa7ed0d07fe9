#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdclt/linalg.hpp"
#include "tdclt/metrics.hpp"
#include "tdclt/process.hpp"

namespace tdclt {

//! For each grid point t, thresholds F_t^{-1}(i/(levels+1)), i = 1..levels
//! (distinct finite values only).
std::vector<IndexPoint> quantile_index(const ProcessSpec& spec,
                                       const TimeGrid& grid,
                                       std::size_t levels = 64);

//! F_t(y) at every index point.
std::vector<double> centering(const ProcessSpec& spec, const TimeGrid& grid,
                              std::span<const IndexPoint> index);

struct EmpiricalField {
  std::vector<IndexPoint> index;
  std::vector<double> values;
  std::size_t n = 0;
};

//! nu_n(t, y) = n^{-1/2} sum_j (1{X_j(t) <= y} - F_t(y)) over the batch.
EmpiricalField empirical_field(const PathBatch& paths,
                               std::span<const IndexPoint> index,
                               std::span<const double> center);
//! Draws replicates first .. first+n-1 and evaluates nu_n.
EmpiricalField build_empirical_field(const PathSampler& sampler,
                                     std::span<const IndexPoint> index,
                                     std::size_t n, std::uint64_t master_seed,
                                     std::uint64_t first = 0,
                                     const Exec& exec = {});

struct LimitFieldModel {
  std::vector<IndexPoint> index;
  //! Row-major P(X_s <= x, X_t <= y) - F_s(x) F_t(y), estimated.
  std::vector<double> covariance;
  //! SE of each covariance entry (binomial SE of the joint frequency).
  std::vector<double> stderr_matrix;
  std::size_t paths = 0;
  CovarianceFactor factor;
};

//! Largest index the estimated limit field accepts (dense eigensolver).
inline constexpr std::size_t kMaxLimitIndex = 4096;

LimitFieldModel estimate_limit_field(const PathSampler& sampler,
                                     std::span<const IndexPoint> index,
                                     std::size_t m_paths,
                                     std::uint64_t master_seed,
                                     const Exec& exec = {});

enum class SupSource { empirical, gaussian_limit };

struct SupStatDistribution {
  SupSource source = SupSource::empirical;
  std::size_t n = 0;  // sample size for the empirical source
  std::vector<double> values;
};

//! reps draws of sup |nu_n|. Replicate r uses path replicates
//! r*stride .. r*stride+n-1, so rungs with n <= stride share paths.
SupStatDistribution sample_sup_empirical(const PathSampler& sampler,
                                         std::span<const IndexPoint> index,
                                         std::size_t n, std::size_t reps,
                                         std::uint64_t master_seed,
                                         std::size_t stride,
                                         const Exec& exec = {});

SupStatDistribution sample_sup_limit(const LimitFieldModel& model,
                                     std::size_t reps, std::uint64_t master_seed,
                                     const Exec& exec = {});

//! The map of (t, y) to the bridge time r for X_t = tU: r = y/t clipped to
//! [0, 1] (t = 0 gives 0). The limit at (t, y) is B(r) - r B(1).
double linear_u_phi(double t, double y);

enum class BridgeMethod {
  //! B(r) - r B(1) from Brownian increments.
  increments,
  //! Sequential conditional sampling of the pinned process.
  sequential,
};

//! reps draws of max over r in r_values of |B(r) - r B(1)|.
SupStatDistribution sample_sup_bridge(std::span<const double> r_values,
                                      std::size_t reps, std::uint64_t master_seed,
                                      BridgeMethod method,
                                      const Exec& exec = {});

enum class LimitKind { automatic, estimated, phi_bridge };

struct CltOptions {
  LimitKind limit = LimitKind::automatic;
  std::size_t limit_paths = 20000;
  double ks_threshold = 0.08;
};

struct CltRow {
  std::size_t n = 0;
  double ks = 0;
  double se = 0;  // null SD of the two-sample KS statistic
  std::string verdict;
};

struct CltReport {
  std::vector<CltRow> rows;
  //! "consistent" when the last rung is below the threshold, not above the
  //! first rung, and no step rises by more than 2 null SDs.
  std::string trend;
  SupStatDistribution limit;
  std::vector<SupStatDistribution> empirical;
};

//! 0.2603 sqrt(1/a + 1/b): SD of the two-sample KS statistic under the null.
double ks_null_sd(std::size_t a, std::size_t b);

CltReport clt_diagnostic(const PathSampler& sampler,
                         std::span<const IndexPoint> index,
                         std::span<const std::size_t> n_ladder, std::size_t reps,
                         std::uint64_t master_seed, const CltOptions& options = {},
                         const Exec& exec = {});

struct RefinementRow {
  int depth = 0;
  std::size_t index_size = 0;
  double ks = 0;
  double se = 0;
};

struct RefinementReport {
  std::vector<RefinementRow> rows;
  //! "inconsistent" when KS fails to fall with refinement (last rung not
  //! below the first by 2 null SDs) or ends above the threshold.
  std::string trend;
};

//! Fixed n, dyadic grids of increasing depth (finer near 0): empirical sup
//! against the estimated limit sup per depth.
RefinementReport clt_refinement_diagnostic(const ProcessSpec& spec,
                                           std::span<const int> depths,
                                           std::size_t levels, std::size_t n,
                                           std::size_t reps,
                                           std::uint64_t master_seed,
                                           const CltOptions& options = {},
                                           const Exec& exec = {});

}  // namespace tdclt
