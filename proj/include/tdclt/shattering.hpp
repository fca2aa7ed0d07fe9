#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdclt/process.hpp"

namespace tdclt {

//! Largest sample size the exact registry supports (masks are 32-bit and
//! the registry bitmap has 2^n bits).
inline constexpr std::size_t kMaxShatterN = 24;

/*!
 * The distinct subsets {j : X_j(t) <= y} cut out by the threshold class.
 * Bit j of a mask is path j.
 */
class SubsetRegistry {
 public:
  explicit SubsetRegistry(std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t size() const { return count_; }
  bool contains(std::uint32_t mask) const;
  void insert(std::uint32_t mask);
  //! Sorted masks.
  std::vector<std::uint32_t> masks() const;

 private:
  std::size_t n_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> bits_;
};

//! values[j * points + g] is path j at grid point g.
struct PathSet {
  std::size_t n = 0;
  std::size_t points = 0;
  std::vector<double> values;

  double operator()(std::size_t j, std::size_t g) const { return values[j * points + g]; }
};

PathSet make_path_set(std::span<const SamplePath> paths);

//! Lower sets of the value order at grid point g, ties merged, without the
//! empty mask.
std::vector<std::uint32_t> prefix_masks(const PathSet& paths, std::size_t g);

//! Exact registry: union over grid points of the prefix masks, plus the
//! empty and full masks. Throws for n = 0 or n > kMaxShatterN.
SubsetRegistry shatter_count(const PathSet& paths, const Exec& exec = {});
SubsetRegistry shatter_count(std::span<const SamplePath> paths, const Exec& exec = {});

struct GrowthRow {
  std::size_t n = 0;
  std::vector<std::size_t> counts;  // per trial
  double mean_ratio = 0;            // mean of ln(count)/sqrt(n)
  double q10 = 0, q50 = 0, q90 = 0;
  //! Trials with count > n + 1.
  std::size_t above_linear = 0;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  //! "decreasing" when mean_ratio falls strictly along the ladder.
  std::string trend;
};

//! Trial k at size n uses replicates k * max_n .. k * max_n + n - 1, so the
//! rungs of one trial are nested samples.
GrowthReport delta_growth_diagnostic(const ProcessSpec& spec, const TimeGrid& grid,
                                     std::span<const std::size_t> n_ladder,
                                     std::size_t trials, std::uint64_t master_seed,
                                     const Exec& exec = {});

struct Witness {
  std::uint32_t mask = 0;
  double t = 0;
  double y = 0;
  int interval = 0;  // j of t_j; 0 for the threshold-below-zero witness
};

struct Lemma8Result {
  PathSet paths;
  TimeGrid grid;
  //! One witness per realized mask, ordered by mask.
  std::vector<Witness> witnesses;
};

//! t_j = 2^-j + (2^-(j-1) - 2^-j)/4 = (5/4) 2^-j.
double lemma8_time(int j);

/*!
 * n lip1-osc paths (J oscillator intervals) on the grid {t_J, .., t_1};
 * path i is replicate first + i under master_seed. At t_j the threshold
 * 17 t_j / 4 selects the paths on the faster branch.
 */
Lemma8Result lemma8_construct(std::size_t n, int J, std::uint64_t master_seed,
                              std::uint64_t first = 0);

//! Recomputes every witnessed mask from its (t, y) and the paths.
bool validate_witnesses(const Lemma8Result& result);

}  // namespace tdclt
