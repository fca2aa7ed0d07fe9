#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tdclt/cdf.hpp"
#include "tdclt/metric_table.hpp"
#include "tdclt/metrics.hpp"
#include "tdclt/process.hpp"

namespace tdclt {

//! A partition of {0..size-1}; labels are renumbered by first appearance.
struct Partition {
  std::vector<std::size_t> labels;
  std::size_t count = 0;

  static Partition from_labels(std::vector<std::size_t> labels);
  static Partition trivial(std::size_t size);
  static Partition singletons(std::size_t size);

  std::size_t size() const { return labels.size(); }
  std::vector<std::vector<std::size_t>> cells() const;
  //! Every cell of *this lies inside a cell of `coarser`.
  bool refines(const Partition& coarser) const;
};

//! Coarsest common refinement.
Partition meet(const Partition& a, const Partition& b);

//! 2^{2^n}, saturating at SIZE_MAX.
std::size_t admissible_card(std::size_t n);

struct PartitionSequence {
  std::vector<Partition> levels;
  std::vector<std::size_t> cards;

  void push(Partition p);
  bool increasing() const;
  //! cards[n] <= 2^{2^n} at every level.
  bool admissible() const;
};

//! One piece of a cut-point decomposition: an interval with open left end
//! lo, right end hi (closed when hi_closed), or the atom {lo} (= {hi}).
struct CutPiece {
  enum class Kind { interval, atom };
  Kind kind = Kind::interval;
  double lo = 0, hi = 0;
  bool hi_closed = true;
  double mass = 0;
  //! The trailing piece (z_last, +inf) that may carry mass < alpha.
  bool tail = false;

  bool contains(double x) const;
};

struct CutPointDecomposition {
  double alpha = 0;
  std::vector<double> z;  // finite cut points z_1, z_2, ...
  std::vector<CutPiece> pieces;  // ordered left to right, partitioning R
  //! pieces.size() <= 2 / alpha
  bool within_count_bound = false;
  //! Each C_k u D_k (pieces sharing a cut point) has mass >= alpha, tail aside.
  bool mass_ok = false;

  //! Index of the piece holding x.
  std::size_t locate(double x) const;
};

//! z_{k+1} = sup{x > z_k : F(x) - F(z_k) < alpha}; closed interval when
//! F(z_{k+1}) - F(z_k) <= alpha, else open interval plus the atom z_{k+1}.
//! Throws unless 0 < alpha < 1.
CutPointDecomposition cut_points(const CdfModel& f, double alpha);

//! argmin over members of the largest distance to another member.
std::size_t chebyshev_center(const PseudoMetricTable& d,
                             std::span<const std::size_t> members);

struct ProductCell {
  std::size_t b_cell = 0;            // cell index in the grid partition
  std::vector<std::size_t> members;  // grid points of B
  std::size_t anchor = 0;            // t_B
  CutPiece piece;
  double delta_rho = 0;
  //! 2((2L+2)^{1/2} Delta + Delta + 2^-n), or 2 (2L+2)^{1/2} Delta for atoms.
  double tau_bound = 0;
};

struct ProductPartition {
  std::size_t level = 0;
  std::vector<ProductCell> cells;
  std::vector<CutPointDecomposition> cuts;  // per B cell
  std::size_t count_bound = 0;              // 2^{2^{n-1}} 2^{2n+1}

  //! Cell holding the point (t, y).
  std::size_t locate(std::size_t t, double y) const;
};

/*!
 * Splits each cell B of `grid_partition` by the cut points of F_{t_B} with
 * alpha = min((Delta_rho(B) + 2^-n)^2, 1); a single piece R when alpha
 * reaches 1. Throws std::logic_error if the cell count exceeds
 * 2^{2^{n-1}} 2^{2n+1}.
 */
ProductPartition product_refine(const Partition& grid_partition,
                                const ProcessSpec& spec, const TimeGrid& grid,
                                const PseudoMetricTable& rho, std::size_t n, double L);

/*!
 * Output level n is the coarsest common refinement of inputs 1..n-1
 * (inputs are numbered from 1). Levels 0 and 1 are trivial.
 */
PartitionSequence minimal_merge(std::span<const Partition> inputs);

//! sup over points of sum_{n=r}^{N} 2^{n/2} diam_d(A_n(t)).
double gamma_sum_tail(const PartitionSequence& seq, const PseudoMetricTable& d,
                      std::size_t r);

//! Farthest-point traversal from point 0; level n uses the first
//! min(2^{2^n}, m) centers, each point joining the nearest center within its
//! level n-1 cell. Stops at singletons.
PartitionSequence greedy_admissible(const PseudoMetricTable& d);

//! Greedy maximal eps-separated subset in index order.
std::vector<std::size_t> maximal_separated_set(const PseudoMetricTable& d, double eps);

struct CellCheck {
  std::size_t level = 0;
  std::size_t cell = 0;
  Estimate tau_diameter;
  double bound = 0;
  double excess = 0;  // tau - 4 SE - bound
};

//! tau-diameter of each product cell B x C over x-values in C (quantiles of
//! F_{t_B} at `levels` levels plus finite piece ends) against its bound.
std::vector<CellCheck> check_product_cells(const ProductPartition& part,
                                           const PathBatch& paths,
                                           const ProcessSpec& spec,
                                           const TimeGrid& grid,
                                           std::size_t levels = 16);

struct CompositionReport {
  std::vector<IndexPoint> index;
  PartitionSequence grid_sequence;   // greedy on rho
  PartitionSequence index_sequence;  // merged product partitions on the index
  PseudoMetricTable tau;
  std::vector<double> rho_tail, tau_tail, geometric_tail;
  //! max over r of tau_tail / (rho_tail + sum_{n>=r} 2^{-n/2}).
  double fitted_c = 0;
};

//! Greedy rho sequence B_n, product partitions G_n from B_{n-1}, merged into
//! A_n on grid x {quantile values}; tails under the estimated tau.
CompositionReport compose_admissible(const ProcessSpec& spec, const TimeGrid& grid,
                                     const PathBatch& paths, double L, double alpha,
                                     std::size_t value_levels, std::size_t max_level);

}  // namespace tdclt
