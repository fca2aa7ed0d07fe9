#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace tdclt {

enum class GridKind { interval_1d, sheet_2d, discrete_n };

std::string_view to_string(GridKind kind);
GridKind grid_kind_from_string(std::string_view name);

//! A point of the index set. `s` is the time (or the integer index for
//! discrete grids); `u` is the second sheet coordinate and 0 otherwise.
struct GridPoint {
  double s = 0.0;
  double u = 0.0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/*!
 * Ordered finite index set.
 *
 * Points are strictly increasing (lexicographic for the sheet), nonempty,
 * and lie in [0, T] (resp. [0, T]^2). Discrete grids hold integers >= 1 and
 * ignore the horizon.
 */
class TimeGrid {
 public:
  static TimeGrid interval(std::vector<double> points, double horizon = 1.0);
  //! m equally spaced points 0, T/(m-1), ..., T.
  static TimeGrid uniform(std::size_t m, double horizon = 1.0);
  //! {0} plus 2^{-j} for j = depth, ..., 1, 0 (scaled by T).
  static TimeGrid dyadic(int depth, double horizon = 1.0);
  static TimeGrid sheet(std::vector<GridPoint> points, double horizon = 1.0);
  //! k x k equally spaced sheet points including the axes.
  static TimeGrid sheet_uniform(std::size_t k, double horizon = 1.0);
  //! The integers first, ..., first + m - 1.
  static TimeGrid discrete(std::size_t m, long first = 1);
  static TimeGrid discrete_points(std::vector<long> points);

  GridKind kind() const { return kind_; }
  double horizon() const { return horizon_; }
  std::size_t size() const { return points_.size(); }
  const GridPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<GridPoint>& points() const { return points_; }

  //! Index of a point equal to p; throws std::out_of_range when absent.
  std::size_t index_of(GridPoint p) const;
  bool contains(GridPoint p) const;

 private:
  TimeGrid(GridKind kind, std::vector<GridPoint> points, double horizon);

  GridKind kind_;
  std::vector<GridPoint> points_;
  double horizon_;
};

}  // namespace tdclt
