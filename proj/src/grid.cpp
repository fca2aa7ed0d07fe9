#include "tdclt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tdclt {

std::string_view to_string(GridKind kind) {
  switch (kind) {
    case GridKind::interval_1d: return "interval-1d";
    case GridKind::sheet_2d: return "sheet-2d";
    case GridKind::discrete_n: return "discrete-n";
  }
  return "?";
}

GridKind grid_kind_from_string(std::string_view name) {
  if (name == "interval-1d") return GridKind::interval_1d;
  if (name == "sheet-2d") return GridKind::sheet_2d;
  if (name == "discrete-n") return GridKind::discrete_n;
  throw std::invalid_argument("unknown grid kind '" + std::string(name) + "'");
}

namespace {

bool lex_less(const GridPoint& a, const GridPoint& b) {
  return a.s < b.s || (a.s == b.s && a.u < b.u);
}

}  // namespace

TimeGrid::TimeGrid(GridKind kind, std::vector<GridPoint> points,
                   double horizon)
    : kind_(kind), points_(std::move(points)), horizon_(horizon) {
  if (points_.empty()) throw std::invalid_argument("grid must be nonempty");
  if (kind_ != GridKind::discrete_n &&
      !(std::isfinite(horizon_) && horizon_ > 0)) {
    throw std::invalid_argument("grid horizon must be positive");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.s) || !std::isfinite(p.u)) {
      throw std::invalid_argument("grid points must be finite");
    }
    if (i > 0 && !lex_less(points_[i - 1], p)) {
      throw std::invalid_argument("grid points must be strictly increasing");
    }
    switch (kind_) {
      case GridKind::interval_1d:
        if (p.s < 0 || p.s > horizon_ || p.u != 0) {
          throw std::invalid_argument("interval point outside [0, T]");
        }
        break;
      case GridKind::sheet_2d:
        if (p.s < 0 || p.s > horizon_ || p.u < 0 || p.u > horizon_) {
          throw std::invalid_argument("sheet point outside [0, T]^2");
        }
        break;
      case GridKind::discrete_n:
        if (p.s < 1 || p.s != std::floor(p.s) || p.u != 0) {
          throw std::invalid_argument("discrete points must be integers >= 1");
        }
        break;
    }
  }
}

TimeGrid TimeGrid::interval(std::vector<double> points, double horizon) {
  std::vector<GridPoint> pts;
  pts.reserve(points.size());
  for (double p : points) pts.push_back({p, 0.0});
  return TimeGrid(GridKind::interval_1d, std::move(pts), horizon);
}

TimeGrid TimeGrid::uniform(std::size_t m, double horizon) {
  if (m == 0) throw std::invalid_argument("grid must be nonempty");
  std::vector<double> pts(m);
  for (std::size_t i = 0; i < m; ++i) {
    pts[i] = m == 1 ? horizon
                    : horizon * static_cast<double>(i) /
                          static_cast<double>(m - 1);
  }
  return interval(std::move(pts), horizon);
}

TimeGrid TimeGrid::dyadic(int depth, double horizon) {
  if (depth < 0 || depth > 1000) throw std::invalid_argument("bad depth");
  std::vector<double> pts{0.0};
  for (int j = depth; j >= 0; --j) pts.push_back(std::ldexp(horizon, -j));
  return interval(std::move(pts), horizon);
}

TimeGrid TimeGrid::sheet(std::vector<GridPoint> points, double horizon) {
  return TimeGrid(GridKind::sheet_2d, std::move(points), horizon);
}

TimeGrid TimeGrid::sheet_uniform(std::size_t k, double horizon) {
  if (k < 2) throw std::invalid_argument("sheet grid needs k >= 2");
  std::vector<GridPoint> pts;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      pts.push_back({horizon * static_cast<double>(i) / double(k - 1),
                     horizon * static_cast<double>(j) / double(k - 1)});
    }
  }
  return sheet(std::move(pts), horizon);
}

TimeGrid TimeGrid::discrete(std::size_t m, long first) {
  std::vector<long> pts(m);
  for (std::size_t i = 0; i < m; ++i) pts[i] = first + static_cast<long>(i);
  return discrete_points(std::move(pts));
}

TimeGrid TimeGrid::discrete_points(std::vector<long> points) {
  std::vector<GridPoint> pts;
  pts.reserve(points.size());
  for (long p : points) pts.push_back({static_cast<double>(p), 0.0});
  return TimeGrid(GridKind::discrete_n, std::move(pts), 1.0);
}

std::size_t TimeGrid::index_of(GridPoint p) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), p, lex_less);
  if (it == points_.end() || !(*it == p)) {
    throw std::out_of_range("point not on grid");
  }
  return static_cast<std::size_t>(it - points_.begin());
}

bool TimeGrid::contains(GridPoint p) const {
  return std::binary_search(points_.begin(), points_.end(), p, lex_less);
}

}  // namespace tdclt
