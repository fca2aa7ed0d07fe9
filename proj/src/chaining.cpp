#include "tdclt/chaining.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace tdclt {

Partition Partition::from_labels(std::vector<std::size_t> labels) {
  std::map<std::size_t, std::size_t> rename;
  for (auto& l : labels) {
    auto [it, fresh] = rename.try_emplace(l, rename.size());
    (void)fresh;
    l = it->second;
  }
  Partition p;
  p.count = rename.size();
  p.labels = std::move(labels);
  return p;
}

Partition Partition::trivial(std::size_t size) {
  Partition p;
  p.labels.assign(size, 0);
  p.count = size ? 1 : 0;
  return p;
}

Partition Partition::singletons(std::size_t size) {
  Partition p;
  p.labels.resize(size);
  for (std::size_t i = 0; i < size; ++i) p.labels[i] = i;
  p.count = size;
  return p;
}

std::vector<std::vector<std::size_t>> Partition::cells() const {
  std::vector<std::vector<std::size_t>> out(count);
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

bool Partition::refines(const Partition& coarser) const {
  if (coarser.size() != size()) return false;
  std::vector<std::size_t> parent(count, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& p = parent[labels[i]];
    if (p == std::numeric_limits<std::size_t>::max()) p = coarser.labels[i];
    else if (p != coarser.labels[i]) return false;
  }
  return true;
}

Partition meet(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw std::invalid_argument("meet: partitions of different sets");
  std::vector<std::size_t> labels(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) labels[i] = a.labels[i] * b.count + b.labels[i];
  return Partition::from_labels(std::move(labels));
}

std::size_t admissible_card(std::size_t n) {
  if (n >= 6) return std::numeric_limits<std::size_t>::max();
  return std::size_t{1} << (std::size_t{1} << n);
}

void PartitionSequence::push(Partition p) {
  cards.push_back(p.count);
  levels.push_back(std::move(p));
}

bool PartitionSequence::increasing() const {
  for (std::size_t n = 1; n < levels.size(); ++n)
    if (!levels[n].refines(levels[n - 1])) return false;
  return true;
}

bool PartitionSequence::admissible() const {
  for (std::size_t n = 0; n < cards.size(); ++n)
    if (cards[n] > admissible_card(n)) return false;
  return true;
}

bool CutPiece::contains(double x) const {
  if (kind == Kind::atom) return x == lo;
  if (!(x > lo)) return false;
  return hi_closed ? x <= hi : x < hi;
}

std::size_t CutPointDecomposition::locate(double x) const {
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (pieces[i].contains(x)) return i;
  throw std::logic_error("cut pieces do not cover x");
}

CutPointDecomposition cut_points(const CdfModel& f, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("cut_points: alpha must lie in (0,1)");
  const double inf = std::numeric_limits<double>::infinity();
  CutPointDecomposition out;
  out.alpha = alpha;
  double z = -inf, fz = 0.0;
  // Each iteration consumes mass >= alpha, so this bounds the loop.
  const auto max_steps = static_cast<std::size_t>(std::ceil(1.0 / alpha)) + 2;
  for (std::size_t step = 0;; ++step) {
    if (step > max_steps) throw std::logic_error("cut_points did not terminate");
    const double level = fz + alpha;
    const double next = level <= 1.0 ? f.quantile(level) : inf;
    if (!std::isfinite(next)) {
      CutPiece tail;
      tail.lo = z;
      tail.hi = inf;
      tail.hi_closed = false;
      tail.mass = 1.0 - fz;
      tail.tail = true;
      out.pieces.push_back(tail);
      break;
    }
    const double fnext = f(next);
    CutPiece c;
    c.lo = z;
    c.hi = next;
    if (fnext - fz <= alpha) {
      c.hi_closed = true;
      c.mass = fnext - fz;
      out.pieces.push_back(c);
    } else {
      c.hi_closed = false;
      const double left = f.left_limit(next);
      c.mass = left - fz;
      out.pieces.push_back(c);
      CutPiece d;
      d.kind = CutPiece::Kind::atom;
      d.lo = d.hi = next;
      d.mass = fnext - left;
      out.pieces.push_back(d);
    }
    out.z.push_back(next);
    z = next;
    fz = fnext;
  }
  out.within_count_bound = static_cast<double>(out.pieces.size()) <= 2.0 / alpha;
  out.mass_ok = true;
  double group = 0.0;
  for (std::size_t i = 0; i < out.pieces.size(); ++i) {
    const auto& p = out.pieces[i];
    if (p.tail) break;
    group += p.mass;
    const bool ends = p.kind == CutPiece::Kind::atom || p.hi_closed;
    if (ends) {
      // 1e-12 absorbs rounding in F differences.
      if (group < alpha - 1e-12) out.mass_ok = false;
      group = 0.0;
    }
  }
  return out;
}

std::size_t chebyshev_center(const PseudoMetricTable& d,
                             std::span<const std::size_t> members) {
  if (members.empty()) throw std::invalid_argument("chebyshev_center: empty cell");
  std::size_t best = members[0];
  double best_r = std::numeric_limits<double>::infinity();
  for (auto i : members) {
    double r = 0.0;
    for (auto j : members) r = std::max(r, d(i, j));
    if (r < best_r) {
      best_r = r;
      best = i;
    }
  }
  return best;
}

std::size_t ProductPartition::locate(std::size_t t, double y) const {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (std::find(c.members.begin(), c.members.end(), t) != c.members.end() &&
        c.piece.contains(y))
      return i;
  }
  throw std::logic_error("product partition does not cover the point");
}

ProductPartition product_refine(const Partition& grid_partition,
                                const ProcessSpec& spec, const TimeGrid& grid,
                                const PseudoMetricTable& rho, std::size_t n, double L) {
  if (grid_partition.size() != grid.size() || rho.size() != grid.size())
    throw std::invalid_argument("product_refine: partition, grid and metric sizes differ");
  if (n == 0) throw std::invalid_argument("product_refine: level must be >= 1");
  if (n > 5) throw std::invalid_argument("product_refine: level must be <= 5 (count bound overflows)");
  ProductPartition out;
  out.level = n;
  out.count_bound = (std::size_t{1} << (std::size_t{1} << (n - 1))) << (2 * n + 1);
  const double two_n = std::ldexp(1.0, -static_cast<int>(n));
  const double root = std::sqrt(2.0 * L + 2.0);
  const auto cells = grid_partition.cells();
  for (std::size_t b = 0; b < cells.size(); ++b) {
    const auto& members = cells[b];
    const double delta = rho.diameter(members);
    const std::size_t anchor = chebyshev_center(rho, members);
    const double a = std::min(std::pow(delta + two_n, 2), 1.0);
    CutPointDecomposition cut;
    if (a >= 1.0) {
      cut.alpha = 1.0;
      CutPiece whole;
      whole.lo = -std::numeric_limits<double>::infinity();
      whole.hi = std::numeric_limits<double>::infinity();
      whole.hi_closed = false;
      whole.mass = 1.0;
      cut.pieces.push_back(whole);
      cut.within_count_bound = cut.mass_ok = true;
    } else {
      cut = cut_points(analytic_cdf(spec, grid[anchor]), a);
    }
    for (const auto& piece : cut.pieces) {
      ProductCell cell;
      cell.b_cell = b;
      cell.members = members;
      cell.anchor = anchor;
      cell.piece = piece;
      cell.delta_rho = delta;
      cell.tau_bound = piece.kind == CutPiece::Kind::atom
                           ? 2.0 * root * delta
                           : 2.0 * (root * delta + delta + two_n);
      out.cells.push_back(std::move(cell));
    }
    out.cuts.push_back(std::move(cut));
  }
  if (out.cells.size() > out.count_bound)
    throw std::logic_error("product_refine: cell count " + std::to_string(out.cells.size()) +
                           " exceeds bound " + std::to_string(out.count_bound));
  return out;
}

PartitionSequence minimal_merge(std::span<const Partition> inputs) {
  if (inputs.empty()) throw std::invalid_argument("minimal_merge: no inputs");
  const std::size_t size = inputs[0].size();
  for (const auto& p : inputs)
    if (p.size() != size) throw std::invalid_argument("minimal_merge: inputs partition different sets");
  PartitionSequence seq;
  seq.push(Partition::trivial(size));
  Partition acc = Partition::trivial(size);
  seq.push(acc);
  for (const auto& p : inputs) {
    acc = meet(acc, p);
    seq.push(acc);
  }
  return seq;
}

double gamma_sum_tail(const PartitionSequence& seq, const PseudoMetricTable& d,
                      std::size_t r) {
  if (seq.levels.empty()) return 0.0;
  const std::size_t m = seq.levels[0].size();
  if (d.size() != m) throw std::invalid_argument("gamma_sum_tail: metric size differs");
  std::vector<double> sum(m, 0.0);
  for (std::size_t n = r; n < seq.levels.size(); ++n) {
    const double w = std::pow(2.0, 0.5 * static_cast<double>(n));
    for (const auto& cell : seq.levels[n].cells()) {
      const double diam = d.diameter(cell);
      if (diam == 0.0) continue;
      for (auto i : cell) sum[i] += w * diam;
    }
  }
  return m ? *std::max_element(sum.begin(), sum.end()) : 0.0;
}

PartitionSequence greedy_admissible(const PseudoMetricTable& d) {
  const std::size_t m = d.size();
  if (m == 0) throw std::invalid_argument("greedy_admissible: empty space");
  // Farthest-point order.
  std::vector<std::size_t> order{0};
  std::vector<double> dist(m);
  for (std::size_t i = 0; i < m; ++i) dist[i] = d(0, i);
  std::vector<bool> taken(m, false);
  taken[0] = true;
  while (order.size() < m) {
    std::size_t far = m;
    for (std::size_t i = 0; i < m; ++i)
      if (!taken[i] && (far == m || dist[i] > dist[far])) far = i;
    taken[far] = true;
    order.push_back(far);
    for (std::size_t i = 0; i < m; ++i) dist[i] = std::min(dist[i], d(far, i));
  }

  PartitionSequence seq;
  seq.push(Partition::trivial(m));
  for (std::size_t n = 1; seq.levels.back().count < m; ++n) {
    const Partition& prev = seq.levels.back();
    const std::size_t k = std::min(admissible_card(n), m);
    std::vector<std::size_t> labels(m);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t best = m;
      for (std::size_t c = 0; c < k; ++c) {
        const std::size_t ctr = order[c];
        if (prev.labels[ctr] != prev.labels[i]) continue;
        if (ctr == i) {
          best = c;
          break;
        }
        if (best == m || d(i, ctr) < d(i, order[best])) best = c;
      }
      labels[i] = best;
    }
    seq.push(Partition::from_labels(std::move(labels)));
  }
  return seq;
}

std::vector<std::size_t> maximal_separated_set(const PseudoMetricTable& d, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("maximal_separated_set: eps must be > 0");
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < d.size(); ++i) {
    bool ok = true;
    for (auto j : chosen)
      if (d(i, j) < eps) {
        ok = false;
        break;
      }
    if (ok) chosen.push_back(i);
  }
  return chosen;
}

std::vector<CellCheck> check_product_cells(const ProductPartition& part,
                                           const PathBatch& paths,
                                           const ProcessSpec& spec,
                                           const TimeGrid& grid, std::size_t levels) {
  std::vector<CellCheck> out;
  for (std::size_t c = 0; c < part.cells.size(); ++c) {
    const auto& cell = part.cells[c];
    const CdfModel f = analytic_cdf(spec, grid[cell.anchor]);
    std::vector<double> xs;
    if (cell.piece.kind == CutPiece::Kind::atom) {
      xs.push_back(cell.piece.lo);
    } else {
      for (std::size_t k = 0; k < levels; ++k) {
        const double x = f.quantile((static_cast<double>(k) + 0.5) / static_cast<double>(levels));
        if (std::isfinite(x) && cell.piece.contains(x)) xs.push_back(x);
      }
      if (cell.piece.hi_closed && std::isfinite(cell.piece.hi)) xs.push_back(cell.piece.hi);
      // Just inside the open ends.
      if (std::isfinite(cell.piece.lo)) {
        const double x = std::nextafter(cell.piece.lo, std::numeric_limits<double>::infinity());
        if (cell.piece.contains(x)) xs.push_back(x);
      }
      if (!cell.piece.hi_closed && std::isfinite(cell.piece.hi)) {
        const double x = std::nextafter(cell.piece.hi, -std::numeric_limits<double>::infinity());
        if (cell.piece.contains(x)) xs.push_back(x);
      }
    }
    if (xs.empty()) continue;
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<IndexPoint> pts;
    for (auto s : cell.members)
      for (double x : xs) pts.push_back({s, x});
    CellCheck chk;
    chk.level = part.level;
    chk.cell = c;
    chk.tau_diameter = tau_diameter(paths, pts).value;
    chk.bound = cell.tau_bound;
    chk.excess = chk.tau_diameter.value - kFlagSe * chk.tau_diameter.se - chk.bound;
    out.push_back(chk);
  }
  return out;
}

CompositionReport compose_admissible(const ProcessSpec& spec, const TimeGrid& grid,
                                     const PathBatch& paths, double L, double alpha,
                                     std::size_t value_levels, std::size_t max_level) {
  if (max_level < 2 || max_level > 5)
    throw std::invalid_argument("compose_admissible: max_level must lie in [2, 5]");
  CompositionReport rep;
  const PseudoMetricTable rho = rho_table(spec, alpha, grid);
  rep.grid_sequence = greedy_admissible(rho);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const CdfModel f = analytic_cdf(spec, grid[g]);
    for (std::size_t k = 0; k < value_levels; ++k) {
      const double y = f.quantile((static_cast<double>(k) + 0.5) / static_cast<double>(value_levels));
      if (std::isfinite(y)) rep.index.push_back({g, y});
    }
  }
  const std::size_t K = rep.index.size();

  std::vector<Partition> g_levels;
  for (std::size_t n = 1; n <= max_level; ++n) {
    const auto& seq = rep.grid_sequence.levels;
    const Partition& b = seq[std::min(n - 1, seq.size() - 1)];
    const ProductPartition part = product_refine(b, spec, grid, rho, n, L);
    std::vector<std::size_t> labels(K);
    for (std::size_t i = 0; i < K; ++i) labels[i] = part.locate(rep.index[i].t, rep.index[i].y);
    g_levels.push_back(Partition::from_labels(std::move(labels)));
  }
  rep.index_sequence = minimal_merge(g_levels);

  rep.tau = PseudoMetricTable(K, false);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j) {
      const Estimate e = estimate_tau(paths, rep.index[i], rep.index[j]);
      rep.tau.set(i, j, e.value, e.se);
    }

  const std::size_t levels = rep.index_sequence.levels.size();
  rep.fitted_c = 0.0;
  for (std::size_t r = 0; r < levels; ++r) {
    rep.tau_tail.push_back(gamma_sum_tail(rep.index_sequence, rep.tau, r));
    rep.rho_tail.push_back(gamma_sum_tail(rep.grid_sequence, rho, r));
    double geo = 0.0;
    for (std::size_t n = r; n < levels; ++n) geo += std::pow(2.0, -0.5 * static_cast<double>(n));
    rep.geometric_tail.push_back(geo);
    const double denom = rep.rho_tail.back() + geo;
    if (denom > 0.0) rep.fitted_c = std::max(rep.fitted_c, rep.tau_tail.back() / denom);
  }
  return rep;
}

}  // namespace tdclt
