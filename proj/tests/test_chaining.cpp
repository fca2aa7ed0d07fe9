#include <cmath>
#include <vector>

#include "doctest.h"
#include "tdclt/cdf.hpp"
#include "tdclt/chaining.hpp"
#include "tdclt/process.hpp"
#include "tdclt/rng.hpp"

using namespace tdclt;

namespace {

PseudoMetricTable line_metric(std::vector<double> x) {
  PseudoMetricTable d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) d.set(i, j, std::fabs(x[i] - x[j]));
  return d;
}

void check_partition_of_r(const CutPointDecomposition& c) {
  // Probe points: every cut point, its neighbours and far values.
  std::vector<double> probes{-1e300, 1e300};
  for (double z : c.z) probes.insert(probes.end(), {z, std::nextafter(z, -1e300), std::nextafter(z, 1e300)});
  for (double x : probes) {
    int hits = 0;
    for (const auto& p : c.pieces) hits += p.contains(x);
    CHECK(hits == 1);
    CHECK(c.pieces[c.locate(x)].contains(x));
  }
  double total = 0;
  for (const auto& p : c.pieces) total += p.mass;
  CHECK(total == doctest::Approx(1.0));
}

}  // namespace

TEST_SUITE("chaining") {

TEST_CASE("cut points of the uniform law") {
  const auto c = cut_points(cdf::uniform(0, 1), 0.25);
  REQUIRE(c.z.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(c.z[k] == doctest::Approx(0.25 * (k + 1)));
  int intervals = 0;
  for (const auto& p : c.pieces) {
    CHECK(p.kind == CutPiece::Kind::interval);
    if (!p.tail) {
      CHECK(p.hi_closed);
      CHECK(p.mass == doctest::Approx(0.25));
      ++intervals;
    }
  }
  CHECK(intervals == 4);
  CHECK(c.within_count_bound);
  CHECK(c.mass_ok);
  check_partition_of_r(c);
}

TEST_CASE("cut points of a point mass") {
  const auto c = cut_points(cdf::point_mass(0), 0.5);
  REQUIRE(c.pieces.size() >= 2);
  CHECK(c.pieces[0].kind == CutPiece::Kind::interval);
  CHECK_FALSE(c.pieces[0].hi_closed);
  CHECK(c.pieces[0].hi == 0.0);
  CHECK(std::isinf(c.pieces[0].lo));
  CHECK(c.pieces[1].kind == CutPiece::Kind::atom);
  CHECK(c.pieces[1].lo == 0.0);
  CHECK(c.pieces[1].mass == 1.0);
  for (std::size_t i = 2; i < c.pieces.size(); ++i) CHECK(c.pieces[i].tail);
  check_partition_of_r(c);
}

TEST_CASE("cut points of Bernoulli(0.3)") {
  const auto c = cut_points(cdf::bernoulli(0.3), 0.2);
  std::vector<CutPiece> body;
  for (const auto& p : c.pieces)
    if (!p.tail) body.push_back(p);
  REQUIRE(body.size() == 4);
  CHECK((body[0].kind == CutPiece::Kind::interval && !body[0].hi_closed && body[0].hi == 0.0));
  CHECK((body[1].kind == CutPiece::Kind::atom && body[1].lo == 0.0));
  CHECK(body[1].mass == doctest::Approx(0.7));
  CHECK((body[2].kind == CutPiece::Kind::interval && body[2].lo == 0.0 && body[2].hi == 1.0 && !body[2].hi_closed));
  CHECK((body[3].kind == CutPiece::Kind::atom && body[3].lo == 1.0));
  CHECK(body[3].mass == doctest::Approx(0.3));
  check_partition_of_r(c);
}

TEST_CASE("cut point invariants over alpha and laws") {
  RandomStream rng({5, 0}, Substream::pilot);
  std::vector<double> z(10000);
  for (double& v : z) v = rng.normal();
  const std::vector<CdfModel> laws{cdf::uniform(0, 1), cdf::bernoulli(0.3), cdf::point_mass(0),
                                   cdf::empirical(z), cdf::normal(1.0)};
  for (const auto& f : laws)
    for (int k = 2; k <= 8; ++k) {
      CAPTURE(f.describe());
      CAPTURE(k);
      const auto c = cut_points(f, std::ldexp(1.0, -k));
      CHECK(c.within_count_bound);
      CHECK(c.mass_ok);
      check_partition_of_r(c);
    }
  CHECK_THROWS(cut_points(cdf::uniform(0, 1), 1.0));
  CHECK_THROWS(cut_points(cdf::uniform(0, 1), 0.0));
}

TEST_CASE("partitions and meets") {
  auto p = Partition::from_labels({7, 7, 3, 3});
  CHECK(p.labels == std::vector<std::size_t>{0, 0, 1, 1});
  const auto q = Partition::from_labels({0, 1, 0, 1});
  const auto m = meet(p, q);
  CHECK(m.count == 4);
  CHECK(m.refines(p));
  CHECK(m.refines(q));
  CHECK_FALSE(p.refines(q));
  CHECK_THROWS(meet(p, Partition::trivial(3)));
  CHECK(admissible_card(0) == 2);
  CHECK(admissible_card(3) == 256);
  CHECK(admissible_card(7) == SIZE_MAX);
}

TEST_CASE("minimal merge") {
  // A nested input sequence is shifted by one level.
  std::vector<Partition> nested{Partition::from_labels({0, 0, 0, 0, 1, 1, 1, 1}),
                                Partition::from_labels({0, 0, 1, 1, 2, 2, 3, 3}),
                                Partition::singletons(8)};
  const auto s = minimal_merge(nested);
  REQUIRE(s.levels.size() == 5);
  CHECK(s.cards[0] == 1);
  CHECK(s.cards[1] == 1);
  for (std::size_t n = 2; n < s.levels.size(); ++n) CHECK(s.levels[n].labels == nested[n - 2].labels);
  CHECK(s.increasing());

  // Cards 4 and 16 on a 64-set: the merge has at most 64 <= 2^{2^3} cells.
  std::vector<std::size_t> a(64), b(64);
  for (std::size_t i = 0; i < 64; ++i) {
    a[i] = i % 4;
    b[i] = (i * 7) % 16;
  }
  const std::vector<Partition> two{Partition::from_labels(a), Partition::from_labels(b)};
  const auto t = minimal_merge(two);
  REQUIRE(t.levels.size() == 4);
  CHECK(t.cards[2] == 4);
  CHECK(t.cards[3] <= 64);
  CHECK(t.admissible());
  CHECK_THROWS(minimal_merge(std::vector<Partition>{Partition::trivial(3), Partition::trivial(4)}));
}

TEST_CASE("gamma sum tail") {
  const auto d = line_metric({0, 1});
  PartitionSequence seq;
  seq.push(Partition::trivial(2));
  seq.push(Partition::singletons(2));
  CHECK(gamma_sum_tail(seq, d, 0) == doctest::Approx(1.0));
  CHECK(gamma_sum_tail(seq, d, 1) == 0.0);
  PartitionSequence one;
  one.push(Partition::trivial(1));
  const auto d1 = line_metric({0});
  CHECK(gamma_sum_tail(one, d1, 0) == 0.0);
}

TEST_CASE("greedy admissible sequences") {
  const auto d1 = line_metric({0});
  const auto s1 = greedy_admissible(d1);
  CHECK(s1.levels.size() == 1);
  CHECK(s1.cards[0] == 1);

  ProcessSpec fbm;
  const auto rho = rho_table(fbm, 1.0, TimeGrid::uniform(64));
  const auto s = greedy_admissible(rho);
  CHECK(s.admissible());
  CHECK(s.increasing());
  CHECK(s.cards.back() == 64);
  // 2^{2^3} = 256 >= 64: level 3 is already singletons.
  CHECK(s.levels.size() == 4);
  double prev = 1e300;
  for (std::size_t r = 0; r < s.levels.size(); ++r) {
    const double tail = gamma_sum_tail(s, rho, r);
    CHECK(tail <= prev);
    prev = tail;
  }
  CHECK(gamma_sum_tail(s, rho, s.levels.size() - 1) == 0.0);
}

TEST_CASE("maximal separated sets") {
  const auto d = line_metric({0, 1});
  CHECK(maximal_separated_set(d, 2.0).size() == 1);
  CHECK(maximal_separated_set(d, 0.5).size() == 2);
  ProcessSpec fbm;
  const auto rho = rho_table(fbm, 1.0, TimeGrid::uniform(64));
  const auto net = maximal_separated_set(rho, 0.25);
  CHECK(net.size() <= 65536);
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j) CHECK(rho(net[i], net[j]) > 0.25);
}

TEST_CASE("product refine: singleton cell with continuous marginal") {
  ProcessSpec fbm;
  const TimeGrid grid = TimeGrid::uniform(4);
  const auto rho = rho_table(fbm, 1.0, grid);
  const auto part = product_refine(Partition::singletons(4), fbm, grid, rho, 3, 1.0);
  REQUIRE_FALSE(part.cuts.empty());
  CHECK(part.cuts[0].alpha == std::ldexp(1.0, -6));
  for (const auto& c : part.cuts) CHECK(c.pieces.size() <= 128);
  CHECK(part.cells.size() <= part.count_bound);
  CHECK(part.count_bound == std::size_t(16) * 128);
  CHECK_THROWS(product_refine(Partition::singletons(4), fbm, grid, rho, 0, 1.0));
}

TEST_CASE("product refine: uniform-marginal cell bound and MC diameters") {
  ProcessSpec lu;
  lu.family = Family::linear_u;
  const TimeGrid grid = TimeGrid::interval({0.99, 1.0});
  const auto rho = rho_table(lu, 1.0, grid);
  CHECK(rho(0, 1) == doctest::Approx(0.1));
  const auto part = product_refine(Partition::trivial(2), lu, grid, rho, 2, 1.0);
  for (const auto& cell : part.cells)
    if (cell.piece.kind == CutPiece::Kind::interval) CHECK(cell.tau_bound == doctest::Approx(1.1));
  const PathSampler s(lu, grid);
  const auto paths = s.batch(31, 0, 20000);
  for (const auto& c : check_product_cells(part, paths, lu, grid)) CHECK(c.excess <= 0);
}

TEST_CASE("product refine: atom pieces") {
  ProcessSpec c;
  c.family = Family::constant;
  c.shift_law = ShiftLaw::bernoulli;
  c.shift_p = 0.3;
  const TimeGrid grid = TimeGrid::uniform(3);
  const auto rho = rho_table(c, 1.0, grid);
  const auto part = product_refine(Partition::trivial(3), c, grid, rho, 2, 1.0);
  int atoms = 0;
  for (const auto& cell : part.cells)
    if (cell.piece.kind == CutPiece::Kind::atom) {
      ++atoms;
      CHECK(cell.tau_bound == 0.0);
    }
  CHECK(atoms == 2);
  const PathSampler s(c, grid);
  const auto paths = s.batch(32, 0, 5000);
  for (const auto& chk : check_product_cells(part, paths, c, grid)) CHECK(chk.excess <= 0);
}

TEST_CASE("product refine on fbm-shift cells") {
  ProcessSpec fbm;
  const TimeGrid grid = TimeGrid::uniform(32);
  const auto rho = rho_table(fbm, 1.0, grid);
  const auto seq = greedy_admissible(rho);
  const PathSampler s(fbm, grid);
  const auto paths = s.batch(33, 0, 20000, Exec{4});
  for (std::size_t n = 1; n <= 3 && n <= seq.levels.size(); ++n) {
    const auto part = product_refine(seq.levels[n - 1], fbm, grid, rho, n, 1.0);
    CHECK(part.cells.size() <= part.count_bound);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto k = part.locate(g, 0.3);
      CHECK(part.cells[k].piece.contains(0.3));
    }
    for (const auto& c : check_product_cells(part, paths, fbm, grid)) CHECK(c.excess <= 0);
  }
}

TEST_CASE("composition of admissible sequences") {
  ProcessSpec fbm;
  const TimeGrid grid = TimeGrid::uniform(16);
  const PathSampler s(fbm, grid);
  const auto paths = s.batch(34, 0, 5000);
  const auto rep = compose_admissible(fbm, grid, paths, 1.0, 1.0, 8, 4);
  CHECK(rep.index_sequence.admissible());
  CHECK(rep.index_sequence.increasing());
  CHECK(rep.tau_tail.size() == rep.rho_tail.size());
  CHECK(std::isfinite(rep.fitted_c));
}

}  // TEST_SUITE
