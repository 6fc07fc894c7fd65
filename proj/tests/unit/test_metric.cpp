#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "sloc/metric.hpp"
#include "sloc/tour.hpp"

using namespace sloc;

namespace {

std::vector<Location> pts(std::initializer_list<double> xs) {
  std::vector<Location> out;
  for (double x : xs) out.push_back(Location::point(x));
  return out;
}

MetricSpace random_plane(Rng& rng, int n) {
  std::vector<std::pair<double, double>> p;
  for (int i = 0; i < n; ++i) p.emplace_back(rng.uniform(0, 10), rng.uniform(0, 10));
  return MetricSpace::euclidean(p);
}

}  // namespace

TEST_CASE("line metric is valid and has D = L + R") {
  const auto line = MetricSpace::line(10, 10);
  CHECK_FALSE(validate_metric(line).has_value());
  CHECK(line.diameter() == doctest::Approx(20));
  CHECK(line.beta() == doctest::Approx(0.5));
  CHECK(line.gamma() == doctest::Approx(0.5));
  const auto skew = MetricSpace::line(4, 16);
  CHECK(skew.beta() == doctest::Approx(0.2));
  CHECK(skew.gamma() == doctest::Approx(0.8));
}

TEST_CASE("asymmetric table reports the offending pair") {
  const auto bad = MetricSpace::from_table({{0, 5}, {4, 0}}, 0);
  const auto v = validate_metric(bad);
  REQUIRE(v.has_value());
  CHECK(v->axiom == MetricViolation::Axiom::symmetry);
  CHECK(v->a == 0);
  CHECK(v->b == 1);
  CHECK_THROWS_AS(MetricSpace::general({{0, 5}, {4, 0}}, 0), Error);
}

TEST_CASE("definiteness and triangle violations") {
  auto v = validate_metric(MetricSpace::from_table({{1, 2}, {2, 0}}, 0));
  REQUIRE(v.has_value());
  CHECK(v->axiom == MetricViolation::Axiom::definiteness);
  v = validate_metric(MetricSpace::from_table({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}, 0));
  REQUIRE(v.has_value());
  CHECK(v->axiom == MetricViolation::Axiom::triangle);
  // repair closes the table under shortest paths
  const auto fixed = MetricSpace::general({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}, 0, true);
  CHECK(fixed.table()[0][2] == doctest::Approx(2));
  CHECK_FALSE(validate_metric(fixed).has_value());
}

TEST_CASE("star metric: leaves 2*edge apart through the center") {
  const auto star = MetricSpace::star(3, 2);
  CHECK_FALSE(validate_metric(star).has_value());
  CHECK(star.dist(Location::vertex(1), Location::vertex(2)) == doctest::Approx(4));
  CHECK(star.diameter() == doctest::Approx(4));
  // leaf to leaf routes go through the center
  CHECK(star.step_target(Location::vertex(1), Location::vertex(2)) == Location::vertex(0));
  const Location mid = Location::on_edge(0, 1, 0.5);
  CHECK(star.dist(mid, Location::vertex(1)) == doctest::Approx(1.5));
  CHECK(star.dist(mid, Location::vertex(2)) == doctest::Approx(2.5));
  CHECK(star.vertices_within(Location::vertex(0), 2).size() == 4);
  CHECK(star.vertices_within(Location::vertex(0), 1.5).size() == 1);
}

TEST_CASE("metric JSON round trip") {
  const auto line = metric_from_json(nlohmann::json::parse(R"({"kind":"line","left":10,"right":10})"));
  CHECK(line.is_line());
  CHECK(line.diameter() == doctest::Approx(20));
  const auto g = metric_from_json(nlohmann::json::parse(R"({"kind":"general","dist":[[0,3],[3,0]],"origin":1})"));
  CHECK(g.origin_index() == 1);
  nlohmann::json j = g;
  const auto back = metric_from_json(j);
  CHECK(back.table() == g.table());
  CHECK_THROWS_AS(metric_from_json(nlohmann::json::parse(R"({"kind":"torus"})")), Error);
}

TEST_CASE("tsp_tour_exact examples") {
  const auto line = MetricSpace::line(10, 10);
  const auto t = tsp_tour_exact(line, pts({-4, 6, 3}), Location::point(0), false);
  CHECK(t.length == doctest::Approx(14));
  REQUIRE(t.visits.size() == 3);
  CHECK(t.visits[0].x == doctest::Approx(-4));
  CHECK(t.visits[1].x == doctest::Approx(3));
  CHECK(t.visits[2].x == doctest::Approx(6));
  CHECK(tsp_tour_exact(line, {}, Location::point(0), false).length == 0);

  const auto star = MetricSpace::star(3, 2);
  std::vector<Location> leaves = {Location::vertex(1), Location::vertex(2), Location::vertex(3)};
  CHECK(tsp_tour_exact(star, leaves, Location::vertex(0), false).length == doctest::Approx(10));
  CHECK(oracle::perm_tour_min(star, leaves, Location::vertex(0), false) == doctest::Approx(10));
}

TEST_CASE("tsp_tour_exact respects the size cap") {
  const auto line = MetricSpace::line(10, 10);
  std::vector<Location> many;
  for (int i = 0; i < 15; ++i) many.push_back(Location::point(i - 7));
  CHECK_THROWS_AS(tsp_tour_exact(line, many, Location::point(0), false), Error);
  TourCaps caps;
  caps.tsp_points = 16;
  CHECK(tsp_tour_exact(line, many, Location::point(0), false, caps).length == doctest::Approx(7 + 14));
  CHECK(tsp_tour(line, many, Location::point(0), false).heuristic);
}

TEST_CASE("heuristic tours") {
  const auto line = MetricSpace::line(10, 10);
  CHECK(tsp_tour_heuristic(line, pts({-4, 6, 3}), Location::point(0), false).length == doctest::Approx(14));
  CHECK(tsp_tour_heuristic(line, pts({7}), Location::point(0), false).length == doctest::Approx(7));
  Rng rng(5);
  std::vector<Location> p;
  for (int i = 0; i < 20; ++i) p.push_back(Location::point(rng.uniform(-10, 10)));
  const double h = tsp_tour_heuristic(line, p, Location::point(0), false).length;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Location> sub;
    for (int i = 0; i < 12; ++i) sub.push_back(p[(i * 7 + trial * 3) % 20]);
    const double e = tsp_tour_exact(line, sub, Location::point(0), false).length;
    CHECK(h >= e - 1e-9);
    CHECK(tsp_tour_heuristic(line, sub, Location::point(0), false).length >= e - 1e-9);
  }
}

TEST_CASE("exact tours equal naive permutation minima") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const bool closed = trial % 2 == 1;
    MetricSpace space = trial % 3 == 0 ? MetricSpace::line(10, 6) : random_plane(rng, 10);
    std::vector<Location> p;
    for (int i = 0; i < n; ++i) {
      p.push_back(space.is_line() ? Location::point(rng.uniform(-10, 6))
                                  : Location::vertex(static_cast<int>(rng.below(space.size()))));
    }
    const double exact = tsp_tour_exact(space, p, space.origin(), closed).length;
    CHECK(exact == doctest::Approx(oracle::perm_tour_min(space, p, space.origin(), closed)));
    const double heur = tsp_tour_heuristic(space, p, space.origin(), closed).length;
    CHECK(heur >= exact - 1e-9);
    if (n <= 3) CHECK(heur == doctest::Approx(exact));
    if (!closed) CHECK(tsp_tour_exact(space, p, space.origin(), true).length >= exact - 1e-9);
  }
}

TEST_CASE("open line tour spanning both sides is span + nearer reach") {
  const auto line = MetricSpace::line(10, 10);
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Location> p = pts({-10, 10});
    for (int i = 0; i < 5; ++i) p.push_back(Location::point(rng.uniform(-10, 10)));
    CHECK(tsp_tour_exact(line, p, Location::point(0), false).length == doctest::Approx(30));
  }
  const auto skew = MetricSpace::line(4, 16);
  // 2 min{L,R} + max{L,R}
  CHECK(tsp_tour_exact(skew, pts({-4, 16}), Location::point(0), false).length == doctest::Approx(24));
}

TEST_CASE("darp_tour_exact examples") {
  const auto line = MetricSpace::line(10, 10);
  const Location o = Location::point(0);
  std::vector<Block> one = {{Location::point(2), Location::point(5)}};
  auto t = darp_tour_exact(line, one, o, false);
  CHECK(t.length == doctest::Approx(5));
  REQUIRE(t.visits.size() == 2);
  std::vector<Block> two = {{Location::point(2), Location::point(5)}, {Location::point(-3), Location::point(-1)}};
  t = darp_tour_exact(line, two, o, false);
  CHECK(t.length == doctest::Approx(11));
  CHECK(t.order == std::vector<int>{1, 0});
  CHECK(darp_tour_exact(line, {}, o, false).length == 0);
  // source immediately precedes destination
  for (std::size_t i = 0; i < t.order.size(); ++i) {
    CHECK(t.visits[2 * i] == two[t.order[i]].first);
    CHECK(t.visits[2 * i + 1] == two[t.order[i]].second);
  }
}

TEST_CASE("darp exact equals naive block permutations") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    MetricSpace space = trial % 2 ? MetricSpace::line(8, 12) : random_plane(rng, 8);
    const int n = 1 + static_cast<int>(rng.below(6));
    std::vector<Block> blocks;
    for (int i = 0; i < n; ++i) {
      auto site = [&]() {
        return space.is_line() ? Location::point(rng.uniform(-8, 12))
                               : Location::vertex(static_cast<int>(rng.below(space.size())));
      };
      blocks.push_back(Block{site(), site()});
    }
    const bool closed = trial % 3 == 0;
    const double exact = darp_tour_exact(space, blocks, space.origin(), closed).length;
    CHECK(exact == doctest::Approx(oracle::perm_block_min(space, blocks, space.origin(), closed)));
    CHECK(darp_tour_heuristic(space, blocks, space.origin(), closed).length >= exact - 1e-9);
  }
}

TEST_CASE("k-tour min-max partition") {
  const auto line = MetricSpace::line(10, 10);
  auto kt = opt_ktour_minmax(line, pts({-8, 7}), 2, Location::point(0));
  REQUIRE(kt.tours.size() == 2);
  CHECK(kt.max_length == doctest::Approx(8));
  const double one = opt_ktour_minmax(line, pts({-4, 6, 3}), 1, Location::point(0)).max_length;
  CHECK(one == doctest::Approx(tsp_tour_exact(line, pts({-4, 6, 3}), Location::point(0), false).length));

  const auto star = MetricSpace::star(4, 2);
  std::vector<Location> leaves;
  for (int v = 1; v <= 4; ++v) leaves.push_back(Location::vertex(v));
  kt = opt_ktour_minmax(star, leaves, 2, Location::vertex(0));
  CHECK(kt.max_length == doctest::Approx(6));
  // enumerate all 2-partitions
  double best = 1e9;
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::vector<Location> a, b;
    for (int i = 0; i < 4; ++i) (mask >> i & 1u ? a : b).push_back(leaves[i]);
    best = std::min(best, std::max(oracle::perm_tour_min(star, a, Location::vertex(0), false),
                                   oracle::perm_tour_min(star, b, Location::vertex(0), false)));
  }
  CHECK(kt.max_length == doctest::Approx(best));
  std::size_t covered = 0;
  for (const auto& t : kt.tours) covered += t.order.size();
  CHECK(covered == 4);
}

TEST_CASE("k-tour partition over blocks") {
  const auto line = MetricSpace::line(10, 10);
  std::vector<Block> blocks = {{Location::point(-2), Location::point(-6)}, {Location::point(3), Location::point(8)}};
  const auto kt = opt_ktour_minmax(line, blocks, 2, Location::point(0));
  CHECK(kt.max_length == doctest::Approx(8));
}
