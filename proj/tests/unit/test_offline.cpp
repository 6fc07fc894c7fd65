#include <doctest.h>

#include "../support/build.hpp"
#include "../support/oracles.hpp"
#include "sloc/offline.hpp"

using namespace sloc;
using K = Action::Kind;

namespace {

Instance worked(Ending end = Ending::nomadic) {
  return build::line(10, 10, 6, {{0, -4, 0}, {0, 6, 0}, {5, 3, 0}}, Mode::tsp, end);
}

Instance random_instance(Rng& rng, int m, Mode mode, int k, Ending end) {
  Instance inst;
  const bool line = rng.below(2) == 0;
  if (line) {
    inst.space = MetricSpace::line(rng.uniform(0, 10), rng.uniform(1, 10));
  } else {
    std::vector<std::pair<double, double>> p;
    for (int i = 0; i < 6; ++i) p.emplace_back(rng.uniform(0, 8), rng.uniform(0, 8));
    inst.space = MetricSpace::euclidean(p);
  }
  inst.mode = mode;
  inst.k = k;
  inst.ending = end;
  inst.delta = inst.space.diameter();
  auto site = [&]() {
    return line ? Location::point(rng.uniform(-inst.space.left_extent(), inst.space.right_extent()))
                : Location::vertex(static_cast<int>(rng.below(inst.space.size())));
  };
  for (int i = 0; i < m; ++i) {
    const Location e = site();
    const Location d = mode == Mode::tsp ? e : site();
    inst.requests.push_back(Request{i + 1, std::floor(rng.uniform(0, 12)), e, d});
  }
  std::stable_sort(inst.requests.begin(), inst.requests.end(),
                   [](const Request& a, const Request& b) { return a.release < b.release; });
  return inst;
}

}  // namespace

TEST_CASE("evaluate_schedule examples") {
  Schedule s;
  s.servers = {{{K::visit, 1}, {K::visit, 3}, {K::visit, 2}}};
  const auto ev = evaluate_schedule(s, worked());
  REQUIRE(ev.feasible);
  CHECK(ev.makespan == doctest::Approx(14));
  CHECK(ev.completion[0] == doctest::Approx(4));
  CHECK(ev.completion[2] == doctest::Approx(11));

  CHECK(evaluate_schedule(s, worked(Ending::homing)).makespan == doctest::Approx(20));
  Schedule explicit_home = s;
  explicit_home.servers[0].push_back({K::return_to_origin});
  CHECK(evaluate_schedule(explicit_home, worked(Ending::homing)).makespan == doctest::Approx(20));

  Instance empty = build::line(10, 10, 0, {});
  CHECK(evaluate_schedule(Schedule{}, empty).makespan == 0);
}

TEST_CASE("evaluate_schedule rejects broken schedules") {
  Schedule missing;
  missing.servers = {{{K::visit, 1}, {K::visit, 2}}};
  CHECK_FALSE(evaluate_schedule(missing, worked()).feasible);

  Schedule twice;
  twice.servers = {{{K::visit, 1}, {K::visit, 1}, {K::visit, 2}, {K::visit, 3}}};
  CHECK_FALSE(evaluate_schedule(twice, worked()).feasible);

  Instance darp = build::line(10, 10, 6, {{0, 2, 5}}, Mode::darp, Ending::nomadic, 2);
  Schedule early;
  early.servers = {{{K::deliver, 1}, {K::pickup, 1}}, {}};
  CHECK_FALSE(evaluate_schedule(early, darp).feasible);
  Schedule split;
  split.servers = {{{K::pickup, 1}}, {{K::deliver, 1}}};
  CHECK_FALSE(evaluate_schedule(split, darp).feasible);
  Schedule good;
  good.servers = {{{K::pickup, 1}, {K::deliver, 1}}, {}};
  CHECK(evaluate_schedule(good, darp).makespan == doctest::Approx(5));

  Schedule unknown;
  unknown.servers = {{{K::visit, 7}}};
  CHECK_FALSE(evaluate_schedule(unknown, worked()).feasible);
}

TEST_CASE("wait_until holds the server") {
  Instance one = build::line(10, 10, 6, {{0, 4, 0}});
  Schedule s;
  s.servers = {{{K::wait_until, -1, 6.0}, {K::visit, 1}}};
  CHECK(evaluate_schedule(s, one).makespan == doctest::Approx(10));
}

TEST_CASE("opt_exact examples") {
  const auto res = opt_exact(worked());
  CHECK(res.makespan == doctest::Approx(14));
  CHECK(oracle::naive_opt(worked()) == doctest::Approx(14));
  const auto replay = evaluate_schedule(res.schedule, worked());
  REQUIRE(replay.feasible);
  CHECK(replay.makespan == doctest::Approx(res.makespan));

  Instance single = build::line(10, 10, 3, {{7, 3, 0}});
  CHECK(opt_exact(single).makespan == doctest::Approx(7));

  Instance star = build::graph(MetricSpace::star(2, 2), 2, {{0, 1, 1}, {0, 2, 2}}, Mode::tsp, Ending::nomadic, 2);
  CHECK(opt_exact(star).makespan == doctest::Approx(2));
  CHECK(oracle::naive_opt(star) == doctest::Approx(2));

  CHECK(opt_exact(build::line(10, 10, 0, {})).makespan == 0);
}

TEST_CASE("opt_exact size caps") {
  Rng rng(2);
  const Instance big = random_instance(rng, 11, Mode::tsp, 1, Ending::nomadic);
  CHECK_THROWS_AS(opt_exact(big), Error);
  const auto ov = opt_value(big);
  CHECK(ov.kind == OptKind::lower_bound);
  CHECK(ov.value == doctest::Approx(opt_lower_bound(big)));
}

TEST_CASE("opt_lower_bound examples") {
  CHECK(opt_lower_bound(worked()) == doctest::Approx(14));
  CHECK(opt_lower_bound(build::line(10, 10, 0, {{0, 0, 0}, {0, 0, 0}})) == 0);
  CHECK(opt_lower_bound(build::line(10, 10, 6, {{3, 2, 5}}, Mode::darp)) == doctest::Approx(6));
}

TEST_CASE("opt_exact equals naive enumeration and dominates the lower bound") {
  Rng rng(77);
  for (int trial = 0; trial < 80; ++trial) {
    const Mode mode = trial % 2 ? Mode::darp : Mode::tsp;
    const int k = 1 + static_cast<int>(rng.below(2));
    const int m = 1 + static_cast<int>(rng.below(mode == Mode::darp ? 3 : 4));
    const Ending end = trial % 3 == 0 ? Ending::homing : Ending::nomadic;
    const Instance inst = random_instance(rng, m, mode, k, end);
    const auto res = opt_exact(inst);
    CHECK(res.makespan == doctest::Approx(oracle::naive_opt(inst)));
    CHECK(opt_lower_bound(inst) <= res.makespan + 1e-9);
    const auto ev = evaluate_schedule(res.schedule, inst);
    CHECK(ev.feasible);
    CHECK(ev.makespan == doctest::Approx(res.makespan));
    if (k == 1) {
      // evaluate_schedule's implicit waiting is never beaten by explicit waits
      if (m <= 3 && mode == Mode::tsp) CHECK(oracle::naive_opt_with_waits(inst) == doctest::Approx(res.makespan));
      Instance more = inst;
      more.k = 2;
      CHECK(opt_exact(more).makespan <= res.makespan + 1e-9);
    }
    if (end == Ending::nomadic) {
      Instance home = inst;
      home.ending = Ending::homing;
      CHECK(opt_exact(home).makespan >= res.makespan - 1e-9);
    }
  }
}

TEST_CASE("schedule JSON round trip") {
  const auto res = opt_exact(worked());
  const Schedule back = schedule_from_json(schedule_to_json(res.schedule));
  CHECK(evaluate_schedule(back, worked()).makespan == doctest::Approx(14));
  Schedule w;
  w.servers = {{{K::wait_until, -1, 2.5}, {K::visit, 1}, {K::return_to_origin}}};
  const Schedule wb = schedule_from_json(schedule_to_json(w));
  REQUIRE(wb.servers.size() == 1);
  REQUIRE(wb.servers[0].size() == 3);
  CHECK(wb.servers[0][0].kind == K::wait_until);
  CHECK(wb.servers[0][0].time == doctest::Approx(2.5));
  CHECK(wb.servers[0][2].kind == K::return_to_origin);
}
