#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "../support/build.hpp"
#include "sloc/simulator.hpp"

using namespace sloc;

namespace {

Instance worked() {
  return build::line(10, 10, 6, {{0, -4, 0}, {0, 6, 0}, {5, 3, 0}});
}

}  // namespace

TEST_CASE("worked instance validates and round-trips through JSON") {
  const Instance inst = worked();
  CHECK_NOTHROW(validate_instance(inst));
  CHECK(inst.t_max() == doctest::Approx(5));
  CHECK(inst.delta_ratio() == doctest::Approx(0.3));
  const Instance back = instance_from_json(instance_to_json(inst));
  CHECK(back.requests == inst.requests);
  CHECK(back.delta == inst.delta);
  CHECK(back.space.diameter() == inst.space.diameter());

  const auto path = (std::filesystem::temp_directory_path() / "sloc_roundtrip.json").string();
  save_instance(inst, path);
  const Instance loaded = load_instance(path);
  CHECK(loaded.requests == inst.requests);
  CHECK(loaded.mode == inst.mode);
  CHECK(loaded.ending == inst.ending);
  std::remove(path.c_str());
}

TEST_CASE("schema violations") {
  auto expect_schema = [](const std::string& text) {
    try {
      instance_from_string(text);
      FAIL("accepted: " << text);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::schema_violation);
    }
  };
  // delta larger than the diameter
  expect_schema(R"({"space":{"kind":"line","left":10,"right":10},"mode":"tsp","delta":25,"requests":[]})");
  // negative release time
  expect_schema(
      R"({"space":{"kind":"line","left":10,"right":10},"mode":"tsp","delta":2,"requests":[{"id":1,"t":-1,"e":0}]})");
  // source outside the segment
  expect_schema(
      R"({"space":{"kind":"line","left":10,"right":10},"mode":"tsp","delta":2,"requests":[{"id":1,"t":0,"e":11}]})");
  // duplicate ids
  expect_schema(
      R"({"space":{"kind":"line","left":10,"right":10},"mode":"tsp","delta":2,"requests":[{"id":1,"t":0,"e":1},{"id":1,"t":0,"e":2}]})");
}

TEST_CASE("malformed JSON is a parse error") {
  try {
    instance_from_string("{\"space\": ");
    FAIL("accepted malformed text");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
  }
}

TEST_CASE("batch releases are rejected in sequential mode") {
  Instance inst = build::line(10, 10, 6, {{0, -4, 0}, {0, 6, 0}});
  inst.arrival = Arrival::sequential;
  CHECK_THROWS_AS(validate_instance(inst), Error);
}

TEST_CASE("generator block round trip") {
  const Instance inst = instance_from_string(
      R"({"space":{"kind":"line","left":10,"right":10},"mode":"tsp","delta":3,
          "generator":{"law":"fixed-interval","interval":3.0,"m":10,"seed":42}})");
  REQUIRE(inst.generator.has_value());
  CHECK(inst.generator->m == 10);
  CHECK(inst.generator->seed == 42);
  CHECK(generator_from_json(generator_to_json(*inst.generator)) == *inst.generator);
}

TEST_CASE("adaptive oracle with m = 0 emits nothing") {
  GeneratorSpec g;
  g.m = 0;
  AdaptiveRandomOracle oracle(MetricSpace::line(10, 10), Mode::tsp, 1, 3, g);
  CHECK_FALSE(oracle.next_release_time().has_value());
}

TEST_CASE("radius-zero ball yields the server position") {
  GeneratorSpec g;
  g.m = 5;
  g.interval = 1.0;
  g.seed = 9;
  AdaptiveRandomOracle oracle(MetricSpace::line(10, 10), Mode::tsp, 1, 0.0, g);
  std::vector<Location> pos = {Location::point(2.5)};
  while (auto t = oracle.next_release_time()) {
    for (const auto& r : oracle.release(*t, pos)) CHECK(r.source.x == doctest::Approx(2.5));
  }
}

TEST_CASE("star ball sampling stays on center and leaves") {
  GeneratorSpec g;
  g.m = 200;
  g.seed = 3;
  AdaptiveRandomOracle oracle(MetricSpace::star(4, 2), Mode::tsp, 1, 2.0, g);
  std::vector<Location> pos = {Location::vertex(0)};
  std::set<int> seen;
  while (auto t = oracle.next_release_time()) {
    for (const auto& r : oracle.release(*t, pos)) {
      CHECK(r.source.is_site());
      seen.insert(r.source.node);
    }
  }
  CHECK(seen == std::set<int>{0, 1, 2, 3, 4});
}

TEST_CASE("adaptive line sources stay within delta of the server and inside the segment") {
  GeneratorSpec g;
  g.m = 100;
  g.law = GeneratorSpec::Law::uniform;
  g.low = 0.5;
  g.high = 2.0;
  g.seed = 21;
  AdaptiveRandomOracle oracle(MetricSpace::line(4, 16), Mode::darp, 1, 3.0, g);
  std::vector<Location> pos = {Location::point(-3.5)};
  double last = 0.0;
  while (auto t = oracle.next_release_time()) {
    CHECK(*t >= last);
    last = *t;
    for (const auto& r : oracle.release(*t, pos)) {
      CHECK(std::abs(r.source.x + 3.5) <= 3.0 + 1e-12);
      CHECK(r.source.x >= -4.0);
      CHECK(r.destination.x >= -4.0);
      CHECK(r.destination.x <= 16.0);
    }
  }
}

TEST_CASE("check_spatial_locality examples") {
  // boundary inclusion: source exactly delta away at t = 0
  Instance edge = build::line(10, 10, 2, {{0, 2, 0}});
  Trace t1 = run(edge, "replan-baseline");
  CHECK_FALSE(check_spatial_locality(t1, edge).has_value());

  Instance far = build::line(10, 10, 2, {{0, 5, 0}});
  Trace t2 = run(far, "replan-baseline");
  const auto v = check_spatial_locality(t2, far);
  REQUIRE(v.has_value());
  CHECK(v->request == 1);
  CHECK(v->gap == doctest::Approx(5));

  // worked instance under line-switch: server at -3 when source 3 arrives
  Instance w = worked();
  Trace t3 = run(w, "line-switch");
  CHECK(position_at(t3, 0, 5).x == doctest::Approx(-3));
  CHECK_FALSE(check_spatial_locality(t3, w).has_value());
  // monotone in delta
  Instance wider = w;
  wider.delta = 9;
  CHECK_FALSE(check_spatial_locality(t3, wider).has_value());
  Instance narrow = w;
  narrow.delta = 5.5;
  CHECK(check_spatial_locality(t3, narrow).has_value());
}

TEST_CASE("check_sequential examples") {
  Instance one = build::line(10, 10, 6, {{0, -4, 0}});
  one.arrival = Arrival::sequential;
  CHECK_FALSE(check_sequential(one, run(one, "seq-greedy")).has_value());

  Instance ok = build::line(10, 10, 6, {{0, -4, 0}, {4, 1, 0}});
  ok.arrival = Arrival::sequential;
  const Trace tr = run(ok, "seq-greedy");
  CHECK_FALSE(check_sequential(ok, tr).has_value());
  CHECK(tr.find(2)->completion == doctest::Approx(9));

  // r2 released before r1 is served: replay on a policy that accepts overlap
  Instance bad = build::line(10, 10, 6, {{0, -4, 0}, {2, 1, 0}});
  const Trace tb = run(bad, "replan-baseline");
  const auto v = check_sequential(bad, tb);
  REQUIRE(v.has_value());
  CHECK(v->request == 2);
  bad.arrival = Arrival::sequential;
  CHECK_THROWS_AS(run(bad, "seq-greedy"), Error);
}
