#include <doctest.h>

#include <sstream>

#include "sloc/adversary.hpp"
#include "sloc/harness.hpp"

using namespace sloc;
using nlohmann::json;

namespace {

Trace star_run(int n, double delta, const std::string& policy, Ending end = Ending::nomadic,
               StarOracle* keep = nullptr) {
  const Instance inst = star_instance(n, delta, end);
  PolicyOptions po;
  po.raw = true;
  auto p = make_policy(policy, inst, po);
  StarOracle local(n, delta);
  StarOracle& oracle = keep ? *keep : local;
  return run(inst, *p, oracle);
}

std::size_t data_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("star oracle release schedule for N = 2, delta = 2") {
  StarOracle oracle(2, 2);
  CHECK(oracle.t0() == doctest::Approx(4));
  CHECK(oracle.tf() == doctest::Approx(12));
  StarOracle probe(2, 2);
  const Trace t = star_run(2, 2, "arbitrary-replan", Ending::nomadic, &probe);
  std::vector<double> times;
  for (const auto& r : t.requests) times.push_back(r.request.release);
  CHECK(times == std::vector<double>{4, 4, 8, 12});
}

TEST_CASE("star oracle N = 1 ping-pong") {
  const Trace t = star_run(1, 1, "arbitrary-replan");
  CHECK(t.requests.size() == 2);
}

TEST_CASE("star parameter checks") {
  CHECK_NOTHROW(check_star_parameters(10, 2));
  CHECK_THROWS_AS(check_star_parameters(5, 2), Error);
  CHECK_THROWS_AS(check_star_parameters(0, 1), Error);
  CHECK_THROWS_AS(check_star_parameters(4, 0.5), Error);
  CHECK_THROWS_AS(star_instance(5, 2), Error);
}

TEST_CASE("constructed star schedule") {
  const StarOpt two = star_opt_schedule(2, 2);
  CHECK(evaluate_schedule(two.schedule, two.instance).makespan == doctest::Approx(12));
  const StarOpt home = star_opt_schedule(2, 2, Ending::homing);
  CHECK(evaluate_schedule(home.schedule, home.instance).makespan == doctest::Approx(14));
  const StarOpt fifty = star_opt_schedule(50, 2);
  CHECK(evaluate_schedule(fifty.schedule, fifty.instance).makespan == doctest::Approx(204));
  CHECK(fifty.instance.requests.size() == 100);
  // the canonical sequence is small enough to check against the exact solver at N = 2
  CHECK(opt_exact(two.instance).makespan <= 12 + 1e-9);
}

TEST_CASE("star adversary forces a long online makespan") {
  for (const std::string policy : {"arbitrary-replan", "replan-baseline"}) {
    double prev = 0.0;
    for (int n : {10, 20}) {
      const Instance inst = star_instance(n, 2);
      const Trace t = star_run(n, 2, policy);
      const Instance real = realized_instance(t, inst);
      CHECK(real.requests.size() == static_cast<std::size_t>(2 * n));
      const double opt = evaluate_schedule(star_schedule(real), real).makespan;
      const double ratio = t.makespan / opt;
      CHECK(ratio >= prev - 1e-9);
      prev = ratio;
      CHECK(audit(t, real).ok());
    }
  }
}

TEST_CASE("sweep families") {
  SweepBase base;
  base.generator.m = 4;
  const auto betas = sweep_family(SweepKind::beta, {0, 0.25, 0.5}, base, 1);
  REQUIRE(betas.size() == 3);
  CHECK(betas[0].space.left_extent() == doctest::Approx(0));
  CHECK(betas[1].space.left_extent() == doctest::Approx(5));
  CHECK(betas[2].space.left_extent() == doctest::Approx(10));
  const auto gammas = sweep_family(SweepKind::gamma, {0.5, 1.0}, base, 1);
  CHECK(gammas[0].space.gamma() == doctest::Approx(0.5));
  CHECK(gammas[1].space.left_extent() == doctest::Approx(0));
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(i / 10.0);
  const auto deltas = sweep_family(SweepKind::delta, grid, base, 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool active = spatial_branch_active("line-switch", deltas[i]);
    const double formula = 1 + (1 + grid[i]) / 1.5;
    CHECK(active == (formula < 2.04));
  }
  CHECK_THROWS_AS(sweep_family(SweepKind::beta, {0.6}, base, 1), Error);
  CHECK_THROWS_AS(sweep_family(SweepKind::gamma, {0.4}, base, 1), Error);
  CHECK_THROWS_AS(sweep_family(SweepKind::delta, {1.5}, base, 1), Error);
  CHECK(sweep_family(SweepKind::delta, grid, base, 3)[2].generator == sweep_family(SweepKind::delta, grid, base, 3)[2].generator);
}

TEST_CASE("theoretical bound examples") {
  BoundParams p;
  p.policy = "line-switch";
  p.delta = 0.3;
  p.beta = 0.5;
  Bound b = theoretical_bound(p);
  CHECK(b.value == doctest::Approx(1 + 1.3 / 1.5));
  CHECK(b.testable);
  CHECK(b.formula == "1+(1+d)/(1+b)");
  p.delta = 0.55;
  b = theoretical_bound(p);
  CHECK(b.value == doctest::Approx(2.0333).epsilon(1e-4));
  CHECK(b.testable);
  p.delta = 0.7;
  b = theoretical_bound(p);
  CHECK_FALSE(b.testable);
  CHECK(b.value == doctest::Approx(2.04));

  BoundParams a;
  a.policy = "arbitrary-replan";
  a.delta = 0;
  CHECK(theoretical_bound(a).value == doctest::Approx(2.0));
  a.delta = 0.5;
  CHECK(theoretical_bound(a).value == doctest::Approx(2.41));
  a.mode = Mode::darp;
  a.delta = 0.45;
  CHECK(theoretical_bound(a).value == doctest::Approx(2.45));

  BoundParams missing;
  missing.policy = "line-switch";
  missing.delta = 0.1;
  CHECK_THROWS_AS(theoretical_bound(missing), Error);
  BoundParams ml;
  ml.policy = "multi-line";
  ml.k = 2;
  ml.delta = 0.02;
  CHECK_THROWS_AS(theoretical_bound(ml), Error);
  ml.gamma = 0.5;
  CHECK(theoretical_bound(ml).value == doctest::Approx(2.04));

  CHECK(safe_ratio(0, 0) == 1.0);
  CHECK(within_flag(1.5, Bound{2.0, "2+d", true}, OptKind::lower_bound) == "pass");
  CHECK(within_flag(2.5, Bound{2.0, "2+d", true}, OptKind::lower_bound) == "unknown");
  CHECK(within_flag(2.5, Bound{2.0, "2+d", true}, OptKind::exact) == "fail");
}

TEST_CASE("single run experiment") {
  const json cfg = json::parse(R"({
    "policies": ["line-switch"],
    "instances": [{"space":{"kind":"line","left":10,"right":10},"mode":"tsp","delta":6,
                   "requests":[{"id":1,"t":0,"e":-4},{"id":2,"t":0,"e":6},{"id":3,"t":5,"e":3}]}]
  })");
  const Report rep = run_experiment(experiment_from_json(cfg));
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].ratio == doctest::Approx(1.0));
  CHECK(rep.rows[0].within == "pass");
  CHECK(rep.rows[0].status == "ok");
  REQUIRE(rep.summary.size() == 1);
  CHECK(rep.summary[0].max_ratio == doctest::Approx(rep.rows[0].ratio));
  const std::string csv = to_csv(rep.rows);
  CHECK(csv.rfind("#schema=1\n", 0) == 0);
}

TEST_CASE("experiment CSV is deterministic across parallelism") {
  const json cfg = json::parse(R"({
    "policies": ["line-switch", "arbitrary-replan", "replan-baseline"],
    "repetitions": 2,
    "family": {"kind": "delta-sweep", "grid": [0.1, 0.2, 0.3],
               "base": {"generator": {"law": "uniform", "low": 0, "high": 3, "m": 6}}}
  })");
  ExperimentConfig one = experiment_from_json(cfg);
  one.parallelism = 1;
  ExperimentConfig many = experiment_from_json(cfg);
  many.parallelism = 4;
  const Report a = run_experiment(one);
  const Report b = run_experiment(many);
  CHECK(a.rows.size() == 18);
  CHECK(to_csv(a.rows, false) == to_csv(b.rows, false));
  for (const auto& s : a.summary) {
    for (const auto& r : a.rows) {
      if (r.policy == s.policy && r.bound.formula == s.formula) CHECK(s.max_ratio >= r.ratio);
    }
  }
  for (const auto& r : a.rows) CHECK(r.status == "ok");
  const std::string dat = emit_plotdata(a.rows, PlotKind::ratio_vs_delta);
  CHECK(dat.find("# curve:") != std::string::npos);
  const std::string overlay = emit_plotdata(a.rows, PlotKind::bound_overlay);
  CHECK(overlay.find("2+d") != std::string::npos);
  CHECK(overlay.find("lit-2.41") != std::string::npos);
}

TEST_CASE("ratio-vs-delta has one data row per grid point") {
  std::vector<RatioRow> rows;
  for (int i = 1; i <= 9; ++i) {
    RatioRow r;
    r.policy = "replan-baseline";
    r.delta = i / 10.0;
    r.ratio = 1.2;
    r.bound = Bound{std::nan(""), "none", false};
    r.status = "ok";
    rows.push_back(r);
  }
  CHECK(data_rows(emit_plotdata(rows, PlotKind::ratio_vs_delta)) == 9);
  CHECK_THROWS_AS(emit_plotdata({}, PlotKind::ratio_vs_n), Error);
}

TEST_CASE("star grid experiment") {
  const json cfg = json::parse(R"({"policies": ["arbitrary-replan"], "opt": "constructed",
                                   "star": {"n": [10, 20], "delta": 2}})");
  const Report rep = run_experiment(experiment_from_json(cfg));
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[1].ratio >= rep.rows[0].ratio - 1e-9);
  CHECK(rep.rows[0].opt_kind == OptKind::constructed);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(experiment_from_json(json::parse(R"({"policies": []})")), Error);
  CHECK_THROWS_AS(experiment_from_json(json::parse(R"({"policies": ["x"], "repetitions": 3, "seeds": [1]})")),
                  Error);
  CHECK_THROWS_AS(experiment_from_json(json::parse(R"({"policies": ["x"], "opt": "guess"})")), Error);
}
