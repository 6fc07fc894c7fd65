#include "sloc/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sloc {

void check_star_parameters(int leaves, double delta) {
  if (leaves < 1 || delta < 1.0 || std::floor(delta) != delta) {
    throw Error(Errc::divisibility_violated, "star adversary needs N >= 1 and an integer delta >= 1");
  }
  if (std::fmod(static_cast<double>(leaves), delta) != 0.0) {
    throw Error(Errc::divisibility_violated,
                "N = " + std::to_string(leaves) + " is not a multiple of delta = " + std::to_string(delta));
  }
}

StarOracle::StarOracle(int leaves, double delta) : leaves_(leaves), delta_(delta), outstanding_(leaves + 1, 0) {
  check_star_parameters(leaves, delta);
}

std::optional<double> StarOracle::next_release_time() const {
  if (round_ > leaves_) return std::nullopt;
  return t0() + 2.0 * delta_ * round_;
}

std::vector<Request> StarOracle::release(double t, std::span<const Location> /*servers*/) {
  std::vector<Request> out;
  if (round_ > leaves_ || t + kEps < t0() + 2.0 * delta_ * round_) return out;
  auto make = [&](int leaf) {
    Request r;
    r.id = next_id_++;
    r.release = t;
    r.source = r.destination = Location::vertex(leaf);
    ++outstanding_[leaf];
    out.push_back(r);
  };
  if (round_ == 0) {
    for (int leaf = 1; leaf <= leaves_; ++leaf) make(leaf);
  } else {
    int leaf = last_served_;
    if (!served_since_release_ || leaf < 1) {
      leaf = 1;
      for (int v = 2; v <= leaves_; ++v) {
        if (outstanding_[v] < outstanding_[leaf]) leaf = v;
      }
      ++fallback_releases_;
    }
    make(leaf);
  }
  served_since_release_ = false;
  ++round_;
  return out;
}

void StarOracle::on_served(const Request& request, double /*t*/, int /*server*/) {
  const int leaf = request.source.node;
  if (leaf < 1 || leaf > leaves_) return;
  --outstanding_[leaf];
  last_served_ = leaf;
  served_since_release_ = true;
}

Instance star_instance(int leaves, double delta, Ending ending) {
  check_star_parameters(leaves, delta);
  Instance inst;
  inst.space = MetricSpace::star(leaves, delta);
  inst.mode = Mode::tsp;
  inst.ending = ending;
  inst.k = 1;
  inst.delta = delta;
  inst.arrival = Arrival::general;
  return inst;
}

Schedule star_schedule(const Instance& realized) {
  // leaf -> (last release, request ids)
  std::map<int, std::pair<double, std::vector<int>>> leaves;
  for (const auto& r : realized.requests) {
    auto& entry = leaves[r.source.node];
    entry.first = std::max(entry.first, r.release);
    entry.second.push_back(r.id);
  }
  std::vector<std::pair<double, int>> order;
  for (const auto& [leaf, entry] : leaves) order.emplace_back(entry.first, leaf);
  std::sort(order.begin(), order.end());
  Schedule s;
  s.servers.assign(1, {});
  for (const auto& [last, leaf] : order) {
    for (int id : leaves[leaf].second) s.servers[0].push_back(Action{Action::Kind::visit, id, 0.0});
  }
  if (realized.ending == Ending::homing) s.servers[0].push_back(Action{Action::Kind::return_to_origin});
  const Evaluation ev = evaluate_schedule(s, realized);
  s.makespan = ev.makespan;
  return s;
}

StarOpt star_opt_schedule(int leaves, double delta, Ending ending) {
  StarOpt out{star_instance(leaves, delta, ending), {}};
  const double t0 = delta * delta;
  int id = 1;
  for (int leaf = 1; leaf <= leaves; ++leaf) {
    out.instance.requests.push_back(Request{id++, t0, Location::vertex(leaf), Location::vertex(leaf)});
  }
  for (int i = 1; i <= leaves; ++i) {
    const double t = t0 + 2.0 * delta * i;
    out.instance.requests.push_back(Request{id++, t, Location::vertex(i), Location::vertex(i)});
  }
  out.schedule = star_schedule(out.instance);
  return out;
}

SweepKind sweep_kind_from_string(const std::string& s) {
  if (s == "delta-sweep" || s == "delta") return SweepKind::delta;
  if (s == "beta-sweep" || s == "beta") return SweepKind::beta;
  if (s == "gamma-sweep" || s == "gamma") return SweepKind::gamma;
  throw Error(Errc::invalid_argument, "unknown sweep kind '" + s + "'");
}

std::vector<Instance> sweep_family(SweepKind kind, const std::vector<double>& grid, const SweepBase& base,
                                   std::uint64_t seed) {
  std::vector<Instance> out;
  const double d = base.diameter;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double g = grid[i];
    Instance inst;
    inst.mode = base.mode;
    inst.ending = base.ending;
    inst.k = base.k;
    double delta_ratio = base.delta;
    switch (kind) {
      case SweepKind::delta:
        if (g < 0.0 || g > 1.0) throw Error(Errc::invalid_argument, "delta grid values must lie in [0, 1]");
        delta_ratio = g;
        inst.space = base.space ? *base.space : MetricSpace::line(base.beta * d, (1.0 - base.beta) * d);
        break;
      case SweepKind::beta:
        if (g < 0.0 || g > 0.5) throw Error(Errc::invalid_argument, "beta grid values must lie in [0, 1/2]");
        inst.space = MetricSpace::line(g * d, (1.0 - g) * d);
        break;
      case SweepKind::gamma:
        if (g < 0.5 || g > 1.0) throw Error(Errc::invalid_argument, "gamma grid values must lie in [1/2, 1]");
        inst.space = MetricSpace::line((1.0 - g) * d, g * d);
        break;
    }
    inst.delta = delta_ratio * inst.space.diameter();
    GeneratorSpec gen = base.generator;
    gen.seed = seed + i;
    inst.generator = gen;
    validate_instance(inst);
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace sloc
