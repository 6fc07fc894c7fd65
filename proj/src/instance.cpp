#include "sloc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "sloc/trace.hpp"

namespace sloc {

using nlohmann::json;

std::string_view to_string(Mode m) { return m == Mode::tsp ? "tsp" : "darp"; }
std::string_view to_string(Ending e) { return e == Ending::nomadic ? "nomadic" : "homing"; }
std::string_view to_string(Arrival a) { return a == Arrival::sequential ? "sequential" : "general"; }

std::string_view to_string(GeneratorSpec::Law law) {
  switch (law) {
    case GeneratorSpec::Law::fixed_interval: return "fixed-interval";
    case GeneratorSpec::Law::uniform: return "uniform";
    case GeneratorSpec::Law::burst: return "burst";
    case GeneratorSpec::Law::sequential: return "sequential";
  }
  return "?";
}

double Instance::t_max() const {
  double t = 0.0;
  for (const auto& r : requests) t = std::max(t, r.release);
  return t;
}

void validate_instance(const Instance& inst) {
  auto fail = [](const std::string& msg) { throw Error(Errc::schema_violation, msg); };
  if (inst.k < 1) fail("k must be >= 1");
  if (!(inst.delta >= 0.0)) fail("delta must be >= 0");
  if (inst.delta > inst.space.diameter() + kEps) {
    std::ostringstream os;
    os << "delta " << inst.delta << " exceeds diameter " << inst.space.diameter();
    fail(os.str());
  }
  std::set<int> ids;
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    const Request& r = inst.requests[i];
    const std::string where = "requests[" + std::to_string(i) + "]";
    if (!(r.release >= 0.0)) fail(where + ".t: release time must be >= 0");
    if (!inst.space.contains(r.source)) fail(where + ".e: source outside the space");
    if (!inst.space.contains(r.destination)) fail(where + ".d: destination outside the space");
    if (inst.mode == Mode::tsp && !(r.source == r.destination)) fail(where + ".d: TSP requests need d == e");
    if (!ids.insert(r.id).second) fail(where + ".id: duplicate request id " + std::to_string(r.id));
    if (inst.arrival == Arrival::sequential && i > 0 && approx_eq(r.release, inst.requests[i - 1].release)) {
      fail(where + ".t: batch release in sequential mode");
    }
  }
  if (inst.generator) {
    const auto& g = *inst.generator;
    if (g.m < 0) fail("generator.m must be >= 0");
    if (g.interval < 0.0 || g.low < 0.0 || g.high < g.low || g.gap < 0.0 || g.burst < 1) {
      fail("generator: invalid law parameters");
    }
  }
}

// ---------------------------------------------------------------------------
// Oracles

FixedOracle::FixedOracle(std::vector<Request> requests) : requests_(std::move(requests)) {
  std::stable_sort(requests_.begin(), requests_.end(), [](const Request& a, const Request& b) {
    return a.release < b.release || (a.release == b.release && a.id < b.id);
  });
}

std::optional<double> FixedOracle::next_release_time() const {
  if (next_ >= requests_.size()) return std::nullopt;
  return requests_[next_].release;
}

std::vector<Request> FixedOracle::release(double t, std::span<const Location> /*servers*/) {
  std::vector<Request> out;
  while (next_ < requests_.size() && requests_[next_].release <= t + kEps) out.push_back(requests_[next_++]);
  return out;
}

AdaptiveRandomOracle::AdaptiveRandomOracle(MetricSpace space, Mode mode, int k, double delta, GeneratorSpec spec)
    : space_(std::move(space)), mode_(mode), k_(k), delta_(delta), spec_(spec), rng_(spec.seed) {
  using Law = GeneratorSpec::Law;
  double t = 0.0;
  switch (spec_.law) {
    case Law::fixed_interval:
      for (int i = 0; i < spec_.m; ++i) instants_.push_back(i * spec_.interval);
      break;
    case Law::uniform:
      for (int i = 0; i < spec_.m; ++i) {
        t += rng_.uniform(spec_.low, spec_.high);
        instants_.push_back(t);
      }
      break;
    case Law::burst:
      for (int i = 0; i < spec_.m; ++i) instants_.push_back((i / spec_.burst) * spec_.interval);
      break;
    case Law::sequential:
      if (spec_.m > 0) sequential_next_ = 0.0;
      break;
  }
}

std::optional<double> AdaptiveRandomOracle::next_release_time() const {
  if (spec_.law == GeneratorSpec::Law::sequential) {
    if (emitted_ >= spec_.m) return std::nullopt;
    if (sequential_next_) return *sequential_next_;
    return std::numeric_limits<double>::infinity();  // waiting for the outstanding request
  }
  if (next_instant_ >= instants_.size()) return std::nullopt;
  return instants_[next_instant_];
}

std::optional<Request> AdaptiveRandomOracle::sample(int id, double t, std::span<const Location> servers) {
  Request r;
  r.id = id;
  r.release = t;
  std::vector<int> candidates;
  std::vector<std::vector<int>> balls(servers.size());
  for (std::size_t s = 0; s < servers.size(); ++s) {
    if (space_.is_line()) {
      candidates.push_back(static_cast<int>(s));
    } else {
      balls[s] = space_.vertices_within(servers[s], delta_);
      if (!balls[s].empty()) candidates.push_back(static_cast<int>(s));
    }
  }
  if (candidates.empty()) return std::nullopt;  // every server is mid-edge; retried at the next vertex
  const int s = candidates[rng_.below(candidates.size())];
  if (space_.is_line()) {
    const double p = servers[s].x;
    const double lo = std::max(-space_.left_extent(), p - delta_);
    const double hi = std::min(space_.right_extent(), p + delta_);
    r.source = Location::point(lo + (hi - lo) * rng_.uniform());
  } else {
    r.source = Location::vertex(balls[s][rng_.below(balls[s].size())]);
  }
  if (mode_ == Mode::darp) {
    if (space_.is_line()) {
      r.destination = Location::point(rng_.uniform(-space_.left_extent(), space_.right_extent()));
    } else {
      r.destination = Location::vertex(static_cast<int>(rng_.below(space_.size())));
    }
  } else {
    r.destination = r.source;
  }
  return r;
}

std::vector<Request> AdaptiveRandomOracle::release(double t, std::span<const Location> servers) {
  std::vector<Request> out;
  if (spec_.law == GeneratorSpec::Law::sequential) {
    if (emitted_ < spec_.m && sequential_next_ && *sequential_next_ <= t + kEps) {
      auto r = sample(emitted_ + 1, t, servers);
      if (!r) return out;
      ++emitted_;
      out.push_back(*r);
      sequential_pending_ = r->id;
      sequential_next_.reset();
    }
    return out;
  }
  while (next_instant_ < instants_.size() && instants_[next_instant_] <= t + kEps) {
    auto r = sample(emitted_ + 1, t, servers);
    if (!r) break;
    ++next_instant_;
    ++emitted_;
    out.push_back(*r);
  }
  return out;
}

void AdaptiveRandomOracle::on_served(const Request& request, double t, int /*server*/) {
  if (spec_.law != GeneratorSpec::Law::sequential || request.id != sequential_pending_) return;
  sequential_pending_ = -1;
  if (emitted_ < spec_.m) sequential_next_ = t + spec_.gap * rng_.uniform();
}

std::unique_ptr<RequestOracle> make_oracle(const Instance& inst) {
  if (inst.generator) {
    return std::make_unique<AdaptiveRandomOracle>(inst.space, inst.mode, inst.k, inst.delta, *inst.generator);
  }
  return std::make_unique<FixedOracle>(inst.requests);
}

// ---------------------------------------------------------------------------
// Checks

std::optional<LocalityViolation> check_spatial_locality(const Trace& trace, const Instance& inst) {
  for (const auto& rec : trace.requests) {
    const double t = rec.request.release;
    if (t > trace.end_time + kEps) {
      throw Error(Errc::missing_position, "trace ends before release of request " + std::to_string(rec.request.id));
    }
    double gap = std::numeric_limits<double>::infinity();
    for (int s = 0; s < static_cast<int>(trace.paths.size()); ++s) {
      if (trace.paths[s].empty()) {
        throw Error(Errc::missing_position, "no positions recorded for server " + std::to_string(s));
      }
      gap = std::min(gap, trace.space.dist(position_at(trace, s, t), rec.request.source));
    }
    if (gap > inst.delta + kEps) return LocalityViolation{rec.request.id, gap};
  }
  return std::nullopt;
}

std::optional<SequenceViolation> check_sequential(const Instance& /*inst*/, const Trace& trace) {
  for (std::size_t i = 1; i < trace.requests.size(); ++i) {
    const auto& prev = trace.requests[i - 1];
    const auto& cur = trace.requests[i];
    const double done = prev.served() ? prev.completion : std::numeric_limits<double>::infinity();
    if (cur.request.release < done - kEps) {
      return SequenceViolation{cur.request.id, cur.request.release, done};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

GeneratorSpec::Law law_from_string(const std::string& s) {
  if (s == "fixed-interval") return GeneratorSpec::Law::fixed_interval;
  if (s == "uniform") return GeneratorSpec::Law::uniform;
  if (s == "burst") return GeneratorSpec::Law::burst;
  if (s == "sequential") return GeneratorSpec::Law::sequential;
  throw Error(Errc::schema_violation, "generator.law: unknown law '" + s + "'");
}

template <typename T>
T field(const json& j, const char* name, const std::string& where) {
  if (!j.contains(name)) throw Error(Errc::schema_violation, where + ": missing field '" + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::schema_violation, where + "." + name + ": wrong type");
  }
}

}  // namespace

json generator_to_json(const GeneratorSpec& g) {
  json j = {{"law", to_string(g.law)}, {"m", g.m}, {"seed", g.seed}};
  switch (g.law) {
    case GeneratorSpec::Law::fixed_interval: j["interval"] = g.interval; break;
    case GeneratorSpec::Law::uniform:
      j["low"] = g.low;
      j["high"] = g.high;
      break;
    case GeneratorSpec::Law::burst:
      j["interval"] = g.interval;
      j["burst"] = g.burst;
      break;
    case GeneratorSpec::Law::sequential: j["gap"] = g.gap; break;
  }
  return j;
}

GeneratorSpec generator_from_json(const json& g) {
  if (!g.is_object()) throw Error(Errc::schema_violation, "generator must be an object");
  GeneratorSpec spec;
  spec.law = law_from_string(g.value("law", "fixed-interval"));
  spec.m = field<int>(g, "m", "generator");
  spec.seed = g.value("seed", std::uint64_t{0});
  spec.interval = g.value("interval", 1.0);
  spec.low = g.value("low", 0.0);
  spec.high = g.value("high", 1.0);
  spec.burst = g.value("burst", 2);
  spec.gap = g.value("gap", 0.0);
  return spec;
}

json request_to_json(const MetricSpace& space, const Request& r) {
  return {{"id", r.id}, {"t", r.release}, {"e", site_to_json(space, r.source)}, {"d", site_to_json(space, r.destination)}};
}

json instance_to_json(const Instance& inst) {
  json j;
  j["space"] = inst.space;
  j["mode"] = to_string(inst.mode);
  j["ending"] = to_string(inst.ending);
  j["k"] = inst.k;
  j["delta"] = inst.delta;
  j["arrival"] = to_string(inst.arrival);
  j["requests"] = json::array();
  for (const auto& r : inst.requests) j["requests"].push_back(request_to_json(inst.space, r));
  if (inst.generator) j["generator"] = generator_to_json(*inst.generator);
  return j;
}

Instance instance_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::schema_violation, "instance must be a JSON object");
  Instance inst;
  if (!j.contains("space")) throw Error(Errc::schema_violation, "instance: missing field 'space'");
  inst.space = metric_from_json(j.at("space"));
  const std::string mode = j.value("mode", "tsp");
  if (mode != "tsp" && mode != "darp") throw Error(Errc::schema_violation, "mode: expected tsp|darp");
  inst.mode = mode == "tsp" ? Mode::tsp : Mode::darp;
  const std::string ending = j.value("ending", "nomadic");
  if (ending != "nomadic" && ending != "homing") throw Error(Errc::schema_violation, "ending: expected nomadic|homing");
  inst.ending = ending == "nomadic" ? Ending::nomadic : Ending::homing;
  const std::string arrival = j.value("arrival", "general");
  if (arrival != "sequential" && arrival != "general") {
    throw Error(Errc::schema_violation, "arrival: expected sequential|general");
  }
  inst.arrival = arrival == "sequential" ? Arrival::sequential : Arrival::general;
  inst.k = j.contains("k") ? field<int>(j, "k", "instance") : 1;
  inst.delta = field<double>(j, "delta", "instance");
  if (j.contains("requests")) {
    const json& reqs = j.at("requests");
    if (!reqs.is_array()) throw Error(Errc::schema_violation, "requests: expected an array");
    for (std::size_t i = 0; i < reqs.size(); ++i) {
      const std::string where = "requests[" + std::to_string(i) + "]";
      const json& rj = reqs[i];
      Request r;
      r.id = rj.contains("id") ? field<int>(rj, "id", where) : static_cast<int>(i + 1);
      r.release = field<double>(rj, "t", where);
      if (!rj.contains("e")) throw Error(Errc::schema_violation, where + ": missing field 'e'");
      try {
        r.source = site_from_json(inst.space, rj.at("e"));
        r.destination = rj.contains("d") ? site_from_json(inst.space, rj.at("d")) : r.source;
      } catch (const Error& e) {
        throw Error(Errc::schema_violation, where + ": " + e.what());
      }
      inst.requests.push_back(r);
    }
  }
  if (j.contains("generator")) inst.generator = generator_from_json(j.at("generator"));
  std::stable_sort(inst.requests.begin(), inst.requests.end(), [](const Request& a, const Request& b) {
    return a.release < b.release || (a.release == b.release && a.id < b.id);
  });
  validate_instance(inst);
  return inst;
}

Instance instance_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(Errc::parse_error, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  return instance_from_json(j);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_string(ss.str());
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << instance_to_json(inst).dump(2) << "\n";
}

}  // namespace sloc
