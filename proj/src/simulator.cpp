#include "sloc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sloc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// World

World::World(const Instance& inst)
    : inst_(&inst), positions_(inst.k, inst.space.origin()), routes_(inst.k) {}

Status World::status(int id) const {
  auto it = index_.find(id);
  return it == index_.end() ? Status::unreleased : status_[it->second];
}

int World::carrier(int id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : carrier_[it->second];
}

std::vector<int> World::outstanding() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < arrived_.size(); ++i) {
    if (status_[i] == Status::outstanding || status_[i] == Status::picked) out.push_back(arrived_[i].id);
  }
  return out;
}

std::vector<int> World::carried_by(int s) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < arrived_.size(); ++i) {
    if (status_[i] == Status::picked && carrier_[i] == s) out.push_back(arrived_[i].id);
  }
  return out;
}

void World::set_route(int s, std::vector<Waypoint> route) {
  if (s < 0 || s >= k()) throw Error(Errc::invalid_argument, "set_route: no server " + std::to_string(s));
  for (const auto& wp : route) {
    if (!space().contains(wp.site)) throw Error(Errc::invalid_argument, "set_route: waypoint outside the space");
  }
  routes_[s] = std::move(route);
  replanned_.push_back(s);
}

void World::note(ReplanNote n) {
  n.time = now_;
  notes_.push_back(std::move(n));
}

// ---------------------------------------------------------------------------
// Simulation

class Simulation {
 public:
  Simulation(const Instance& inst, Policy& policy, RequestOracle& oracle, const SimOptions& opts)
      : inst_(inst), space_(inst.space), policy_(policy), oracle_(oracle), opts_(opts), w_(inst),
        busy_(inst.k, false) {}

  Trace run();

 private:
  const Request& req(std::size_t i) const { return w_.arrived_[i]; }
  void event(EventKind kind, int server, int request, const Location& pos) {
    trace_.events.push_back(TraceEvent{w_.now_, kind, server, request, pos});
  }
  void drain();
  bool releases();
  bool serve(int s);
  bool pop(int s);
  bool action_done(int s, const Waypoint& wp) const;
  Location next_breakpoint(int s) const;
  void advance_to(double t);
  void check_guard();
  bool all_served() const;

  const Instance& inst_;
  const MetricSpace& space_;
  Policy& policy_;
  RequestOracle& oracle_;
  SimOptions opts_;
  World w_;
  Trace trace_;
  std::vector<bool> busy_;
  double t_max_ = 0.0;
  double guard_tour_ = -1.0;  // heuristic tour over arrived requests, computed lazily
};

void Simulation::drain() {
  if (!w_.replanned_.empty()) {
    std::vector<int> servers = w_.replanned_;
    std::sort(servers.begin(), servers.end());
    servers.erase(std::unique(servers.begin(), servers.end()), servers.end());
    event(EventKind::replan, servers.size() == 1 ? servers[0] : -1, -1,
          servers.size() == 1 ? w_.positions_[servers[0]] : space_.origin());
    for (int s : servers) busy_[s] = !w_.routes_[s].empty();
    w_.replanned_.clear();
  }
  for (auto& n : w_.notes_) trace_.replans.push_back(std::move(n));
  w_.notes_.clear();
}

bool Simulation::releases() {
  const auto next = oracle_.next_release_time();
  if (!next || *next > w_.now_ + kEps) return false;
  std::vector<Request> batch = oracle_.release(w_.now_, w_.positions_);
  for (auto& r : batch) {
    r.release = w_.now_;
    if (w_.index_.count(r.id)) throw Error(Errc::invalid_argument, "oracle reused request id " + std::to_string(r.id));
    w_.index_[r.id] = w_.arrived_.size();
    w_.arrived_.push_back(r);
    w_.status_.push_back(Status::outstanding);
    w_.carrier_.push_back(-1);
    trace_.requests.push_back(RequestRecord{r, kNaN, kNaN, -1});
    event(EventKind::release, -1, r.id, r.source);
    t_max_ = std::max(t_max_, r.release);
    guard_tour_ = -1.0;
  }
  if (batch.empty()) return false;  // held back by the oracle
  policy_.on_release(w_, batch);
  drain();
  return true;
}

bool Simulation::serve(int s) {
  const Location& pos = w_.positions_[s];
  if (!pos.is_site()) return false;
  bool changed = false;
  while (true) {
    bool progress = false;
    for (std::size_t i = 0; i < w_.arrived_.size(); ++i) {
      if (w_.status_[i] == Status::picked && w_.carrier_[i] == s && space_.same(req(i).destination, pos)) {
        w_.status_[i] = Status::served;
        trace_.requests[i].completion = w_.now_;
        event(EventKind::delivery, s, req(i).id, pos);
        oracle_.on_served(req(i), w_.now_, s);
        progress = true;
      }
    }
    for (std::size_t i = 0; i < w_.arrived_.size(); ++i) {
      if (w_.status_[i] != Status::outstanding || !space_.same(req(i).source, pos)) continue;
      if (inst_.mode == Mode::tsp) {
        w_.status_[i] = Status::served;
        trace_.requests[i].pickup = trace_.requests[i].completion = w_.now_;
        trace_.requests[i].server = s;
        event(EventKind::visit, s, req(i).id, pos);
        oracle_.on_served(req(i), w_.now_, s);
        progress = true;
      } else if (policy_.may_pickup(w_, s, req(i).id)) {
        w_.status_[i] = Status::picked;
        w_.carrier_[i] = s;
        trace_.requests[i].pickup = w_.now_;
        trace_.requests[i].server = s;
        event(EventKind::pickup, s, req(i).id, pos);
        progress = true;
      }
    }
    if (!progress) break;
    changed = true;
  }
  return changed;
}

bool Simulation::action_done(int s, const Waypoint& wp) const {
  if (wp.request < 0 || wp.act == Waypoint::Act::none) return false;
  const Status st = w_.status(wp.request);
  switch (wp.act) {
    case Waypoint::Act::visit: return st == Status::served;
    case Waypoint::Act::pickup: return st == Status::picked || st == Status::served;
    case Waypoint::Act::deliver:
      return st == Status::served || (st == Status::picked && w_.carrier(wp.request) != s);
    default: return false;
  }
}

bool Simulation::pop(int s) {
  auto& route = w_.routes_[s];
  bool changed = false;
  const auto before = route.size();
  auto prune = [&]() {
    route.erase(std::remove_if(route.begin(), route.end(), [&](const Waypoint& wp) { return action_done(s, wp); }),
                route.end());
  };
  prune();
  changed = route.size() != before;
  while (!route.empty() && space_.same(route.front().site, w_.positions_[s])) {
    // a pickup gated on being the front waypoint becomes possible only now
    if (route.front().act != Waypoint::Act::none && serve(s)) {
      prune();
      changed = true;
      continue;
    }
    event(EventKind::arrive, s, route.front().request, w_.positions_[s]);
    route.erase(route.begin());
    changed = true;
  }
  if (busy_[s] && route.empty()) {
    busy_[s] = false;
    event(EventKind::idle, s, -1, w_.positions_[s]);
    policy_.on_route_done(w_, s);
    drain();
    changed = true;
  }
  return changed;
}

Location Simulation::next_breakpoint(int s) const {
  const Location& pos = w_.positions_[s];
  const Location& target = w_.routes_[s].front().site;
  if (!space_.is_line()) return space_.step_target(pos, target);
  const double a = pos.x;
  const double b = target.x;
  double best = b;
  auto consider = [&](double x) {
    const bool between = b > a ? (x > a + kEps && x < best) : (x < a - kEps && x > best);
    if (between) best = x;
  };
  for (std::size_t i = 0; i < w_.arrived_.size(); ++i) {
    if (w_.status_[i] == Status::outstanding) consider(req(i).source.x);
    if (w_.status_[i] == Status::picked && w_.carrier_[i] == s) consider(req(i).destination.x);
  }
  return Location::point(best);
}

void Simulation::advance_to(double t) {
  const double dt = t - w_.now_;
  for (int s = 0; s < inst_.k; ++s) {
    if (w_.routes_[s].empty()) continue;
    const Location bp = next_breakpoint(s);
    const Location& pos = w_.positions_[s];
    Location np = space_.advance(pos, bp, dt);
    if (space_.dist(np, bp) <= kEps) np = bp;
    if (!(np == pos)) {
      w_.positions_[s] = np;
      trace_.paths[s].push_back(Breakpoint{t, np});
    }
  }
  w_.now_ = t;
}

bool Simulation::all_served() const {
  return std::all_of(w_.status_.begin(), w_.status_.end(), [](Status st) { return st == Status::served; });
}

void Simulation::check_guard() {
  const double d = space_.diameter();
  const double coarse = opts_.guard_factor * (t_max_ + d);
  if (w_.now_ <= coarse + 1e-6) return;
  if (guard_tour_ < 0.0) {
    const Location o = space_.origin();
    if (inst_.mode == Mode::tsp) {
      std::vector<Location> pts;
      for (const auto& r : w_.arrived_) {
        if (std::none_of(pts.begin(), pts.end(), [&](const Location& p) { return p == r.source; })) {
          pts.push_back(r.source);
        }
      }
      guard_tour_ = tsp_tour_heuristic(space_, pts, o, false).length;
    } else {
      std::vector<Block> blocks;
      for (const auto& r : w_.arrived_) blocks.push_back(Block{r.source, r.destination});
      guard_tour_ = darp_tour_heuristic(space_, blocks, o, false).length;
    }
  }
  const double limit = opts_.guard_factor * (t_max_ + inst_.k * guard_tour_ + d);
  if (w_.now_ > limit + 1e-6) {
    std::ostringstream os;
    os << "simulated time " << w_.now_ << " exceeds guard " << limit << " (policy " << policy_.name() << ", "
       << w_.outstanding().size() << " outstanding)";
    throw Error(Errc::nontermination, os.str());
  }
}

Trace Simulation::run() {
  trace_.space = space_;
  trace_.policy = policy_.name();
  trace_.branch = policy_.branch();
  trace_.mode = inst_.mode;
  trace_.ending = inst_.ending;
  trace_.k = inst_.k;
  trace_.paths.assign(inst_.k, {Breakpoint{0.0, space_.origin()}});
  const Location o = space_.origin();
  for (std::size_t step = 0;; ++step) {
    if (step > opts_.max_steps) throw Error(Errc::nontermination, "step limit exceeded");
    // settle the current instant
    for (std::size_t inner = 0;; ++inner) {
      if (inner > 100000) throw Error(Errc::stalled, "no progress within one instant");
      bool changed = releases();
      for (int s = 0; s < inst_.k; ++s) changed = serve(s) || changed;
      for (int s = 0; s < inst_.k; ++s) changed = pop(s) || changed;
      if (!changed && inst_.ending == Ending::homing && !oracle_.next_release_time() && all_served()) {
        for (int s = 0; s < inst_.k; ++s) {
          if (w_.routes_[s].empty() && !space_.same(w_.positions_[s], o)) {
            w_.routes_[s] = {Waypoint{o}};
            busy_[s] = true;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    const auto next = oracle_.next_release_time();
    if (!next && all_served()) {
      const bool home = std::all_of(w_.positions_.begin(), w_.positions_.end(),
                                    [&](const Location& p) { return space_.same(p, o); });
      if (inst_.ending == Ending::nomadic || home) break;
    }
    // a release still due at this instant was held back; wait for movement
    double tn = next && *next > w_.now_ + kEps ? *next : kInf;
    for (int s = 0; s < inst_.k; ++s) {
      if (w_.routes_[s].empty()) continue;
      tn = std::min(tn, w_.now_ + space_.dist(w_.positions_[s], next_breakpoint(s)));
    }
    if (tn == kInf) {
      std::ostringstream os;
      os << "all servers idle at t=" << w_.now_ << " with " << w_.outstanding().size()
         << " outstanding requests and no pending release (policy " << policy_.name() << ")";
      throw Error(Errc::stalled, os.str());
    }
    if (tn < w_.now_) tn = w_.now_;
    advance_to(tn);
    check_guard();
  }
  trace_.end_time = w_.now_;
  double makespan = 0.0;
  for (const auto& r : trace_.requests) makespan = std::max(makespan, r.completion);
  trace_.makespan = inst_.ending == Ending::homing ? std::max(makespan, w_.now_) : makespan;
  for (int s = 0; s < inst_.k; ++s) {
    if (trace_.paths[s].back().time < w_.now_) trace_.paths[s].push_back(Breakpoint{w_.now_, w_.positions_[s]});
  }
  event(EventKind::finish, -1, -1, o);
  return std::move(trace_);
}

Trace run(const Instance& inst, Policy& policy, RequestOracle& oracle, const SimOptions& opts) {
  Simulation sim(inst, policy, oracle, opts);
  return sim.run();
}

Trace run(const Instance& inst, Policy& policy, const SimOptions& opts) {
  auto oracle = make_oracle(inst);
  return run(inst, policy, *oracle, opts);
}

Trace run(const Instance& inst, const std::string& policy, const PolicyOptions& popts, const SimOptions& opts) {
  auto p = make_policy(policy, inst, popts);
  return run(inst, *p, opts);
}

// ---------------------------------------------------------------------------
// Audit

bool AuditReport::ok() const {
  return std::all_of(items.begin(), items.end(), [](const AuditItem& i) { return i.pass; });
}

const AuditItem* AuditReport::find(const std::string& name) const {
  for (const auto& i : items) {
    if (i.name == name) return &i;
  }
  return nullptr;
}

std::string AuditReport::describe() const {
  std::ostringstream os;
  for (const auto& i : items) {
    os << (i.skipped ? "skip" : i.pass ? "pass" : "FAIL") << "  " << i.name;
    if (!i.detail.empty()) os << "  (" << i.detail << ")";
    os << "\n";
  }
  return os.str();
}

AuditReport audit(const Trace& trace, const Instance& inst, const AuditOptions& opts) {
  AuditReport rep;
  const MetricSpace& space = trace.space;
  auto add = [&rep](std::string name, bool pass, std::string detail = {}) {
    rep.items.push_back(AuditItem{std::move(name), pass, false, std::move(detail)});
  };

  {  // unit speed
    std::string detail;
    bool ok = true;
    for (std::size_t s = 0; s < trace.paths.size() && ok; ++s) {
      const auto& p = trace.paths[s];
      for (std::size_t i = 1; i < p.size(); ++i) {
        const double dt = p[i].time - p[i - 1].time;
        const double dx = space.dist(p[i - 1].pos, p[i].pos);
        if (dt < -kEps || dx > dt * (1.0 + kEps) + kEps) {
          ok = false;
          std::ostringstream os;
          os << "server " << s << " moved " << dx << " in " << dt << " at t=" << p[i].time;
          detail = os.str();
          break;
        }
      }
    }
    add("speed-law", ok, detail);
  }
  {  // monotone event times
    bool ok = true;
    for (std::size_t i = 1; i < trace.events.size(); ++i) ok = ok && trace.events[i].time >= trace.events[i - 1].time;
    add("monotone-time", ok);
  }
  {  // completeness and never-early
    std::size_t unserved = 0;
    std::string early;
    for (const auto& r : trace.requests) {
      if (!r.served()) ++unserved;
      if (r.served() && r.pickup < r.request.release - kEps && early.empty()) {
        early = "request " + std::to_string(r.request.id) + " served before release";
      }
      if (r.served() && r.completion < r.pickup - kEps && early.empty()) {
        early = "request " + std::to_string(r.request.id) + " delivered before pickup";
      }
    }
    add("completeness", unserved == 0, unserved ? std::to_string(unserved) + " unserved" : "");
    add("never-early", early.empty(), early);
  }
  {  // makespan
    double m = 0.0;
    for (const auto& r : trace.requests) {
      if (r.served()) m = std::max(m, r.completion);
    }
    if (trace.ending == Ending::homing) m = std::max(m, trace.end_time);
    add("makespan", approx_eq(m, trace.makespan), "recomputed " + std::to_string(m));
  }
  {  // conservation
    const std::size_t n = trace.requests.size();
    bool ok = true;
    std::ostringstream os;
    if (trace.mode == Mode::darp) {
      ok = trace.count(EventKind::pickup) == n && trace.count(EventKind::delivery) == n &&
           trace.count(EventKind::visit) == 0;
      os << trace.count(EventKind::pickup) << " pickups, " << trace.count(EventKind::delivery) << " deliveries";
    } else {
      ok = trace.count(EventKind::visit) == n && trace.count(EventKind::pickup) == 0;
      os << trace.count(EventKind::visit) << " visits";
    }
    os << " for " << n << " requests";
    add("conservation", ok, os.str());
  }
  {  // service positions match the request sites
    bool ok = true;
    std::string detail;
    for (const auto& e : trace.events) {
      if (e.kind != EventKind::visit && e.kind != EventKind::pickup && e.kind != EventKind::delivery) continue;
      const RequestRecord* r = trace.find(e.request);
      if (!r) {
        ok = false;
        detail = "event for unknown request";
        break;
      }
      const Location& site = e.kind == EventKind::delivery ? r->request.destination : r->request.source;
      const Location at = position_at(trace, e.server, e.time);
      if (!space.same(at, site)) {
        ok = false;
        detail = "request " + std::to_string(e.request) + " served away from its site";
        break;
      }
    }
    add("service-position", ok, detail);
  }
  if (trace.ending == Ending::homing) {
    bool ok = true;
    for (std::size_t s = 0; s < trace.paths.size(); ++s) ok = ok && space.same(trace.paths[s].back().pos, space.origin());
    add("homing", ok);
  }
  {
    const std::size_t m = trace.requests.size();
    const std::size_t service = trace.mode == Mode::darp ? 2 * m : m;
    const std::size_t bound = 2 * m + m + service + static_cast<std::size_t>(trace.k);
    add("event-count", trace.model_event_count() + trace.count(EventKind::replan) <= bound + 1,
        std::to_string(trace.count(EventKind::replan)) + " replans");
  }
  if (opts.locality) {
    try {
      const auto v = check_spatial_locality(trace, inst);
      std::string detail;
      if (v) {
        std::ostringstream os;
        os << "request " << v->request << " gap " << v->gap << " > " << inst.delta;
        detail = os.str();
      }
      add("spatial-locality", !v.has_value(), detail);
    } catch (const Error& e) {
      add("spatial-locality", false, e.what());
    }
  } else {
    rep.items.push_back(AuditItem{"spatial-locality", true, true, "not certified for this stream"});
  }
  if (inst.arrival == Arrival::sequential) {
    const auto v = check_sequential(inst, trace);
    add("sequential", !v.has_value(), v ? "request " + std::to_string(v->request) : "");
  }
  return rep;
}

}  // namespace sloc
