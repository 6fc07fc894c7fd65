#include "sloc/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double route_length(const MetricSpace& space, Location pos, const std::vector<Waypoint>& route) {
  double len = 0.0;
  for (const auto& wp : route) {
    len += space.dist(pos, wp.site);
    pos = wp.site;
  }
  return len;
}

// Distinct sources of the given requests, first-seen order.
struct SiteGroup {
  Location site;
  std::vector<int> ids;
};

std::vector<SiteGroup> group_sources(const World& w, const std::vector<int>& ids) {
  std::vector<SiteGroup> groups;
  for (int id : ids) {
    const Location& e = w.request(id).source;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const SiteGroup& g) { return g.site == e; });
    if (it == groups.end()) {
      groups.push_back(SiteGroup{e, {id}});
    } else {
      it->ids.push_back(id);
    }
  }
  return groups;
}

std::vector<int> all_ids(const World& w) {
  std::vector<int> ids;
  for (const auto& r : w.arrived()) ids.push_back(r.id);
  return ids;
}

int first_unserved(const World& w, const SiteGroup& g) {
  for (int id : g.ids) {
    if (!w.served(id)) return id;
  }
  return -1;
}

std::vector<Location> sites_of(const std::vector<SiteGroup>& groups) {
  std::vector<Location> pts;
  for (const auto& g : groups) pts.push_back(g.site);
  return pts;
}

// Block policies only pick up the request their route is heading to.
bool front_pickup(const World& w, int server, int id) {
  const auto& r = w.route(server);
  return !r.empty() && r.front().act == Waypoint::Act::pickup && r.front().request == id;
}

void append_block(const World& w, int server, int id, std::vector<Waypoint>& route) {
  const Request& r = w.request(id);
  const Status st = w.status(id);
  if (st == Status::outstanding) {
    route.push_back(Waypoint{r.source, id, Waypoint::Act::pickup});
    route.push_back(Waypoint{r.destination, id, Waypoint::Act::deliver});
  } else if (st == Status::picked && w.carrier(id) == server) {
    route.push_back(Waypoint{r.destination, id, Waypoint::Act::deliver});
  }
}

double min_server_gap(const World& w, const Location& site) {
  double gap = kInf;
  for (const auto& p : w.positions()) gap = std::min(gap, w.space().dist(p, site));
  return gap;
}

// ---------------------------------------------------------------------------
// Line sweeps

struct SweepInput {
  std::vector<std::pair<double, double>> unpicked;  // (source, destination)
  std::vector<double> carried;                      // destinations
};

bool has_targets(const SweepInput& in) { return !in.unpicked.empty() || !in.carried.empty(); }

std::pair<double, double> target_extremes(const SweepInput& in) {
  double lo = kInf;
  double hi = -kInf;
  // an unpicked destination still has to be visited, so it counts too
  for (const auto& u : in.unpicked) {
    lo = std::min({lo, u.first, u.second});
    hi = std::max({hi, u.first, u.second});
  }
  for (double c : in.carried) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  return {lo, hi};
}

// Alternating-direction legs. Each leg runs to the farthest target in the
// current heading, extended while requests picked up on the way have their
// destination further ahead. Returns the turn points.
std::vector<double> sweep_turns(double x, int dir, SweepInput in) {
  std::vector<double> turns;
  auto ahead = [](double from, double p, int d) { return (p - from) * d > kEps; };
  auto within = [](double from, double to, double p, int d) {
    return (p - from) * d >= -kEps && (to - p) * d >= -kEps;
  };
  double cur = x;
  for (int guard = 0; has_targets(in) && guard < 8 * static_cast<int>(in.unpicked.size() + in.carried.size()) + 8;
       ++guard) {
    // everything at the current point is handled in place
    for (auto it = in.carried.begin(); it != in.carried.end();) {
      it = std::abs(*it - cur) <= kEps ? in.carried.erase(it) : it + 1;
    }
    for (auto it = in.unpicked.begin(); it != in.unpicked.end();) {
      if (std::abs(it->first - cur) <= kEps) {
        if (std::abs(it->second - cur) > kEps) in.carried.push_back(it->second);
        it = in.unpicked.erase(it);
      } else {
        ++it;
      }
    }
    if (!has_targets(in)) break;
    bool any = false;
    double reach = cur;
    for (const auto& u : in.unpicked) {
      if (ahead(cur, u.first, dir)) {
        any = true;
        if ((u.first - reach) * dir > 0) reach = u.first;
      }
    }
    for (double c : in.carried) {
      if (ahead(cur, c, dir)) {
        any = true;
        if ((c - reach) * dir > 0) reach = c;
      }
    }
    if (!any) {
      dir = -dir;
      continue;
    }
    std::vector<double> fresh;  // picked on this leg, destination behind the pickup
    for (bool changed = true; changed;) {
      changed = false;
      for (auto it = in.unpicked.begin(); it != in.unpicked.end();) {
        if (!within(cur, reach, it->first, dir)) {
          ++it;
          continue;
        }
        const double src = it->first;
        const double dst = it->second;
        if ((dst - src) * dir >= -kEps) {
          if ((dst - reach) * dir > kEps) {
            reach = dst;
            changed = true;
          }
        } else {
          fresh.push_back(dst);
        }
        it = in.unpicked.erase(it);
      }
    }
    for (auto it = in.carried.begin(); it != in.carried.end();) {
      it = within(cur, reach, *it, dir) ? in.carried.erase(it) : it + 1;
    }
    in.carried.insert(in.carried.end(), fresh.begin(), fresh.end());
    turns.push_back(reach);
    cur = reach;
    dir = -dir;
  }
  return turns;
}

SweepInput sweep_input(const World& w, int server, const std::vector<int>& owned_unpicked) {
  SweepInput in;
  for (int id : owned_unpicked) {
    const Request& r = w.request(id);
    in.unpicked.emplace_back(r.source.x, r.destination.x);
  }
  for (int id : w.carried_by(server)) in.carried.push_back(w.request(id).destination.x);
  return in;
}

// Nearer extreme first when targets straddle pos, otherwise straight to the farther one.
int switch_direction(double pos, const SweepInput& in) {
  const auto [lo, hi] = target_extremes(in);
  if (hi <= pos + kEps) return -1;
  if (lo >= pos - kEps) return +1;
  return pos - lo <= hi - pos ? -1 : +1;
}

std::vector<Waypoint> turns_route(const std::vector<double>& turns) {
  std::vector<Waypoint> route;
  for (double x : turns) route.push_back(Waypoint{Location::point(x)});
  return route;
}

// ---------------------------------------------------------------------------

class SeqGreedy final : public Policy {
 public:
  std::string name() const override { return "seq-greedy"; }
  void on_release(World& w, std::span<const Request> batch) override {
    if (batch.size() > 1) {
      throw Error(Errc::sequentiality_violated,
                  std::to_string(batch.size()) + " requests released together at t=" + std::to_string(w.now()));
    }
    for (int id : w.outstanding()) {
      if (id != batch.front().id && !completes_here(w, id)) {
        throw Error(Errc::sequentiality_violated, "request " + std::to_string(batch.front().id) +
                                                      " released while request " + std::to_string(id) +
                                                      " is outstanding");
      }
    }
    const Request& r = batch.front();
    if (w.mode() == Mode::tsp) {
      w.set_route(0, {Waypoint{r.source, r.id, Waypoint::Act::visit}});
    } else {
      w.set_route(0, {Waypoint{r.source, r.id, Waypoint::Act::pickup},
                      Waypoint{r.destination, r.id, Waypoint::Act::deliver}});
    }
  }

 private:
  // Releases are processed before service at an instant, so a request whose
  // service falls on the same instant still counts as finished.
  static bool completes_here(const World& w, int id) {
    const Request& r = w.request(id);
    const Location& pos = w.position(0);
    const bool at_end = w.space().same(pos, r.destination);
    if (w.status(id) == Status::picked) return at_end;
    return at_end && w.space().same(pos, r.source);
  }
};

class LineSwitch final : public Policy {
 public:
  explicit LineSwitch(bool alternate) : alternate_(alternate) {}
  std::string name() const override { return alternate_ ? "line-sweep-alt" : "line-switch"; }
  void on_release(World& w, std::span<const Request> /*batch*/) override { replan(w); }
  void on_route_done(World& w, int /*server*/) override {
    if (!w.outstanding().empty()) replan(w);
  }

 private:
  void replan(World& w) {
    std::vector<int> unpicked;
    for (int id : w.outstanding()) {
      if (w.status(id) == Status::outstanding) unpicked.push_back(id);
    }
    const SweepInput in = sweep_input(w, 0, unpicked);
    if (!has_targets(in)) return;
    const double pos = w.position(0).x;
    int dir = 0;
    if (!alternate_) {
      dir = switch_direction(pos, in);
    } else {
      const auto& route = w.route(0);
      if (!route.empty() && std::abs(route.front().site.x - pos) > kEps) {
        heading_ = route.front().site.x > pos ? 1 : -1;
      } else if (heading_ == 0) {
        heading_ = switch_direction(pos, in);
      }
      const auto [lo, hi] = target_extremes(in);
      const bool ahead = heading_ > 0 ? hi > pos + kEps : lo < pos - kEps;
      dir = ahead ? heading_ : -heading_;
    }
    const auto turns = sweep_turns(pos, dir, in);
    if (!turns.empty()) heading_ = turns.front() > pos ? 1 : -1;
    w.set_route(0, turns_route(turns));
  }

  bool alternate_;
  int heading_ = 0;
};

class ArbitraryReplan final : public Policy {
 public:
  ArbitraryReplan(bool strict, TourCaps caps) : strict_(strict), caps_(caps) {}
  std::string name() const override { return "arbitrary-replan"; }
  void on_release(World& w, std::span<const Request> /*batch*/) override { replan(w); }
  void on_route_done(World& w, int /*server*/) override {
    if (!w.outstanding().empty()) replan(w);
  }
  bool may_pickup(const World& w, int server, int id) const override { return front_pickup(w, server, id); }

 private:
  void replan(World& w) {
    const MetricSpace& space = w.space();
    const Location o = space.origin();
    const Location pos = w.position(0);
    const bool homing = w.instance().ending == Ending::homing;
    ReplanNote note;
    note.server = 0;
    note.policy = name();
    std::vector<Waypoint> route;
    Location first_site;
    bool check_locality = false;
    if (w.mode() == Mode::tsp) {
      const auto groups = group_sources(w, all_ids(w));
      const Tour tour = tsp_tour(space, sites_of(groups), o, homing, caps_);
      note.reference_length = tour.length;
      note.heuristic = tour.heuristic;
      bool started = false;
      for (int gi : tour.order) {
        const int id = first_unserved(w, groups[gi]);
        if (id < 0) continue;
        if (!started) {
          started = true;
          note.first_request = id;
          first_site = groups[gi].site;
          check_locality = true;
        }
        route.push_back(Waypoint{groups[gi].site, id, Waypoint::Act::visit});
      }
    } else {
      std::vector<Block> blocks;
      const auto ids = all_ids(w);
      for (int id : ids) blocks.push_back(Block{w.request(id).source, w.request(id).destination});
      const Tour tour = darp_tour(space, blocks, o, homing, caps_);
      note.reference_length = tour.length;
      note.heuristic = tour.heuristic;
      bool started = false;
      for (int bi : tour.order) {
        const int id = ids[bi];
        if (w.served(id)) continue;
        if (!started) {
          started = true;
          note.first_request = id;
          first_site = w.request(id).source;
          check_locality = w.status(id) == Status::outstanding;
        }
        append_block(w, 0, id, route);
      }
    }
    if (route.empty()) return;
    if (homing) route.push_back(Waypoint{o});
    note.plan_length = route_length(space, pos, route);
    note.first_gap = space.dist(pos, first_site);
    note.locality_ok = !check_locality || note.first_gap <= w.delta() + kEps;
    note.owner_ok = note.locality_ok;
    note.length_ok = note.plan_length <= note.reference_length + w.delta() + kEps;
    const bool violated = !note.locality_ok;
    const double gap = note.first_gap;
    w.note(note);
    if (violated && strict_) {
      throw Error(Errc::lemma3_violated, "first outstanding request " + std::to_string(note.first_request) +
                                             " is " + std::to_string(gap) + " from the server");
    }
    w.set_route(0, std::move(route));
  }

  bool strict_;
  TourCaps caps_;
};

class MultiLine final : public Policy {
 public:
  std::string name() const override { return "multi-line"; }
  void on_release(World& w, std::span<const Request> batch) override {
    bool touched[2] = {false, false};
    for (const auto& r : batch) touched[side(r.source.x)] = true;
    for (int s = 0; s < 2; ++s) {
      if (touched[s]) replan(w, s);
    }
  }
  void on_route_done(World& w, int server) override {
    if (server < 2) replan(w, server);
  }

 private:
  static int side(double x) { return x < 0.0 ? 0 : 1; }
  void replan(World& w, int s) {
    std::vector<int> owned;
    for (int id : w.outstanding()) {
      if (w.status(id) == Status::outstanding && side(w.request(id).source.x) == s) owned.push_back(id);
    }
    const SweepInput in = sweep_input(w, s, owned);
    if (!has_targets(in)) return;
    const double pos = w.position(s).x;
    w.set_route(s, turns_route(sweep_turns(pos, switch_direction(pos, in), in)));
  }
};

class MultiArbitrary final : public Policy {
 public:
  explicit MultiArbitrary(TourCaps caps) : caps_(caps) {}
  std::string name() const override { return "multi-arbitrary"; }
  void on_release(World& w, std::span<const Request> /*batch*/) override { replan(w); }
  void on_route_done(World& w, int /*server*/) override {
    if (!w.outstanding().empty()) replan(w);
  }
  bool may_pickup(const World& w, int server, int id) const override { return front_pickup(w, server, id); }

 private:
  struct Plan {
    std::vector<Waypoint> route;
    double length = 0.0;
    int first_request = -1;
    Location first_site;
    bool check = false;
  };

  void replan(World& w) {
    const MetricSpace& space = w.space();
    const Location o = space.origin();
    const int k = w.k();
    const bool homing = w.instance().ending == Ending::homing;
    const auto ids = all_ids(w);
    KTours kt;
    std::vector<SiteGroup> groups;
    std::vector<int> tour_of(ids.size(), -1);  // DARP: block index -> tour
    if (w.mode() == Mode::tsp) {
      groups = group_sources(w, ids);
      kt = opt_ktour_minmax(space, sites_of(groups), k, o, homing, caps_);
    } else {
      std::vector<Block> blocks;
      for (int id : ids) blocks.push_back(Block{w.request(id).source, w.request(id).destination});
      kt = opt_ktour_minmax(space, blocks, k, o, homing, caps_);
      for (int j = 0; j < k; ++j) {
        for (int bi : kt.tours[j].order) tour_of[bi] = j;
      }
    }
    std::vector<std::vector<Plan>> plans(k, std::vector<Plan>(k));
    for (int s = 0; s < k; ++s) {
      for (int j = 0; j < k; ++j) plans[s][j] = build(w, s, j, kt, groups, ids, tour_of, homing);
    }
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_max = kInf;
    double best_sum = kInf;
    do {
      double mx = 0.0;
      double sum = 0.0;
      for (int s = 0; s < k; ++s) {
        mx = std::max(mx, plans[s][perm[s]].length);
        sum += plans[s][perm[s]].length;
      }
      if (mx < best_max - kEps || (mx <= best_max + kEps && sum < best_sum - kEps)) {
        best_max = mx;
        best_sum = sum;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int s = 0; s < k; ++s) {
      Plan& p = plans[s][best[s]];
      const Tour& tour = kt.tours[best[s]];
      if (p.first_request >= 0) {
        ReplanNote note;
        note.server = s;
        note.policy = name();
        note.plan_length = p.length;
        note.reference_length = tour.length;
        note.first_request = p.first_request;
        note.first_gap = min_server_gap(w, p.first_site);
        note.locality_ok = !p.check || note.first_gap <= w.delta() + kEps;
        note.owner_ok = !p.check || space.dist(w.position(s), p.first_site) <= w.delta() + kEps;
        note.length_ok = p.length <= tour.length + w.delta() + kEps;
        note.heuristic = kt.heuristic;
        w.note(note);
      }
      if (!p.route.empty() || !w.route(s).empty()) w.set_route(s, std::move(p.route));
    }
  }

  Plan build(const World& w, int s, int j, const KTours& kt, const std::vector<SiteGroup>& groups,
             const std::vector<int>& ids, const std::vector<int>& tour_of, bool homing) const {
    const MetricSpace& space = w.space();
    Plan p;
    const Tour& tour = kt.tours[j];
    if (w.mode() == Mode::tsp) {
      for (int gi : tour.order) {
        const int id = first_unserved(w, groups[gi]);
        if (id < 0) continue;
        if (p.first_request < 0) {
          p.first_request = id;
          p.first_site = groups[gi].site;
          p.check = true;
        }
        p.route.push_back(Waypoint{groups[gi].site, id, Waypoint::Act::visit});
      }
    } else {
      // carried requests whose block now belongs to another tour: deliver first, nearest next
      std::vector<int> stray;
      for (int id : w.carried_by(s)) {
        const auto bi = std::find(ids.begin(), ids.end(), id) - ids.begin();
        if (tour_of[bi] != j) stray.push_back(id);
      }
      Location at = w.position(s);
      while (!stray.empty()) {
        auto it = std::min_element(stray.begin(), stray.end(), [&](int a, int b) {
          return space.dist(at, w.request(a).destination) < space.dist(at, w.request(b).destination) - kEps;
        });
        at = w.request(*it).destination;
        p.route.push_back(Waypoint{at, *it, Waypoint::Act::deliver});
        stray.erase(it);
      }
      for (int bi : tour.order) {
        const int id = ids[bi];
        const Status st = w.status(id);
        if (st == Status::served || (st == Status::picked && w.carrier(id) != s)) continue;
        if (p.first_request < 0) {
          p.first_request = id;
          p.first_site = w.request(id).source;
          p.check = st == Status::outstanding;
        }
        append_block(w, s, id, p.route);
      }
    }
    if (homing && !p.route.empty()) p.route.push_back(Waypoint{space.origin()});
    p.length = route_length(space, w.position(s), p.route);
    return p;
  }

  TourCaps caps_;
};

class ReplanBaseline final : public Policy {
 public:
  explicit ReplanBaseline(TourCaps caps) : caps_(caps) {}
  std::string name() const override { return "replan-baseline"; }
  void on_release(World& w, std::span<const Request> /*batch*/) override { replan(w); }
  void on_route_done(World& w, int /*server*/) override {
    if (!w.outstanding().empty()) replan(w);
  }
  bool may_pickup(const World& w, int server, int id) const override {
    return w.mode() == Mode::tsp || front_pickup(w, server, id);
  }

 private:
  void replan(World& w) {
    const MetricSpace& space = w.space();
    const int k = w.k();
    // unpicked requests go to the nearest server, carried ones stay with their carrier
    std::vector<std::vector<int>> mine(k);
    for (int id : w.outstanding()) {
      if (w.status(id) == Status::picked) {
        mine[w.carrier(id)].push_back(id);
        continue;
      }
      int best = 0;
      for (int s = 1; s < k; ++s) {
        if (space.dist(w.position(s), w.request(id).source) < space.dist(w.position(best), w.request(id).source) - kEps) {
          best = s;
        }
      }
      mine[best].push_back(id);
    }
    for (int s = 0; s < k; ++s) {
      std::vector<Waypoint> route;
      const Location pos = w.position(s);
      if (w.mode() == Mode::tsp) {
        const auto groups = group_sources(w, mine[s]);
        const Tour tour = tsp_tour(space, sites_of(groups), pos, false, caps_);
        for (int gi : tour.order) route.push_back(Waypoint{groups[gi].site, groups[gi].ids.front(), Waypoint::Act::visit});
      } else {
        std::vector<Block> blocks;
        for (int id : mine[s]) {
          const Request& r = w.request(id);
          blocks.push_back(w.status(id) == Status::picked ? Block{r.destination, r.destination}
                                                          : Block{r.source, r.destination});
        }
        const Tour tour = darp_tour(space, blocks, pos, false, caps_);
        for (int bi : tour.order) append_block(w, s, mine[s][bi], route);
      }
      if (!route.empty() || !w.route(s).empty()) w.set_route(s, std::move(route));
    }
  }

  TourCaps caps_;
};

void require(bool ok, const std::string& name, const std::string& why) {
  if (!ok) throw Error(Errc::policy_incompatible, name + ": " + why);
}

}  // namespace

// ---------------------------------------------------------------------------

Dispatch::Dispatch(std::unique_ptr<Policy> spatial, std::unique_ptr<Policy> fallback, bool use_spatial)
    : spatial_(std::move(spatial)), fallback_(std::move(fallback)), use_spatial_(use_spatial) {}

void Dispatch::on_release(World& w, std::span<const Request> batch) {
  ++(use_spatial_ ? spatial_calls_ : fallback_calls_);
  active().on_release(w, batch);
}

void Dispatch::on_route_done(World& w, int server) {
  ++(use_spatial_ ? spatial_calls_ : fallback_calls_);
  active().on_route_done(w, server);
}

bool Dispatch::may_pickup(const World& w, int server, int id) const {
  ++(use_spatial_ ? spatial_calls_ : fallback_calls_);
  return active().may_pickup(w, server, id);
}

bool spatial_branch_active(const std::string& name, const Instance& inst) {
  const double delta = inst.delta_ratio();
  const bool tsp = inst.mode == Mode::tsp;
  if (name == "line-switch" || name == "line-sweep-alt") {
    const double y = 1.0 + (1.0 + delta) / (1.0 + inst.space.beta());
    return y < (tsp ? 2.04 : 2.457);
  }
  if (name == "arbitrary-replan") return delta < (tsp ? 0.41 : 0.457);
  if (name == "multi-line") return 2.0 + delta / inst.space.gamma() < 2.04;
  if (name == "multi-arbitrary") return 2.0 * (1.0 + delta) < (tsp ? 2.41 : 2.457);
  return true;
}

const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names = {"seq-greedy",       "line-switch",     "line-sweep-alt",
                                                 "arbitrary-replan", "multi-line",      "multi-arbitrary",
                                                 "replan-baseline"};
  return names;
}

std::unique_ptr<Policy> make_policy(const std::string& name, const Instance& inst, const PolicyOptions& opts) {
  const bool line = inst.space.is_line();
  std::unique_ptr<Policy> p;
  if (name == "seq-greedy") {
    require(inst.k == 1, name, "needs k = 1");
    return std::make_unique<SeqGreedy>();
  }
  if (name == "replan-baseline") return std::make_unique<ReplanBaseline>(opts.caps);
  if (name == "line-switch" || name == "line-sweep-alt") {
    require(line, name, "needs a line space");
    require(inst.k == 1, name, "needs k = 1");
    p = std::make_unique<LineSwitch>(name == "line-sweep-alt");
  } else if (name == "arbitrary-replan") {
    require(inst.k == 1, name, "needs k = 1");
    p = std::make_unique<ArbitraryReplan>(opts.strict_lemma3, opts.caps);
  } else if (name == "multi-line") {
    require(line, name, "needs a line space");
    require(inst.k >= 2, name, "needs k >= 2");
    require(inst.mode == Mode::tsp, name, "TSP mode only");
    p = std::make_unique<MultiLine>();
  } else if (name == "multi-arbitrary") {
    require(inst.k >= 2, name, "needs k >= 2");
    p = std::make_unique<MultiArbitrary>(opts.caps);
  } else {
    throw Error(Errc::invalid_argument, "unknown policy '" + name + "'");
  }
  if (opts.raw) return p;
  return std::make_unique<Dispatch>(std::move(p), std::make_unique<ReplanBaseline>(opts.caps),
                                    spatial_branch_active(name, inst));
}

}  // namespace sloc
