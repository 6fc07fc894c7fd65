#include "sloc/offline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>

namespace sloc {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int index_of(const Instance& inst, int id) {
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    if (inst.requests[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

std::string_view to_string(Action::Kind kind) {
  switch (kind) {
    case Action::Kind::visit: return "visit";
    case Action::Kind::pickup: return "pickup";
    case Action::Kind::deliver: return "deliver";
    case Action::Kind::wait_until: return "wait-until";
    case Action::Kind::return_to_origin: return "return-to-origin";
  }
  return "?";
}

std::string_view to_string(OptKind kind) {
  switch (kind) {
    case OptKind::exact: return "exact";
    case OptKind::lower_bound: return "lower-bound";
    case OptKind::constructed: return "constructed";
  }
  return "?";
}

Evaluation evaluate_schedule(const Schedule& schedule, const Instance& inst) {
  Evaluation ev;
  const std::size_t m = inst.requests.size();
  ev.completion.assign(m, std::numeric_limits<double>::quiet_NaN());
  std::vector<int> picked_by(m, -1);
  std::vector<char> done(m, 0);
  const Location o = inst.space.origin();
  auto fail = [&ev](std::string why) {
    ev.feasible = false;
    ev.reason = std::move(why);
    return ev;
  };
  if (static_cast<int>(schedule.servers.size()) > inst.k) return fail("schedule uses more than k servers");
  double makespan = 0.0;
  for (std::size_t s = 0; s < schedule.servers.size(); ++s) {
    Location pos = o;
    double t = 0.0;
    for (const Action& a : schedule.servers[s]) {
      const std::string who = "server " + std::to_string(s) + ": ";
      if (a.kind == Action::Kind::wait_until) {
        t = std::max(t, a.time);
        continue;
      }
      if (a.kind == Action::Kind::return_to_origin) {
        t += inst.space.dist(pos, o);
        pos = o;
        continue;
      }
      const int i = index_of(inst, a.request);
      if (i < 0) return fail(who + "unknown request " + std::to_string(a.request));
      const Request& r = inst.requests[i];
      if (done[i]) return fail(who + "request " + std::to_string(r.id) + " served twice");
      switch (a.kind) {
        case Action::Kind::visit:
          if (inst.mode == Mode::darp) return fail(who + "visit action in DARP mode");
          t = std::max(t + inst.space.dist(pos, r.source), r.release);
          pos = r.source;
          done[i] = 1;
          ev.completion[i] = t;
          break;
        case Action::Kind::pickup:
          if (picked_by[i] >= 0) return fail(who + "request " + std::to_string(r.id) + " picked twice");
          t = std::max(t + inst.space.dist(pos, r.source), r.release);
          pos = r.source;
          picked_by[i] = static_cast<int>(s);
          if (inst.mode == Mode::tsp) {
            done[i] = 1;
            ev.completion[i] = t;
          }
          break;
        case Action::Kind::deliver:
          if (picked_by[i] != static_cast<int>(s)) {
            return fail(who + "delivery of request " + std::to_string(r.id) + " before its pickup by this server");
          }
          t += inst.space.dist(pos, r.destination);
          pos = r.destination;
          done[i] = 1;
          ev.completion[i] = t;
          break;
        default: break;
      }
    }
    if (inst.ending == Ending::homing) {
      t += inst.space.dist(pos, o);
      makespan = std::max(makespan, t);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!done[i]) return fail("request " + std::to_string(inst.requests[i].id) + " unserved");
    makespan = std::max(makespan, ev.completion[i]);
  }
  ev.feasible = true;
  ev.makespan = makespan;
  return ev;
}

namespace {

// Best single-server finish time for every subset of requests, with the action
// sequence recoverable per subset.
struct SubsetValues {
  std::vector<double> value;  // indexed by bitmask
  std::function<std::vector<Action>(unsigned)> witness;
};

SubsetValues tsp_subsets(const Instance& inst) {
  const int m = static_cast<int>(inst.requests.size());
  const unsigned full = 1u << m;
  const Location o = inst.space.origin();
  std::vector<double> d0(m), home(m);
  std::vector<std::vector<double>> d(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i) {
    d0[i] = inst.space.dist(o, inst.requests[i].source);
    home[i] = inst.space.dist(inst.requests[i].source, o);
    for (int j = 0; j < m; ++j) d[i][j] = inst.space.dist(inst.requests[i].source, inst.requests[j].source);
  }
  auto f = std::make_shared<std::vector<double>>(static_cast<std::size_t>(full) * m, kInf);
  auto parent = std::make_shared<std::vector<int>>(static_cast<std::size_t>(full) * m, -1);
  auto at = [m](unsigned s, int j) { return static_cast<std::size_t>(s) * m + j; };
  for (int j = 0; j < m; ++j) (*f)[at(1u << j, j)] = std::max(d0[j], inst.requests[j].release);
  for (unsigned s = 1; s < full; ++s) {
    for (int i = 0; i < m; ++i) {
      if (!(s >> i & 1u)) continue;
      const double fi = (*f)[at(s, i)];
      if (fi == kInf) continue;
      for (int j = 0; j < m; ++j) {
        if (s >> j & 1u) continue;
        const unsigned t = s | (1u << j);
        const double cand = std::max(fi + d[i][j], inst.requests[j].release);
        if (cand < (*f)[at(t, j)] - kEps) {
          (*f)[at(t, j)] = cand;
          (*parent)[at(t, j)] = i;
        }
      }
    }
  }
  const bool homing = inst.ending == Ending::homing;
  SubsetValues out;
  out.value.assign(full, kInf);
  std::vector<int> last(full, -1);
  out.value[0] = 0.0;
  for (unsigned s = 1; s < full; ++s) {
    for (int j = 0; j < m; ++j) {
      if (!(s >> j & 1u)) continue;
      const double v = (*f)[at(s, j)] + (homing ? home[j] : 0.0);
      if (v < out.value[s] - kEps) {
        out.value[s] = v;
        last[s] = j;
      }
    }
  }
  const Instance* ip = &inst;
  out.witness = [f, parent, last, m, ip, at](unsigned s) {
    std::vector<Action> seq;
    int j = last[s];
    unsigned cur = s;
    while (j >= 0) {
      seq.push_back(Action{Action::Kind::visit, ip->requests[j].id, 0.0});
      const int p = (*parent)[at(cur, j)];
      cur &= ~(1u << j);
      j = p;
    }
    std::reverse(seq.begin(), seq.end());
    (void)m;
    return seq;
  };
  return out;
}

SubsetValues darp_subsets(const Instance& inst) {
  const int m = static_cast<int>(inst.requests.size());
  const int locs = 2 * m + 1;  // 2i source, 2i+1 destination, 2m origin
  std::vector<Location> site(locs);
  for (int i = 0; i < m; ++i) {
    site[2 * i] = inst.requests[i].source;
    site[2 * i + 1] = inst.requests[i].destination;
  }
  site[2 * m] = inst.space.origin();
  std::vector<std::vector<double>> d(locs, std::vector<double>(locs));
  for (int a = 0; a < locs; ++a) {
    for (int b = 0; b < locs; ++b) d[a][b] = inst.space.dist(site[a], site[b]);
  }
  std::vector<std::size_t> pow3(m + 1, 1);
  for (int i = 1; i <= m; ++i) pow3[i] = pow3[i - 1] * 3;
  const std::size_t states = pow3[m];
  auto f = std::make_shared<std::vector<double>>(states * locs, kInf);
  auto parent = std::make_shared<std::vector<std::int64_t>>(states * locs, -1);
  auto at = [locs](std::size_t s, int l) { return s * locs + l; };
  (*f)[at(0, 2 * m)] = 0.0;
  std::vector<int> digit(m);
  for (std::size_t s = 0; s < states; ++s) {
    std::size_t rest = s;
    for (int i = 0; i < m; ++i) {
      digit[i] = static_cast<int>(rest % 3);
      rest /= 3;
    }
    for (int l = 0; l < locs; ++l) {
      const double fl = (*f)[at(s, l)];
      if (fl == kInf) continue;
      for (int i = 0; i < m; ++i) {
        if (digit[i] == 2) continue;
        const int target = digit[i] == 0 ? 2 * i : 2 * i + 1;
        double cand = fl + d[l][target];
        if (digit[i] == 0) cand = std::max(cand, inst.requests[i].release);
        const std::size_t t = s + pow3[i];
        if (cand < (*f)[at(t, target)] - kEps) {
          (*f)[at(t, target)] = cand;
          (*parent)[at(t, target)] = static_cast<std::int64_t>(at(s, l));
        }
      }
    }
  }
  const unsigned full = 1u << m;
  const bool homing = inst.ending == Ending::homing;
  SubsetValues out;
  out.value.assign(full, kInf);
  std::vector<std::int64_t> best(full, -1);
  out.value[0] = 0.0;
  for (unsigned mask = 1; mask < full; ++mask) {
    std::size_t s = 0;
    for (int i = 0; i < m; ++i) {
      if (mask >> i & 1u) s += 2 * pow3[i];
    }
    for (int l = 0; l < 2 * m; ++l) {
      const double fl = (*f)[at(s, l)];
      if (fl == kInf) continue;
      const double v = fl + (homing ? d[l][2 * m] : 0.0);
      if (v < out.value[mask] - kEps) {
        out.value[mask] = v;
        best[mask] = static_cast<std::int64_t>(at(s, l));
      }
    }
  }
  const Instance* ip = &inst;
  out.witness = [parent, best, locs, ip](unsigned mask) {
    std::vector<Action> seq;
    std::int64_t node = best[mask];
    while (node >= 0) {
      const int l = static_cast<int>(node % locs);
      if (l == locs - 1) break;  // origin at the empty state
      const int i = l / 2;
      seq.push_back(Action{l % 2 == 0 ? Action::Kind::pickup : Action::Kind::deliver, ip->requests[i].id, 0.0});
      node = (*parent)[node];
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  };
  return out;
}

}  // namespace

OptResult opt_exact(const Instance& inst, const OptCaps& caps) {
  const int m = static_cast<int>(inst.requests.size());
  if (m > caps.limit(inst.k)) {
    throw Error(Errc::size_cap_exceeded,
                std::to_string(m) + " requests exceed the exact cap " + std::to_string(caps.limit(inst.k)) +
                    " for k=" + std::to_string(inst.k));
  }
  OptResult res;
  res.schedule.servers.assign(inst.k, {});
  if (m == 0) return res;
  SubsetValues g = inst.mode == Mode::tsp ? tsp_subsets(inst) : darp_subsets(inst);
  const unsigned full = 1u << m;
  // h[c][S]: best max finish when c servers split S; choice = part for the last server
  std::vector<std::vector<double>> h(inst.k + 1, std::vector<double>(full, kInf));
  std::vector<std::vector<unsigned>> choice(inst.k + 1, std::vector<unsigned>(full, 0));
  h[1] = g.value;
  for (unsigned s = 0; s < full; ++s) choice[1][s] = s;
  for (int c = 2; c <= inst.k; ++c) {
    for (unsigned s = 0; s < full; ++s) {
      // enumerate submasks T (given to server c) in increasing order, empty first
      unsigned t = 0;
      while (true) {
        const double v = std::max(g.value[t], h[c - 1][s & ~t]);
        if (v < h[c][s] - kEps) {
          h[c][s] = v;
          choice[c][s] = t;
        }
        if (t == s) break;
        t = (t - s) & s;
      }
    }
  }
  res.makespan = h[inst.k][full - 1];
  unsigned rest = full - 1;
  for (int c = inst.k; c >= 1; --c) {
    const unsigned part = choice[c][rest];
    if (part != 0) res.schedule.servers[c - 1] = g.witness(part);
    rest &= ~part;
  }
  // canonical order: non-empty servers first
  std::stable_partition(res.schedule.servers.begin(), res.schedule.servers.end(),
                        [](const std::vector<Action>& a) { return !a.empty(); });
  res.schedule.makespan = res.makespan;
  return res;
}

double opt_lower_bound(const Instance& inst, const TourCaps& caps) {
  const Location o = inst.space.origin();
  const bool homing = inst.ending == Ending::homing;
  double lb = 0.0;
  std::vector<Location> points;
  for (const auto& r : inst.requests) {
    lb = std::max(lb, r.release);
    const double reach = std::max(r.release, inst.space.dist(o, r.source)) + inst.space.dist(r.source, r.destination);
    lb = std::max(lb, reach + (homing ? inst.space.dist(r.destination, o) : 0.0));
    points.push_back(r.source);
    if (inst.mode == Mode::darp) points.push_back(r.destination);
  }
  if (points.empty()) return lb;
  if (inst.space.is_line()) {
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& p : points) {
      lo = std::min(lo, p.x);
      hi = std::max(hi, p.x);
    }
    double tour = 0.0;
    if (inst.k == 1) {
      tour = homing ? 2.0 * (hi - lo) : (hi - lo) + std::min(-lo, hi);
    } else {
      tour = (homing ? 2.0 : 1.0) * std::max(-lo, hi);
    }
    return std::max(lb, tour);
  }
  double far = 0.0;
  for (const auto& p : points) far = std::max(far, inst.space.dist(o, p));
  lb = std::max(lb, homing ? 2.0 * far : far);
  if (static_cast<int>(points.size()) <= caps.tsp_points) {
    if (inst.k == 1) {
      lb = std::max(lb, tsp_tour_exact(inst.space, points, o, homing, caps).length);
    } else if (static_cast<int>(points.size()) <= std::min(caps.tsp_points, 12)) {
      const KTours kt = opt_ktour_minmax(inst.space, points, inst.k, o, homing, caps);
      if (!kt.heuristic) lb = std::max(lb, kt.max_length);
    }
  }
  return lb;
}

OptValue opt_value(const Instance& inst, const OptCaps& caps) {
  if (static_cast<int>(inst.requests.size()) <= caps.limit(inst.k)) {
    return OptValue{opt_exact(inst, caps).makespan, OptKind::exact};
  }
  return OptValue{opt_lower_bound(inst), OptKind::lower_bound};
}

json schedule_to_json(const Schedule& schedule) {
  json servers = json::array();
  for (const auto& seq : schedule.servers) {
    json actions = json::array();
    for (const auto& a : seq) {
      json j = {{"action", to_string(a.kind)}};
      if (a.kind == Action::Kind::wait_until) {
        j["t"] = a.time;
      } else if (a.kind != Action::Kind::return_to_origin) {
        j["request"] = a.request;
      }
      actions.push_back(j);
    }
    servers.push_back(actions);
  }
  return {{"makespan", schedule.makespan}, {"servers", servers}};
}

Schedule schedule_from_json(const json& j) {
  static const std::map<std::string, Action::Kind> kinds = {{"visit", Action::Kind::visit},
                                                            {"pickup", Action::Kind::pickup},
                                                            {"deliver", Action::Kind::deliver},
                                                            {"wait-until", Action::Kind::wait_until},
                                                            {"return-to-origin", Action::Kind::return_to_origin}};
  Schedule s;
  try {
    s.makespan = j.value("makespan", 0.0);
    for (const auto& seq : j.at("servers")) {
      std::vector<Action> actions;
      for (const auto& aj : seq) {
        const auto it = kinds.find(aj.at("action").get<std::string>());
        if (it == kinds.end()) throw Error(Errc::schema_violation, "unknown action " + aj.at("action").dump());
        Action a;
        a.kind = it->second;
        if (a.kind == Action::Kind::wait_until) {
          a.time = aj.at("t").get<double>();
        } else if (a.kind != Action::Kind::return_to_origin) {
          a.request = aj.at("request").get<int>();
        }
        actions.push_back(a);
      }
      s.servers.push_back(std::move(actions));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::schema_violation, std::string("schedule: ") + e.what());
  }
  return s;
}

}  // namespace sloc
