#include "sloc/trace.hpp"

#include <algorithm>
#include <sstream>

namespace sloc {

using nlohmann::json;

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::release: return "release";
    case EventKind::replan: return "replan";
    case EventKind::visit: return "visit";
    case EventKind::pickup: return "pickup";
    case EventKind::delivery: return "delivery";
    case EventKind::arrive: return "arrive";
    case EventKind::idle: return "idle";
    case EventKind::finish: return "finish";
  }
  return "?";
}

const RequestRecord* Trace::find(int id) const {
  for (const auto& r : requests) {
    if (r.request.id == id) return &r;
  }
  return nullptr;
}

std::size_t Trace::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [kind](const TraceEvent& e) { return e.kind == kind; }));
}

std::size_t Trace::model_event_count() const {
  return count(EventKind::release) + count(EventKind::visit) + count(EventKind::pickup) +
         count(EventKind::delivery) + count(EventKind::finish);
}

Location position_at(const Trace& trace, int server, double t) {
  if (server < 0 || server >= static_cast<int>(trace.paths.size())) {
    throw Error(Errc::out_of_range, "no server " + std::to_string(server));
  }
  if (t < -kEps || t > trace.end_time + kEps) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << trace.end_time << "]";
    throw Error(Errc::out_of_range, os.str());
  }
  const auto& path = trace.paths[server];
  if (path.empty()) throw Error(Errc::missing_position, "empty path for server " + std::to_string(server));
  // last breakpoint with time <= t
  auto it = std::upper_bound(path.begin(), path.end(), t, [](double v, const Breakpoint& b) { return v < b.time; });
  if (it == path.begin()) return path.front().pos;
  const Breakpoint& a = *(it - 1);
  if (it == path.end() || approx_eq(a.time, t)) return a.pos;
  const Breakpoint& b = *it;
  const double span = b.time - a.time;
  if (span <= 0.0) return b.pos;
  const double travel = trace.space.dist(a.pos, b.pos);
  // servers move at unit speed and may wait before leaving a breakpoint
  const double depart = b.time - travel;
  if (t <= depart) return a.pos;
  return trace.space.interpolate(a.pos, b.pos, travel > 0.0 ? (t - depart) / travel : 1.0);
}

Instance realized_instance(const Trace& trace, const Instance& base) {
  Instance inst = base;
  inst.generator.reset();
  inst.requests.clear();
  for (const auto& r : trace.requests) inst.requests.push_back(r.request);
  return inst;
}

std::string trace_to_jsonl(const Trace& trace) {
  std::ostringstream os;
  json header = {{"type", "header"},
                 {"policy", trace.policy},
                 {"branch", trace.branch},
                 {"mode", to_string(trace.mode)},
                 {"ending", to_string(trace.ending)},
                 {"k", trace.k},
                 {"makespan", trace.makespan},
                 {"space", trace.space}};
  os << header.dump() << "\n";
  for (const auto& e : trace.events) {
    json j = {{"t", e.time}, {"kind", to_string(e.kind)}, {"server", e.server}, {"request", e.request},
              {"pos", location_to_json(e.pos)}};
    os << j.dump() << "\n";
  }
  for (const auto& r : trace.requests) {
    json j = {{"type", "request"}, {"id", r.request.id}, {"t", r.request.release},
              {"e", location_to_json(r.request.source)}, {"d", location_to_json(r.request.destination)},
              {"server", r.server}};
    j["pickup"] = r.pickup == r.pickup ? json(r.pickup) : json(nullptr);
    j["completion"] = r.served() ? json(r.completion) : json(nullptr);
    os << j.dump() << "\n";
  }
  return os.str();
}

}  // namespace sloc
