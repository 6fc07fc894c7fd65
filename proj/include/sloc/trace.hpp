#pragma once

#include <limits>
#include <string>
#include <vector>

#include "sloc/instance.hpp"

namespace sloc {

enum class EventKind { release, replan, visit, pickup, delivery, arrive, idle, finish };

std::string_view to_string(EventKind kind);

struct TraceEvent {
  double time = 0.0;
  EventKind kind = EventKind::release;
  int server = -1;
  int request = -1;
  Location pos;
};

struct Breakpoint {
  double time = 0.0;
  Location pos;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Diagnostics a policy attaches to a replanning decision.
struct ReplanNote {
  double time = 0.0;
  int server = -1;
  std::string policy;
  double plan_length = 0.0;
  double reference_length = kNaN;  // |T_t| the plan was derived from
  double first_gap = kNaN;         // distance to the first outstanding source
  int first_request = -1;
  bool locality_ok = true;   // first outstanding source within delta of some server
  bool owner_ok = true;      // ... of the server that owns the tour
  bool length_ok = true;     // plan_length <= reference_length + delta
  bool heuristic = false;
};

struct RequestRecord {
  Request request;
  double pickup = kNaN;      // TSP: equals completion
  double completion = kNaN;
  int server = -1;

  bool served() const { return completion == completion; }
};

struct Trace {
  MetricSpace space = MetricSpace::line(0.0, 0.0);
  std::string policy;
  std::string branch;  // "spatial", "fallback" or empty for undispatched policies
  Mode mode = Mode::tsp;
  Ending ending = Ending::nomadic;
  int k = 1;
  std::vector<TraceEvent> events;
  std::vector<std::vector<Breakpoint>> paths;
  std::vector<RequestRecord> requests;  // in release order
  std::vector<ReplanNote> replans;
  double makespan = 0.0;
  double end_time = 0.0;

  const RequestRecord* find(int id) const;
  // Release, service and finish events; replan/arrive/idle are annotations.
  std::size_t model_event_count() const;
  std::size_t count(EventKind kind) const;
};

// Linear interpolation between breakpoints; throws Errc::out_of_range
// outside [0, end_time].
Location position_at(const Trace& trace, int server, double t);

// The released requests as a fixed instance (for offline solving).
Instance realized_instance(const Trace& trace, const Instance& base);

// One JSON object per line: a header line, then one line per event.
std::string trace_to_jsonl(const Trace& trace);

}  // namespace sloc
