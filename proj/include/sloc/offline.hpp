#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sloc/instance.hpp"
#include "sloc/tour.hpp"

namespace sloc {

struct Action {
  enum class Kind { visit, pickup, deliver, wait_until, return_to_origin };
  Kind kind = Kind::visit;
  int request = -1;   // visit / pickup / deliver
  double time = 0.0;  // wait_until
};

std::string_view to_string(Action::Kind kind);

struct Schedule {
  std::vector<std::vector<Action>> servers;
  double makespan = 0.0;
};

struct Evaluation {
  bool feasible = false;
  double makespan = 0.0;
  std::string reason;
  std::vector<double> completion;  // per instance request index
};

// Unit-speed replay. Servers wait at a source until its release. Under homing
// each server's final return hop to o is added if the schedule omits it.
Evaluation evaluate_schedule(const Schedule& schedule, const Instance& inst);

struct OptCaps {
  int single = 10;  // k = 1
  int pair = 8;     // k = 2
  int many = 7;     // k >= 3
  int limit(int k) const { return k <= 1 ? single : k == 2 ? pair : many; }
};

struct OptResult {
  double makespan = 0.0;
  Schedule schedule;
};

// Exact offline optimum. Earliest-arrival dynamic programming over served
// subsets (TSP) or per-request {untouched, carried, delivered} states (DARP),
// followed by a min-max split of the subsets over the k servers.
// Throws Errc::size_cap_exceeded above caps.limit(k).
OptResult opt_exact(const Instance& inst, const OptCaps& caps = {});

// Provably sound lower bound on OPT; never exceeds opt_exact.
double opt_lower_bound(const Instance& inst, const TourCaps& caps = {});

enum class OptKind { exact, lower_bound, constructed };
std::string_view to_string(OptKind kind);

struct OptValue {
  double value = 0.0;
  OptKind kind = OptKind::exact;
};

// opt_exact when within caps, otherwise opt_lower_bound.
OptValue opt_value(const Instance& inst, const OptCaps& caps = {});

nlohmann::json schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const nlohmann::json& j);

}  // namespace sloc
