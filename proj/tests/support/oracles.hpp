#pragma once
// Brute-force reference solvers. Deliberately naive: no pruning, no DP.

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "sloc/offline.hpp"
#include "sloc/tour.hpp"

namespace oracle {

using namespace sloc;

inline double perm_tour_min(const MetricSpace& space, const std::vector<Location>& pts, const Location& anchor,
                            bool closed) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    std::vector<Location> seq;
    for (int i : idx) seq.push_back(pts[i]);
    best = std::min(best, tour_length(space, anchor, seq, closed));
  } while (std::next_permutation(idx.begin(), idx.end()));
  return pts.empty() ? (closed ? 0.0 : 0.0) : best;
}

inline double perm_block_min(const MetricSpace& space, const std::vector<Block>& blocks, const Location& anchor,
                             bool closed) {
  std::vector<int> idx(blocks.size());
  std::iota(idx.begin(), idx.end(), 0);
  double best = blocks.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  do {
    std::vector<Location> seq;
    for (int i : idx) {
      seq.push_back(blocks[i].first);
      seq.push_back(blocks[i].second);
    }
    if (!blocks.empty()) best = std::min(best, tour_length(space, anchor, seq, closed));
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

// All action sequences for one server serving the given request ids; DARP
// sequences keep each pickup before its delivery.
inline void for_each_sequence(const Instance& inst, const std::vector<int>& ids,
                              const std::function<void(const std::vector<Action>&)>& fn) {
  std::vector<Action> seq;
  std::vector<int> state(ids.size(), 0);
  const int need = static_cast<int>(ids.size()) * (inst.mode == Mode::darp ? 2 : 1);
  std::function<void()> rec = [&]() {
    if (static_cast<int>(seq.size()) == need) {
      fn(seq);
      return;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (inst.mode == Mode::tsp) {
        if (state[i]) continue;
        state[i] = 1;
        seq.push_back(Action{Action::Kind::visit, ids[i]});
      } else {
        if (state[i] == 2) continue;
        seq.push_back(Action{state[i] == 0 ? Action::Kind::pickup : Action::Kind::deliver, ids[i]});
        ++state[i];
      }
      rec();
      seq.pop_back();
      if (inst.mode == Mode::tsp) {
        state[i] = 0;
      } else {
        --state[i];
      }
    }
  };
  rec();
}

// Full enumeration of request-to-server assignments and per-server orders,
// each candidate scored by evaluate_schedule.
inline double naive_opt(const Instance& inst) {
  const int m = static_cast<int>(inst.requests.size());
  if (m == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> assign(m, 0);
  while (true) {
    // best sequence per server independently, then combine through evaluate_schedule
    Schedule sched;
    sched.servers.assign(inst.k, {});
    double worst = 0.0;
    for (int s = 0; s < inst.k; ++s) {
      std::vector<int> ids;
      for (int i = 0; i < m; ++i) {
        if (assign[i] == s) ids.push_back(inst.requests[i].id);
      }
      if (ids.empty()) continue;
      Instance sub = inst;
      sub.k = 1;
      sub.requests.clear();
      for (int i = 0; i < m; ++i) {
        if (assign[i] == s) sub.requests.push_back(inst.requests[i]);
      }
      double local = std::numeric_limits<double>::infinity();
      std::vector<Action> arg;
      for_each_sequence(sub, ids, [&](const std::vector<Action>& seq) {
        Schedule one;
        one.servers = {seq};
        const Evaluation ev = evaluate_schedule(one, sub);
        if (ev.feasible && ev.makespan < local) {
          local = ev.makespan;
          arg = seq;
        }
      });
      sched.servers[s] = arg;
      worst = std::max(worst, local);
    }
    const Evaluation ev = evaluate_schedule(sched, inst);
    if (ev.feasible) best = std::min(best, std::max(worst, ev.makespan));
    int pos = 0;
    while (pos < m && ++assign[pos] == inst.k) assign[pos++] = 0;
    if (pos == m) break;
  }
  return best;
}

// Like naive_opt for k = 1, but additionally tries an explicit wait before
// every action, at every release time (waiting elsewhere never helps).
inline double naive_opt_with_waits(const Instance& inst) {
  std::vector<double> stamps = {0.0};
  for (const auto& r : inst.requests) stamps.push_back(r.release);
  std::vector<int> ids;
  for (const auto& r : inst.requests) ids.push_back(r.id);
  double best = inst.requests.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for_each_sequence(inst, ids, [&](const std::vector<Action>& seq) {
    const std::size_t n = seq.size();
    std::vector<std::size_t> choice(n, 0);
    while (true) {
      Schedule s;
      s.servers.assign(1, {});
      for (std::size_t i = 0; i < n; ++i) {
        if (choice[i] > 0) s.servers[0].push_back(Action{Action::Kind::wait_until, -1, stamps[choice[i] - 1]});
        s.servers[0].push_back(seq[i]);
      }
      const Evaluation ev = evaluate_schedule(s, inst);
      if (ev.feasible) best = std::min(best, ev.makespan);
      std::size_t pos = 0;
      while (pos < n && ++choice[pos] == stamps.size() + 1) choice[pos++] = 0;
      if (pos == n) break;
    }
  });
  return best;
}

}  // namespace oracle
