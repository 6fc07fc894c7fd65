#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sloc/instance.hpp"
#include "sloc/offline.hpp"

namespace sloc {

// Star with N leaves at distance delta from the center. All leaves are
// requested at t0 = delta^2; afterwards one request every 2*delta until
// tf = delta*(delta + 2N), placed on the leaf the online server served most
// recently. If no leaf was served since the previous release, the leaf with
// the fewest outstanding requests is used (ties: lowest index).
class StarOracle final : public RequestOracle {
 public:
  StarOracle(int leaves, double delta);
  std::optional<double> next_release_time() const override;
  std::vector<Request> release(double t, std::span<const Location> servers) override;
  void on_served(const Request& request, double t, int server) override;

  double t0() const { return delta_ * delta_; }
  double tf() const { return delta_ * (delta_ + 2.0 * leaves_); }
  int fallback_releases() const { return fallback_releases_; }

 private:
  int leaves_;
  double delta_;
  int round_ = 0;  // 0: initial batch pending; i: i-th single release pending
  int next_id_ = 1;
  int last_served_ = -1;
  bool served_since_release_ = false;
  std::vector<int> outstanding_;  // per leaf
  int fallback_releases_ = 0;
};

// Throws Errc::divisibility_violated unless N >= 1, delta >= 1 and N mod delta == 0.
void check_star_parameters(int leaves, double delta);

// TSP instance on the star with locality radius delta; requests are empty
// (supplied by StarOracle).
Instance star_instance(int leaves, double delta, Ending ending = Ending::nomadic);

// Offline schedule for a star request sequence: leaves in ascending order of
// their last release, each leaf's requests served in one visit.
Schedule star_schedule(const Instance& realized);

struct StarOpt {
  Instance instance;  // the canonical sequence: leaf i re-requested at t0 + 2 i delta
  Schedule schedule;
};

StarOpt star_opt_schedule(int leaves, double delta, Ending ending = Ending::nomadic);

enum class SweepKind { delta, beta, gamma };

struct SweepBase {
  double diameter = 20.0;
  double delta = 0.3;  // ratio, used by beta / gamma sweeps
  double beta = 0.5;   // used by delta sweeps
  Mode mode = Mode::tsp;
  Ending ending = Ending::nomadic;
  int k = 1;
  GeneratorSpec generator;
  std::optional<MetricSpace> space;  // delta sweeps on a fixed non-line space
};

// Instances with adaptive generators, one per grid value (seed + index).
// Throws Errc::invalid_argument for grid values outside the admissible range.
std::vector<Instance> sweep_family(SweepKind kind, const std::vector<double>& grid, const SweepBase& base,
                                   std::uint64_t seed);

SweepKind sweep_kind_from_string(const std::string& s);

}  // namespace sloc
