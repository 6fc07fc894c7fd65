#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sloc/instance.hpp"
#include "sloc/tour.hpp"
#include "sloc/trace.hpp"

namespace sloc {

enum class Status { unreleased, outstanding, picked, served };

struct Waypoint {
  enum class Act { none, visit, pickup, deliver };
  Location site;
  int request = -1;  // tagged waypoints are dropped once their action is done
  Act act = Act::none;
};

// Shared simulation state. The simulator owns it; policies read it and
// replace server routes through set_route().
class World {
 public:
  explicit World(const Instance& inst);

  const Instance& instance() const { return *inst_; }
  const MetricSpace& space() const { return inst_->space; }
  int k() const { return inst_->k; }
  Mode mode() const { return inst_->mode; }
  double delta() const { return inst_->delta; }
  double now() const { return now_; }

  const std::vector<Location>& positions() const { return positions_; }
  const Location& position(int s) const { return positions_[s]; }
  const std::vector<Waypoint>& route(int s) const { return routes_[s]; }

  // Every released request, in release order.
  const std::vector<Request>& arrived() const { return arrived_; }
  const Request& request(int id) const { return arrived_[index_.at(id)]; }
  Status status(int id) const;
  int carrier(int id) const;
  bool served(int id) const { return status(id) == Status::served; }
  // Released and not yet served (includes carried DARP requests).
  std::vector<int> outstanding() const;
  std::vector<int> carried_by(int s) const;

  void set_route(int s, std::vector<Waypoint> route);
  void note(ReplanNote n);

 private:
  friend class Simulation;
  const Instance* inst_;
  double now_ = 0.0;
  std::vector<Location> positions_;
  std::vector<std::vector<Waypoint>> routes_;
  std::vector<Request> arrived_;
  std::unordered_map<int, std::size_t> index_;
  std::vector<Status> status_;
  std::vector<int> carrier_;
  std::vector<int> replanned_;
  std::vector<ReplanNote> notes_;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // "spatial" / "fallback" for dispatching policies.
  virtual std::string branch() const { return ""; }
  virtual void on_release(World& w, std::span<const Request> batch) = 0;
  virtual void on_route_done(World& /*w*/, int /*server*/) {}
  // Whether `server`, standing on the source of `id`, picks it up (DARP only).
  virtual bool may_pickup(const World& /*w*/, int /*server*/, int /*id*/) const { return true; }
};

struct PolicyOptions {
  bool raw = false;            // skip the threshold dispatch, always run the named policy
  bool strict_lemma3 = false;  // throw lemma3-violated instead of recording it
  TourCaps caps;
};

// Wraps a spatial policy and the fallback; the branch is fixed at construction
// since the dispatch inequality depends only on instance parameters.
class Dispatch final : public Policy {
 public:
  Dispatch(std::unique_ptr<Policy> spatial, std::unique_ptr<Policy> fallback, bool use_spatial);
  std::string name() const override { return spatial_->name(); }
  std::string branch() const override { return use_spatial_ ? "spatial" : "fallback"; }
  void on_release(World& w, std::span<const Request> batch) override;
  void on_route_done(World& w, int server) override;
  bool may_pickup(const World& w, int server, int id) const override;

  bool uses_spatial() const { return use_spatial_; }
  std::size_t spatial_calls() const { return spatial_calls_; }
  std::size_t fallback_calls() const { return fallback_calls_; }

 private:
  Policy& active() const { return use_spatial_ ? *spatial_ : *fallback_; }
  std::unique_ptr<Policy> spatial_;
  std::unique_ptr<Policy> fallback_;
  bool use_spatial_;
  mutable std::size_t spatial_calls_ = 0;
  mutable std::size_t fallback_calls_ = 0;
};

// Whether the spatial branch of `name` is selected for this instance.
bool spatial_branch_active(const std::string& name, const Instance& inst);

const std::vector<std::string>& policy_names();

// Throws Errc::policy_incompatible if the policy cannot run on the instance,
// Errc::invalid_argument for unknown names.
std::unique_ptr<Policy> make_policy(const std::string& name, const Instance& inst, const PolicyOptions& opts = {});

}  // namespace sloc
