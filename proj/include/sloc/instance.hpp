#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sloc/metric.hpp"

namespace sloc {

enum class Mode { tsp, darp };
enum class Ending { nomadic, homing };
enum class Arrival { sequential, general };

std::string_view to_string(Mode m);
std::string_view to_string(Ending e);
std::string_view to_string(Arrival a);

struct Request {
  int id = 0;
  double release = 0.0;
  Location source;
  Location destination;  // equals source in TSP mode

  bool operator==(const Request&) const = default;
};

// Release-instant law for adaptive generation.
struct GeneratorSpec {
  enum class Law { fixed_interval, uniform, burst, sequential };
  Law law = Law::fixed_interval;
  int m = 0;
  double interval = 1.0;  // fixed-interval / burst spacing
  double low = 0.0;       // uniform gaps
  double high = 1.0;
  int burst = 2;          // requests per burst instant
  double gap = 0.0;       // sequential: extra wait drawn from [0, gap] after each completion
  std::uint64_t seed = 0;

  bool operator==(const GeneratorSpec&) const = default;
};

std::string_view to_string(GeneratorSpec::Law law);

struct Instance {
  MetricSpace space = MetricSpace::line(0.0, 0.0);
  Mode mode = Mode::tsp;
  Ending ending = Ending::nomadic;
  int k = 1;
  double delta = 0.0;  // absolute locality radius
  Arrival arrival = Arrival::general;
  std::vector<Request> requests;  // sorted by (release, id)
  std::optional<GeneratorSpec> generator;

  double delta_ratio() const { return space.diameter() > 0.0 ? delta / space.diameter() : 0.0; }
  double t_max() const;
};

// Throws Errc::schema_violation describing the first broken invariant.
void validate_instance(const Instance& inst);

// Request streams. The simulator asks for the next release instant, then
// calls release() at that instant with all current server positions.
class RequestOracle {
 public:
  virtual ~RequestOracle() = default;
  // nullopt once no request will ever be released again.
  virtual std::optional<double> next_release_time() const = 0;
  virtual std::vector<Request> release(double t, std::span<const Location> servers) = 0;
  virtual void on_served(const Request& /*request*/, double /*t*/, int /*server*/) {}
};

class FixedOracle final : public RequestOracle {
 public:
  explicit FixedOracle(std::vector<Request> requests);
  std::optional<double> next_release_time() const override;
  std::vector<Request> release(double t, std::span<const Location> servers) override;

 private:
  std::vector<Request> requests_;
  std::size_t next_ = 0;
};

// Sources are drawn uniformly from the radius-delta ball around a uniformly
// chosen server; DARP destinations are uniform over the whole space. On a
// general space a release that falls while no vertex lies within delta of any
// server (all of them mid-edge) is held back until one does.
class AdaptiveRandomOracle final : public RequestOracle {
 public:
  AdaptiveRandomOracle(MetricSpace space, Mode mode, int k, double delta, GeneratorSpec spec);
  std::optional<double> next_release_time() const override;
  std::vector<Request> release(double t, std::span<const Location> servers) override;
  void on_served(const Request& request, double t, int server) override;

 private:
  std::optional<Request> sample(int id, double t, std::span<const Location> servers);

  MetricSpace space_;
  Mode mode_;
  int k_;
  double delta_;
  GeneratorSpec spec_;
  Rng rng_;
  int emitted_ = 0;
  std::vector<double> instants_;  // precomputed for non-sequential laws
  std::size_t next_instant_ = 0;
  std::optional<double> sequential_next_;
  int sequential_pending_ = -1;
};

std::unique_ptr<RequestOracle> make_oracle(const Instance& inst);

// Locality and arrival checks over a simulated trace.
struct Trace;

struct LocalityViolation {
  int request = -1;
  double gap = 0.0;
};

// nullopt iff every source lies within delta (+eps) of at least one server at
// its release instant. Throws Errc::missing_position if the trace does not
// cover a release instant.
std::optional<LocalityViolation> check_spatial_locality(const Trace& trace, const Instance& inst);

struct SequenceViolation {
  int request = -1;
  double release = 0.0;
  double previous_completion = 0.0;
};

std::optional<SequenceViolation> check_sequential(const Instance& inst, const Trace& trace);

// JSON schema round trip.
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);
Instance instance_from_string(const std::string& text);
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

nlohmann::json generator_to_json(const GeneratorSpec& g);
GeneratorSpec generator_from_json(const nlohmann::json& j);
nlohmann::json request_to_json(const MetricSpace& space, const Request& r);

}  // namespace sloc
