#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sloc/common.hpp"

namespace sloc {

// A point of a metric space, or a point in transit between two sites.
//
// On a line space only `x` is meaningful. On a general space a site is a
// vertex (`node`, with `next == -1`); a server in transit sits on the atomic
// edge node -> next at distance `along` from `node`.
struct Location {
  double x = 0.0;
  int node = -1;
  int next = -1;
  double along = 0.0;

  static Location point(double coordinate) { return Location{coordinate, -1, -1, 0.0}; }
  static Location vertex(int v) { return Location{0.0, v, -1, 0.0}; }
  static Location on_edge(int from, int to, double offset) { return Location{0.0, from, to, offset}; }

  bool on_line() const { return node < 0; }
  bool is_site() const { return next < 0; }

  bool operator==(const Location&) const = default;
};

std::string to_string(const Location& loc);

struct MetricViolation {
  enum class Axiom { definiteness, symmetry, triangle, negative, shape };
  Axiom axiom;
  int a = -1;
  int b = -1;
  int c = -1;
  std::string describe() const;
};

class MetricSpace {
 public:
  enum class Kind { line, general };

  // Segment [-left, +right] with the origin at coordinate 0.
  static MetricSpace line(double left, double right);

  // Raw table, no validation or completion. Use validate_metric() on it.
  static MetricSpace from_table(std::vector<std::vector<double>> dist, int origin);

  // Validated general metric. With `repair`, the table is replaced by its
  // shortest-path closure first (triangle violations are repaired); without
  // it any axiom violation throws Errc::invalid_metric.
  static MetricSpace general(std::vector<std::vector<double>> dist, int origin, bool repair = false);

  // Center 0 with `leaves` leaves 1..leaves at distance `edge`.
  static MetricSpace star(int leaves, double edge);

  // Points in the plane with Euclidean distances; origin index 0.
  static MetricSpace euclidean(const std::vector<std::pair<double, double>>& points, int origin = 0);

  Kind kind() const { return kind_; }
  bool is_line() const { return kind_ == Kind::line; }
  double diameter() const { return diameter_; }
  Location origin() const;
  int origin_index() const { return origin_; }
  double left_extent() const { return left_; }
  double right_extent() const { return right_; }
  // min{L,R}/D and max{L,R}/D; only meaningful on line spaces.
  double beta() const;
  double gamma() const;
  int size() const { return static_cast<int>(table_.size()); }
  const std::vector<std::vector<double>>& table() const { return table_; }

  double dist(const Location& a, const Location& b) const;
  bool same(const Location& a, const Location& b) const;
  bool contains(const Location& site) const;

  // First breakpoint on the shortest route from `from` toward the site `to`.
  // On a general space this is the next vertex on a geodesic that passes
  // through every intermediate vertex lying exactly on it.
  Location step_target(const Location& from, const Location& to) const;

  // Position reached after moving `amount` from `from` toward `step`, where
  // `step` = step_target(from, ...) and amount <= dist(from, step).
  Location advance(const Location& from, const Location& step, double amount) const;

  // Position on the straight piece between two consecutive breakpoints.
  Location interpolate(const Location& a, const Location& b, double fraction) const;

  // All vertices within `radius` of `p` (general spaces only), ascending.
  std::vector<int> vertices_within(const Location& p, double radius) const;

  std::string describe() const;

 private:
  MetricSpace() = default;
  void finalize();
  double vertex_to(int v, const Location& q) const;

  Kind kind_ = Kind::line;
  double left_ = 0.0;
  double right_ = 0.0;
  int origin_ = 0;
  double diameter_ = 0.0;
  std::vector<std::vector<double>> table_;
  std::vector<std::vector<int>> next_hop_;
};

// ok (nullopt) iff definiteness, symmetry and triangle inequality hold.
std::optional<MetricViolation> validate_metric(const MetricSpace& space);

void to_json(nlohmann::json& j, const MetricSpace& space);
MetricSpace metric_from_json(const nlohmann::json& j);

// Site encoding: coordinate on a line, vertex index on a general space.
nlohmann::json site_to_json(const MetricSpace& space, const Location& site);
Location site_from_json(const MetricSpace& space, const nlohmann::json& j);
nlohmann::json location_to_json(const Location& loc);
Location location_from_json(const nlohmann::json& j);

}  // namespace sloc
