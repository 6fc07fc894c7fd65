#include "sloc/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sloc {

namespace {

double tol(double scale) { return kEps * (1.0 + std::abs(scale)); }

}  // namespace

std::string to_string(const Location& loc) {
  std::ostringstream os;
  os.precision(12);
  if (loc.on_line()) {
    os << loc.x;
  } else if (loc.is_site()) {
    os << "v" << loc.node;
  } else {
    os << "v" << loc.node << "->v" << loc.next << "@" << loc.along;
  }
  return os.str();
}

std::string MetricViolation::describe() const {
  std::ostringstream os;
  switch (axiom) {
    case Axiom::definiteness: os << "definiteness violated at " << a; break;
    case Axiom::symmetry: os << "symmetry violated for (" << a << ", " << b << ")"; break;
    case Axiom::triangle:
      os << "triangle inequality violated: d(" << a << "," << c << ") + d(" << c << "," << b
         << ") < d(" << a << "," << b << ")";
      break;
    case Axiom::negative: os << "negative distance at (" << a << ", " << b << ")"; break;
    case Axiom::shape: os << "distance table is not square (row " << a << ")"; break;
  }
  return os.str();
}

MetricSpace MetricSpace::line(double left, double right) {
  if (!(left >= 0.0) || !(right >= 0.0)) {
    throw Error(Errc::invalid_metric, "line extents must be nonnegative");
  }
  MetricSpace s;
  s.kind_ = Kind::line;
  s.left_ = left;
  s.right_ = right;
  s.finalize();
  return s;
}

MetricSpace MetricSpace::from_table(std::vector<std::vector<double>> dist, int origin) {
  MetricSpace s;
  s.kind_ = Kind::general;
  s.table_ = std::move(dist);
  s.origin_ = origin;
  s.finalize();
  return s;
}

MetricSpace MetricSpace::general(std::vector<std::vector<double>> dist, int origin, bool repair) {
  const int n = static_cast<int>(dist.size());
  if (n == 0) throw Error(Errc::invalid_metric, "general metric needs at least one point");
  if (origin < 0 || origin >= n) throw Error(Errc::invalid_metric, "origin index out of range");
  if (repair) {
    for (const auto& row : dist) {
      if (static_cast<int>(row.size()) != n) throw Error(Errc::invalid_metric, "distance table is not square");
    }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
  }
  MetricSpace s = from_table(std::move(dist), origin);
  if (auto v = validate_metric(s)) throw Error(Errc::invalid_metric, v->describe());
  return s;
}

MetricSpace MetricSpace::star(int leaves, double edge) {
  if (leaves < 1 || !(edge > 0.0)) throw Error(Errc::invalid_argument, "star needs >= 1 leaf and positive edge");
  const int n = leaves + 1;
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 2.0 * edge));
  for (int i = 0; i < n; ++i) d[i][i] = 0.0;
  for (int i = 1; i < n; ++i) d[0][i] = d[i][0] = edge;
  return general(std::move(d), 0);
}

MetricSpace MetricSpace::euclidean(const std::vector<std::pair<double, double>>& points, int origin) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d[i][j] = std::hypot(points[i].first - points[j].first, points[i].second - points[j].second);
  return general(std::move(d), origin);
}

void MetricSpace::finalize() {
  if (kind_ == Kind::line) {
    diameter_ = left_ + right_;
    return;
  }
  const int n = size();
  diameter_ = 0.0;
  bool square = true;
  for (const auto& row : table_) {
    if (static_cast<int>(row.size()) != n) square = false;
    for (double v : row) diameter_ = std::max(diameter_, v);
  }
  next_hop_.assign(n, std::vector<int>(n, -1));
  if (!square) return;
  for (int u = 0; u < n; ++u) {
    for (int w = 0; w < n; ++w) {
      const double duw = table_[u][w];
      if (u == w || duw <= kEps) {
        next_hop_[u][w] = w;
        continue;
      }
      int best = w;
      double best_d = duw;
      for (int x = 0; x < n; ++x) {
        const double dux = table_[u][x];
        if (x == u || dux <= kEps) continue;
        if (std::abs(dux + table_[x][w] - duw) <= tol(duw) && dux < best_d - kEps) {
          best = x;
          best_d = dux;
        }
      }
      next_hop_[u][w] = best;
    }
  }
}

Location MetricSpace::origin() const {
  return kind_ == Kind::line ? Location::point(0.0) : Location::vertex(origin_);
}

double MetricSpace::beta() const {
  return diameter_ > 0.0 ? std::min(left_, right_) / diameter_ : 0.0;
}

double MetricSpace::gamma() const {
  return diameter_ > 0.0 ? std::max(left_, right_) / diameter_ : 1.0;
}

double MetricSpace::vertex_to(int v, const Location& q) const {
  if (q.is_site()) return table_[v][q.node];
  const double len = table_[q.node][q.next];
  return std::min(table_[v][q.node] + q.along, table_[v][q.next] + (len - q.along));
}

double MetricSpace::dist(const Location& a, const Location& b) const {
  if (kind_ == Kind::line) return std::abs(a.x - b.x);
  if (a.is_site()) return vertex_to(a.node, b);
  const double len = table_[a.node][a.next];
  double best = std::min(a.along + vertex_to(a.node, b), (len - a.along) + vertex_to(a.next, b));
  if (!b.is_site()) {
    const bool same_edge = (b.node == a.node && b.next == a.next) || (b.node == a.next && b.next == a.node);
    if (same_edge) {
      const double b_off = (b.node == a.node) ? b.along : len - b.along;
      best = std::min(best, std::abs(a.along - b_off));
    }
  }
  return best;
}

bool MetricSpace::same(const Location& a, const Location& b) const { return dist(a, b) <= kEps; }

bool MetricSpace::contains(const Location& site) const {
  if (kind_ == Kind::line) {
    return site.on_line() && site.x >= -left_ - kEps && site.x <= right_ + kEps;
  }
  return site.is_site() && site.node >= 0 && site.node < size();
}

Location MetricSpace::step_target(const Location& from, const Location& to) const {
  if (kind_ == Kind::line) return to;
  const int w = to.node;
  if (from.is_site()) {
    if (from.node == w) return to;
    return Location::vertex(next_hop_[from.node][w]);
  }
  const double len = table_[from.node][from.next];
  const double via_tail = from.along + table_[from.node][w];
  const double via_head = (len - from.along) + table_[from.next][w];
  // Ties keep the current heading.
  return via_head <= via_tail + kEps ? Location::vertex(from.next) : Location::vertex(from.node);
}

Location MetricSpace::advance(const Location& from, const Location& step, double amount) const {
  const double total = dist(from, step);
  if (amount >= total - kEps) return step;
  if (amount <= 0.0) return from;
  if (kind_ == Kind::line) {
    return Location::point(from.x + (step.x > from.x ? amount : -amount));
  }
  if (from.is_site()) return Location::on_edge(from.node, step.node, amount);
  if (step.node == from.next) return Location::on_edge(from.node, from.next, from.along + amount);
  return Location::on_edge(from.node, from.next, from.along - amount);
}

Location MetricSpace::interpolate(const Location& a, const Location& b, double fraction) const {
  if (kind_ == Kind::line) return Location::point(a.x + fraction * (b.x - a.x));
  int p = 0;
  int q = 0;
  if (!a.is_site()) {
    p = a.node;
    q = a.next;
  } else if (!b.is_site()) {
    p = b.node;
    q = b.next;
  } else {
    p = a.node;
    q = b.node;
  }
  if (p == q) return a;
  const double len = table_[p][q];
  auto offset = [&](const Location& l) {
    if (l.is_site()) return l.node == p ? 0.0 : len;
    return l.node == p ? l.along : len - l.along;
  };
  const double oa = offset(a);
  const double r = oa + fraction * (offset(b) - oa);
  if (r <= kEps) return Location::vertex(p);
  if (r >= len - kEps) return Location::vertex(q);
  return Location::on_edge(p, q, r);
}

std::vector<int> MetricSpace::vertices_within(const Location& p, double radius) const {
  std::vector<int> out;
  if (kind_ == Kind::line) return out;
  for (int v = 0; v < size(); ++v) {
    if (vertex_to(v, p) <= radius + kEps) out.push_back(v);
  }
  return out;
}

std::string MetricSpace::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::line) {
    os << "line[-" << left_ << ", " << right_ << "]";
  } else {
    os << "general(n=" << size() << ", D=" << diameter_ << ", origin=" << origin_ << ")";
  }
  return os.str();
}

std::optional<MetricViolation> validate_metric(const MetricSpace& space) {
  using Axiom = MetricViolation::Axiom;
  if (space.is_line()) return std::nullopt;
  const auto& d = space.table();
  const int n = space.size();
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(d[i].size()) != n) return MetricViolation{Axiom::shape, i};
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!(d[i][j] >= 0.0)) return MetricViolation{Axiom::negative, i, j};
  for (int i = 0; i < n; ++i)
    if (d[i][i] != 0.0) return MetricViolation{Axiom::definiteness, i, i};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(d[i][j] - d[j][i]) > tol(d[i][j])) return MetricViolation{Axiom::symmetry, i, j};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (d[a][c] + d[c][b] < d[a][b] - tol(d[a][b])) return MetricViolation{Axiom::triangle, a, b, c};
  return std::nullopt;
}

void to_json(nlohmann::json& j, const MetricSpace& space) {
  if (space.is_line()) {
    j = {{"kind", "line"}, {"left", space.left_extent()}, {"right", space.right_extent()}};
  } else {
    j = {{"kind", "general"}, {"dist", space.table()}, {"origin", space.origin_index()}};
  }
}

MetricSpace metric_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::schema_violation, "space: missing field 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "line") {
      return MetricSpace::line(j.at("left").get<double>(), j.at("right").get<double>());
    }
    if (kind == "general") {
      return MetricSpace::general(j.at("dist").get<std::vector<std::vector<double>>>(), j.value("origin", 0),
                                  j.value("repair", false));
    }
    if (kind == "star") {
      return MetricSpace::star(j.at("leaves").get<int>(), j.at("edge").get<double>());
    }
    if (kind == "euclidean") {
      return MetricSpace::euclidean(j.at("points").get<std::vector<std::pair<double, double>>>(),
                                    j.value("origin", 0));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::schema_violation, std::string("space: ") + e.what());
  } catch (const Error& e) {
    throw Error(Errc::schema_violation, std::string("space: ") + e.what());
  }
  throw Error(Errc::schema_violation, "space: unknown kind '" + kind + "'");
}

nlohmann::json site_to_json(const MetricSpace& space, const Location& site) {
  if (space.is_line()) return site.x;
  return site.node;
}

Location site_from_json(const MetricSpace& space, const nlohmann::json& j) {
  if (space.is_line()) {
    if (!j.is_number()) throw Error(Errc::schema_violation, "line site must be a number");
    return Location::point(j.get<double>());
  }
  if (!j.is_number_integer()) throw Error(Errc::schema_violation, "general site must be a vertex index");
  return Location::vertex(j.get<int>());
}

nlohmann::json location_to_json(const Location& loc) {
  if (loc.on_line()) return loc.x;
  if (loc.is_site()) return loc.node;
  return {{"from", loc.node}, {"to", loc.next}, {"along", loc.along}};
}

Location location_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Location::vertex(j.get<int>());
  if (j.is_number()) return Location::point(j.get<double>());
  return Location::on_edge(j.at("from").get<int>(), j.at("to").get<int>(), j.at("along").get<double>());
}

}  // namespace sloc
