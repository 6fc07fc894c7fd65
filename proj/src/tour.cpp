#include "sloc/tour.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace sloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Points and blocks share one cost model: item j is entered at `first`, left
// at `second`, and costs `inner` to traverse.
struct Items {
  int n = 0;
  std::vector<double> start;               // anchor -> item
  std::vector<std::vector<double>> trans;  // item i exit -> item j (incl. inner of j)
  std::vector<double> ret;                 // item exit -> anchor
  std::vector<Block> blocks;
};

Items make_items(const MetricSpace& space, std::span<const Block> blocks, const Location& anchor) {
  Items it;
  it.n = static_cast<int>(blocks.size());
  it.blocks.assign(blocks.begin(), blocks.end());
  it.start.resize(it.n);
  it.ret.resize(it.n);
  it.trans.assign(it.n, std::vector<double>(it.n, 0.0));
  for (int j = 0; j < it.n; ++j) {
    const double inner = space.dist(blocks[j].first, blocks[j].second);
    it.start[j] = space.dist(anchor, blocks[j].first) + inner;
    it.ret[j] = space.dist(blocks[j].second, anchor);
    for (int i = 0; i < it.n; ++i) {
      it.trans[i][j] = space.dist(blocks[i].second, blocks[j].first) + inner;
    }
  }
  return it;
}

std::vector<Block> point_blocks(std::span<const Location> points) {
  std::vector<Block> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(Block{p, p});
  return out;
}

double order_length(const Items& it, const std::vector<int>& order, bool closed) {
  if (order.empty()) return 0.0;
  double len = it.start[order[0]];
  for (std::size_t i = 1; i < order.size(); ++i) len += it.trans[order[i - 1]][order[i]];
  if (closed) len += it.ret[order.back()];
  return len;
}

// Held-Karp table over all subsets: best[mask][j] is the shortest path from
// the anchor covering exactly `mask` and ending with item j.
struct SubsetDp {
  int n = 0;
  std::vector<double> best;
  std::vector<signed char> parent;

  double& at(unsigned mask, int j) { return best[static_cast<std::size_t>(mask) * n + j]; }
  double at(unsigned mask, int j) const { return best[static_cast<std::size_t>(mask) * n + j]; }
  signed char& par(unsigned mask, int j) { return parent[static_cast<std::size_t>(mask) * n + j]; }
  signed char par(unsigned mask, int j) const { return parent[static_cast<std::size_t>(mask) * n + j]; }
};

SubsetDp run_subset_dp(const Items& it) {
  SubsetDp dp;
  dp.n = it.n;
  const unsigned full = 1u << it.n;
  dp.best.assign(static_cast<std::size_t>(full) * std::max(it.n, 1), kInf);
  dp.parent.assign(dp.best.size(), -1);
  for (int j = 0; j < it.n; ++j) dp.at(1u << j, j) = it.start[j];
  for (unsigned mask = 1; mask < full; ++mask) {
    for (int j = 0; j < it.n; ++j) {
      if (!(mask & (1u << j))) continue;
      const unsigned prev = mask ^ (1u << j);
      if (prev == 0) continue;
      double best = kInf;
      signed char arg = -1;
      for (int i = 0; i < it.n; ++i) {
        if (!(prev & (1u << i))) continue;
        const double cand = dp.at(prev, i) + it.trans[i][j];
        if (cand < best - kEps) {
          best = cand;
          arg = static_cast<signed char>(i);
        }
      }
      dp.at(mask, j) = best;
      dp.par(mask, j) = arg;
    }
  }
  return dp;
}

// Best ending for a subset; returns (length, last item).
std::pair<double, int> subset_best(const SubsetDp& dp, const Items& it, unsigned mask, bool closed) {
  if (mask == 0) return {0.0, -1};
  double best = kInf;
  int arg = -1;
  for (int j = 0; j < it.n; ++j) {
    if (!(mask & (1u << j))) continue;
    const double cand = dp.at(mask, j) + (closed ? it.ret[j] : 0.0);
    if (cand < best - kEps) {
      best = cand;
      arg = j;
    }
  }
  return {best, arg};
}

std::vector<int> subset_order(const SubsetDp& dp, unsigned mask, int last) {
  std::vector<int> order;
  while (last >= 0) {
    order.push_back(last);
    const int prev = dp.par(mask, last);
    mask ^= (1u << last);
    last = prev;
  }
  std::reverse(order.begin(), order.end());
  return order;
}

Tour make_tour(const Items& it, const Location& anchor, std::vector<int> order, bool closed, bool heuristic) {
  Tour t;
  t.anchor = anchor;
  t.closed = closed;
  t.heuristic = heuristic;
  t.length = order_length(it, order, closed);
  for (int j : order) {
    t.visits.push_back(it.blocks[j].first);
    t.visits.push_back(it.blocks[j].second);
  }
  t.order = std::move(order);
  return t;
}

Tour point_tour(const Items& it, const Location& anchor, std::vector<int> order, bool closed, bool heuristic) {
  Tour t = make_tour(it, anchor, std::move(order), closed, heuristic);
  t.visits.clear();
  for (int j : t.order) t.visits.push_back(it.blocks[j].first);
  return t;
}

std::vector<int> exact_order(const Items& it, bool closed) {
  if (it.n == 0) return {};
  const SubsetDp dp = run_subset_dp(it);
  const unsigned full = (1u << it.n) - 1;
  const auto [len, last] = subset_best(dp, it, full, closed);
  (void)len;
  return subset_order(dp, full, last);
}

void two_opt(const Items& it, std::vector<int>& order, bool closed) {
  const int n = static_cast<int>(order.size());
  if (n < 2) return;
  double current = order_length(it, order, closed);
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < n - 1 && !improved; ++i) {
      for (int j = i + 1; j < n && !improved; ++j) {
        std::reverse(order.begin() + i, order.begin() + j + 1);
        const double cand = order_length(it, order, closed);
        if (cand < current - kEps) {
          current = cand;
          improved = true;
        } else {
          std::reverse(order.begin() + i, order.begin() + j + 1);
        }
      }
    }
  }
}

// Moves single items to another slot; catches the anchor-side detours 2-opt misses.
bool relocate(const Items& it, std::vector<int>& order, bool closed) {
  const int n = static_cast<int>(order.size());
  const double current = order_length(it, order, closed);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<int> cand = order;
      const int item = cand[i];
      cand.erase(cand.begin() + i);
      cand.insert(cand.begin() + j, item);
      if (order_length(it, cand, closed) < current - kEps) {
        order = std::move(cand);
        return true;
      }
    }
  }
  return false;
}

std::vector<int> heuristic_order(const Items& it, bool closed) {
  std::vector<int> order;
  std::vector<char> used(it.n, 0);
  int last = -1;
  for (int step = 0; step < it.n; ++step) {
    int arg = -1;
    double best = kInf;
    for (int j = 0; j < it.n; ++j) {
      if (used[j]) continue;
      const double c = last < 0 ? it.start[j] : it.trans[last][j];
      if (c < best - kEps) {
        best = c;
        arg = j;
      }
    }
    used[arg] = 1;
    order.push_back(arg);
    last = arg;
  }
  do {
    two_opt(it, order, closed);
  } while (relocate(it, order, closed));
  return order;
}

void check_cap(int n, int cap, const char* what) {
  if (n > cap) {
    throw Error(Errc::size_cap_exceeded,
                std::string(what) + ": " + std::to_string(n) + " items exceed exact cap " + std::to_string(cap));
  }
}

KTours ktours_exact(const Items& it, int k, const Location& anchor, bool closed, bool points) {
  const unsigned full = (1u << it.n) - 1;
  const SubsetDp dp = run_subset_dp(it);
  const unsigned size = 1u << it.n;
  std::vector<double> single(size, 0.0);
  for (unsigned s = 0; s < size; ++s) single[s] = subset_best(dp, it, s, closed).first;

  // level[c][S]: best max-length using c tours for S; pick[c][S]: subset for one tour.
  std::vector<std::vector<double>> level(k + 1, std::vector<double>(size, kInf));
  std::vector<std::vector<unsigned>> pick(k + 1, std::vector<unsigned>(size, 0));
  level[1] = single;
  for (unsigned s = 0; s < size; ++s) pick[1][s] = s;
  for (int c = 2; c <= k; ++c) {
    for (unsigned s = 0; s < size; ++s) {
      // Enumerate submasks T of s in descending order, including the empty set.
      double best = kInf;
      unsigned arg = 0;
      for (unsigned t = s;; t = (t - 1) & s) {
        const double cand = std::max(single[t], level[c - 1][s ^ t]);
        if (cand < best - kEps) {
          best = cand;
          arg = t;
        }
        if (t == 0) break;
      }
      level[c][s] = best;
      pick[c][s] = arg;
    }
  }

  KTours out;
  unsigned rest = full;
  std::vector<unsigned> parts;
  for (int c = k; c >= 1; --c) {
    const unsigned t = pick[c][rest];
    parts.push_back(t);
    rest ^= t;
  }
  // Non-empty parts first, ordered by their lowest item index.
  std::stable_sort(parts.begin(), parts.end(), [](unsigned a, unsigned b) {
    if ((a == 0) != (b == 0)) return a != 0;
    if (a == 0) return false;
    return __builtin_ctz(a) < __builtin_ctz(b);
  });
  for (unsigned t : parts) {
    const auto [len, last] = subset_best(dp, it, t, closed);
    (void)len;
    std::vector<int> order = subset_order(dp, t, last);
    out.tours.push_back(points ? point_tour(it, anchor, std::move(order), closed, false)
                               : make_tour(it, anchor, std::move(order), closed, false));
    out.max_length = std::max(out.max_length, out.tours.back().length);
  }
  return out;
}

KTours ktours_heuristic(const Items& it, int k, const Location& anchor, bool closed, bool points) {
  std::vector<std::vector<int>> groups(k);
  auto group_len = [&](std::vector<int> g) {
    if (g.empty()) return 0.0;
    Items sub;
    sub.n = static_cast<int>(g.size());
    sub.start.resize(sub.n);
    sub.ret.resize(sub.n);
    sub.trans.assign(sub.n, std::vector<double>(sub.n));
    for (int a = 0; a < sub.n; ++a) {
      sub.start[a] = it.start[g[a]];
      sub.ret[a] = it.ret[g[a]];
      for (int b = 0; b < sub.n; ++b) sub.trans[a][b] = it.trans[g[a]][g[b]];
    }
    const std::vector<int> ord = heuristic_order(sub, closed);
    return order_length(sub, ord, closed);
  };
  std::vector<double> lens(k, 0.0);
  for (int j = 0; j < it.n; ++j) {
    int arg = 0;
    double best = kInf;
    double best_len = 0.0;
    for (int c = 0; c < k; ++c) {
      std::vector<int> g = groups[c];
      g.push_back(j);
      const double l = group_len(g);
      double worst = l;
      for (int o = 0; o < k; ++o)
        if (o != c) worst = std::max(worst, lens[o]);
      if (worst < best - kEps) {
        best = worst;
        arg = c;
        best_len = l;
      }
    }
    groups[arg].push_back(j);
    lens[arg] = best_len;
  }
  KTours out;
  out.heuristic = true;
  for (int c = 0; c < k; ++c) {
    std::vector<int> order = groups[c];
    // Order within a group by the shared heuristic on the original items.
    std::vector<int> ord;
    if (!order.empty()) {
      Items sub;
      sub.n = static_cast<int>(order.size());
      sub.start.resize(sub.n);
      sub.ret.resize(sub.n);
      sub.trans.assign(sub.n, std::vector<double>(sub.n));
      for (int a = 0; a < sub.n; ++a) {
        sub.start[a] = it.start[order[a]];
        sub.ret[a] = it.ret[order[a]];
        for (int b = 0; b < sub.n; ++b) sub.trans[a][b] = it.trans[order[a]][order[b]];
      }
      for (int local : heuristic_order(sub, closed)) ord.push_back(order[local]);
    }
    Tour t = points ? point_tour(it, anchor, std::move(ord), closed, true) : make_tour(it, anchor, std::move(ord), closed, true);
    out.max_length = std::max(out.max_length, t.length);
    out.tours.push_back(std::move(t));
  }
  return out;
}

}  // namespace

double tour_length(const MetricSpace& space, const Location& anchor, std::span<const Location> visits, bool closed) {
  double len = 0.0;
  Location at = anchor;
  for (const auto& v : visits) {
    len += space.dist(at, v);
    at = v;
  }
  if (closed) len += space.dist(at, anchor);
  return len;
}

Tour tsp_tour_exact(const MetricSpace& space, std::span<const Location> points, const Location& anchor, bool closed,
                    const TourCaps& caps) {
  check_cap(static_cast<int>(points.size()), caps.tsp_points, "tsp_tour_exact");
  const auto blocks = point_blocks(points);
  const Items it = make_items(space, blocks, anchor);
  return point_tour(it, anchor, exact_order(it, closed), closed, false);
}

Tour tsp_tour_heuristic(const MetricSpace& space, std::span<const Location> points, const Location& anchor,
                        bool closed) {
  const auto blocks = point_blocks(points);
  const Items it = make_items(space, blocks, anchor);
  return point_tour(it, anchor, heuristic_order(it, closed), closed, true);
}

Tour tsp_tour(const MetricSpace& space, std::span<const Location> points, const Location& anchor, bool closed,
              const TourCaps& caps) {
  if (static_cast<int>(points.size()) <= caps.tsp_points) return tsp_tour_exact(space, points, anchor, closed, caps);
  return tsp_tour_heuristic(space, points, anchor, closed);
}

Tour darp_tour_exact(const MetricSpace& space, std::span<const Block> blocks, const Location& anchor, bool closed,
                     const TourCaps& caps) {
  check_cap(static_cast<int>(blocks.size()), caps.darp_blocks, "darp_tour_exact");
  const Items it = make_items(space, blocks, anchor);
  return make_tour(it, anchor, exact_order(it, closed), closed, false);
}

Tour darp_tour_heuristic(const MetricSpace& space, std::span<const Block> blocks, const Location& anchor, bool closed) {
  const Items it = make_items(space, blocks, anchor);
  return make_tour(it, anchor, heuristic_order(it, closed), closed, true);
}

Tour darp_tour(const MetricSpace& space, std::span<const Block> blocks, const Location& anchor, bool closed,
               const TourCaps& caps) {
  if (static_cast<int>(blocks.size()) <= caps.darp_blocks) return darp_tour_exact(space, blocks, anchor, closed, caps);
  return darp_tour_heuristic(space, blocks, anchor, closed);
}

KTours opt_ktour_minmax(const MetricSpace& space, std::span<const Location> points, int k, const Location& anchor,
                        bool closed, const TourCaps& caps) {
  if (k < 1) throw Error(Errc::invalid_argument, "opt_ktour_minmax: k must be >= 1");
  const auto blocks = point_blocks(points);
  const Items it = make_items(space, blocks, anchor);
  if (it.n <= caps.tsp_points) return ktours_exact(it, k, anchor, closed, true);
  return ktours_heuristic(it, k, anchor, closed, true);
}

KTours opt_ktour_minmax(const MetricSpace& space, std::span<const Block> blocks, int k, const Location& anchor,
                        bool closed, const TourCaps& caps) {
  if (k < 1) throw Error(Errc::invalid_argument, "opt_ktour_minmax: k must be >= 1");
  const Items it = make_items(space, blocks, anchor);
  if (it.n <= caps.darp_blocks) return ktours_exact(it, k, anchor, closed, false);
  return ktours_heuristic(it, k, anchor, closed, false);
}

}  // namespace sloc
