#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sloc/metric.hpp"

namespace sloc {

// An ordered visit plan anchored at a point. `order` indexes the input points
// (or blocks, for DARP tours); `visits` holds the concrete sites in visiting
// order, two per block for DARP tours.
struct Tour {
  Location anchor;
  std::vector<int> order;
  std::vector<Location> visits;
  bool closed = false;
  double length = 0.0;
  bool heuristic = false;
};

// Source/destination pair traversed atomically by DARP tours.
struct Block {
  Location first;
  Location second;
};

struct TourCaps {
  int tsp_points = 14;
  int darp_blocks = 9;
};

// Sum of hop lengths starting at the anchor, plus the return hop if closed.
double tour_length(const MetricSpace& space, const Location& anchor, std::span<const Location> visits, bool closed);

// Minimum-length anchored tour by subset dynamic programming; ties go to the
// lowest point index. Throws Errc::size_cap_exceeded above caps.tsp_points.
Tour tsp_tour_exact(const MetricSpace& space, std::span<const Location> points, const Location& anchor, bool closed,
                    const TourCaps& caps = {});

// Nearest neighbour construction, then 2-opt and single-item relocation to a local optimum.
Tour tsp_tour_heuristic(const MetricSpace& space, std::span<const Location> points, const Location& anchor,
                        bool closed);

// Exact when within the cap, heuristic (flagged) otherwise.
Tour tsp_tour(const MetricSpace& space, std::span<const Location> points, const Location& anchor, bool closed,
              const TourCaps& caps = {});

// Minimum-length tour over atomic blocks first -> second.
Tour darp_tour_exact(const MetricSpace& space, std::span<const Block> blocks, const Location& anchor, bool closed,
                     const TourCaps& caps = {});
Tour darp_tour_heuristic(const MetricSpace& space, std::span<const Block> blocks, const Location& anchor, bool closed);
Tour darp_tour(const MetricSpace& space, std::span<const Block> blocks, const Location& anchor, bool closed,
               const TourCaps& caps = {});

// Partition into k anchored tours minimizing the longest one.
struct KTours {
  std::vector<Tour> tours;  // exactly k entries, empty tours allowed
  double max_length = 0.0;
  bool heuristic = false;
};

KTours opt_ktour_minmax(const MetricSpace& space, std::span<const Location> points, int k, const Location& anchor,
                        bool closed = false, const TourCaps& caps = {});
KTours opt_ktour_minmax(const MetricSpace& space, std::span<const Block> blocks, int k, const Location& anchor,
                        bool closed = false, const TourCaps& caps = {});

}  // namespace sloc
