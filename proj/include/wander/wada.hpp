#pragma once

// Lakes-of-Wada islands on a grid: an island with lakes, then rounds of
// canals dug from every water body toward the land farthest from it.

#include <string>
#include <vector>

#include "wander/geometry.hpp"

namespace wander {

struct WadaOptions {
  int lakes = 2;
  int rounds = 4;
  int grid = 256;  // cells per side of the window [-1, 1]^2
  double island_radius = 0.7;
  double lake_radius = 0.12;
  double lake_ring = 0.35;
};

struct WadaIsland {
  Window window;
  CompactSet land;           // land itself (not filled)
  std::vector<int> body;     // per cell: -1 for land, else water body index (0 = sea)
  int bodies = 0;
  int iteration = 0;         // canal rounds completed
  /// distances[r][b]: max over land cells of the distance to body b after round r
  /// (r = 0 is the pre-canal state).
  std::vector<std::vector<double>> distances;
  std::vector<std::string> log;  // skipped or truncated canals

  Mask water_mask(int b) const;
  /// fill(land): the full compact set bounded by the sea.
  CompactSet filled() const;
};

/// Throws Precondition for lakes < 2 or grid < 64.
WadaIsland wada_build(const WadaOptions& options);

/// Max over land cells of the Euclidean distance to body b.
double max_distance_to_body(const WadaIsland& island, int b);

}  // namespace wander
