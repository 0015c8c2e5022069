#pragma once

// Compact plane sets on rasters: fill, dilation shells, marching-squares
// boundary loops and boundary nets.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wander/core.hpp"

namespace wander {

/// Axis-aligned raster window. Cell (i, j) has its center at
/// (x0 + (i + 1/2) cell, y0 + (j + 1/2) cell); j grows upward.
struct Window {
  double x0 = 0.0;
  double y0 = 0.0;
  double cell = 1.0;
  int nx = 0;
  int ny = 0;

  static Window around(cplx lo, cplx hi, double cell);

  cplx center(int i, int j) const { return {x0 + (i + 0.5) * cell, y0 + (j + 0.5) * cell}; }
  bool locate(cplx z, int& i, int& j) const;
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  cplx lo() const { return {x0, y0}; }
  cplx hi() const { return {x0 + nx * cell, y0 + ny * cell}; }
  bool operator==(const Window&) const = default;
};

using Mask = std::vector<std::uint8_t>;
using PolyLoop = std::vector<cplx>;

struct Circle {
  cplx center;
  double radius;
};

/// A full compact set: raster mask, its boundary loops, and (when the set is
/// a closed disc) the exact circle so samplers can avoid raster error.
struct CompactSet {
  Window window;
  Mask mask;
  std::vector<PolyLoop> loops;
  std::optional<Circle> circle;

  bool contains(cplx z) const;
  /// Distance from z to the nearest loop vertex (or the exact circle).
  double boundary_distance(cplx z) const;
  std::size_t cell_count() const;
  double perimeter() const;
  /// Points on the boundary loops, spaced at most `spacing` apart along arc length.
  std::vector<cplx> boundary_samples(double spacing) const;
  /// Centers of masked cells on a lattice of the given spacing (at least one cell).
  std::vector<cplx> interior_samples(double spacing) const;
  /// Approximate Hausdorff distance max_{z in this} dist(z, other), on cell centers.
  double max_distance_to(const CompactSet& other) const;
};

enum class Connectivity { Four, Eight };

/// Connected-component labels (0 = background, 1..count) and the count.
struct Labels {
  std::vector<int> label;
  int count = 0;
};
Labels label_components(int nx, int ny, const Mask& mask, Connectivity conn);

/// Squared-distance transform in plane units: for every cell, the distance
/// from its center to the nearest masked cell center.
std::vector<double> distance_to_mask(const Window& w, const Mask& mask);

Mask dilate(const Window& w, const Mask& mask, double radius);
Mask rasterize_disc(const Window& w, cplx center, double radius);
Mask rasterize_polygon(const Window& w, const PolyLoop& polygon);
bool point_in_polygon(const PolyLoop& polygon, cplx z);

/// Marching-squares boundary loops on cell centers. Land is 4-connected:
/// saddle cells keep diagonal land corners apart.
std::vector<PolyLoop> extract_loops(const Window& w, const Mask& mask);
PolyLoop simplify_loop(const PolyLoop& loop, double tolerance);
bool is_simple(const PolyLoop& loop);
double loop_length(const PolyLoop& loop);
/// Dense copy of a closed loop with consecutive points at most `spacing` apart.
PolyLoop resample_loop(const PolyLoop& loop, double spacing);

/// True when the complement of the mask (plus the window exterior) is one
/// 8-connected region.
bool is_full(const Window& w, const Mask& mask);

/// Union of the region with all bounded complementary components.
/// Throws TruncationOverflow if the region touches the window frame.
CompactSet fill_compact(const Window& w, const Mask& region);

/// Builds a CompactSet for the closed disc, on a window padded by `pad` cells.
CompactSet disc_set(cplx center, double radius, double cell, int pad = 4);

/// Raster of a simple polygon whose exact outline is kept as the only loop.
CompactSet polygon_set(const PolyLoop& polygon, double cell, int pad = 4);

/// Applies z -> scale z + shift (scale > 0), reusing the raster.
CompactSet transform(const CompactSet& set, double scale, cplx shift);
/// Same set on a window grown by `cells` on every side (cell grid kept).
CompactSet pad_set(const CompactSet& set, int cells);

// ---------------------------------------------------------------------------

struct ShellSequence {
  CompactSet target;
  std::vector<CompactSet> shells;  // shells[m] = K_{m+1}, built with radii[m]
  std::vector<double> radii;
};

/// Shells fill(dilate(K, r_m)) with per-component Jordan smoothing. With no
/// explicit radii, shell j (1-based) uses r = 1/j.
ShellSequence shell_sequence(const CompactSet& k, int count, const std::vector<double>& radii = {});

/// Builds one smoothed shell fill(dilate(K, r)).
CompactSet shell_at(const CompactSet& k, double radius);

enum class NetMode { Full, MinusArc };

struct BoundaryNet {
  int level = 0;
  std::vector<cplx> points;
  NetMode mode = NetMode::Full;
  cplx arc_center{};
  double arc_diameter = 0.0;   // measured diameter of the excluded arc
  std::vector<cplx> arc_points;  // dense samples of the excluded arc
  double spacing = 0.0;          // 2^{-level}
  double sampling_density = 0.0; // dense resample step used
};

/// Net on shell `shells.shells[index]` with density 2^{-level}.
BoundaryNet boundary_net(const ShellSequence& shells, int index, int level, NetMode mode,
                         cplx arc_center = {});
/// Same, for an arbitrary set.
BoundaryNet boundary_net(const CompactSet& shell, int level, NetMode mode, cplx arc_center = {});

// ---------------------------------------------------------------------------
// Serialization: PBM P4 mask plus a text sidecar with the window.

void write_pbm(const std::string& path, const Window& w, const Mask& mask);
void write_compact_set(const std::string& stem, const CompactSet& set);
CompactSet read_compact_set(const std::string& stem);

}  // namespace wander
