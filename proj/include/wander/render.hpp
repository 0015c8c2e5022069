#pragma once

// Escape-time pictures of stage functions, with geometry overlays, written as
// binary PPM.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wander/core.hpp"
#include "wander/geometry.hpp"
#include "wander/kernels.hpp"

namespace wander {

using Rgb = std::array<std::uint8_t, 3>;

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first

  Image() = default;
  Image(int w, int h, Rgb fill = {0, 0, 0});
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  /// "P6\n<w> <h>\n255\n" followed by the rows top-down.
  void write_ppm(const std::string& path) const;
  static Image read_ppm(const std::string& path);
};

/// Plane rectangle shown by an image; pixel (x, y) has its center at
/// lo.re + (x + 1/2) dx, hi.im - (y + 1/2) dy.
struct View {
  cplx lo{-1.0, -1.0};
  cplx hi{1.0, 1.0};
  int width = 256;
  int height = 256;

  cplx pixel_center(int x, int y) const;
  /// Pixel containing z; false outside the view.
  bool pixel_of(cplx z, int& x, int& y) const;
};

struct RenderOptions {
  int max_iter = 64;
  double gate = 1e6;
  kernels::Gate gate_kind = kernels::Gate::Modulus;
  int palette = 0;  // 0: cycling hues, 1: grayscale
  bool parallel = true;
};

/// First-exit counts per pixel, row-major top-down (0 = never crossed).
std::vector<std::int32_t> escape_times(const AnalyticMap& f, const View& view, const RenderOptions& options);

/// Color of an exit count. Count 0 is black in every palette.
Rgb palette_color(int palette, std::int32_t count, int max_iter);

/// Throws Precondition for resolutions above 8192 x 8192.
Image render_escape(const AnalyticMap& f, const View& view, const RenderOptions& options);

/// Outline drawing in fixed colors: K loops white, strip edges cyan, discs yellow.
inline constexpr Rgb kOverlaySet{255, 255, 255};
inline constexpr Rgb kOverlayStrip{0, 255, 255};
inline constexpr Rgb kOverlayDisc{255, 255, 0};

void draw_polyline(Image& image, const View& view, const PolyLoop& loop, Rgb color, bool closed = true);
void draw_circle(Image& image, const View& view, cplx center, double radius, Rgb color);
/// Horizontal line Im z = y across the view.
void draw_hline(Image& image, const View& view, double y, Rgb color);

}  // namespace wander
