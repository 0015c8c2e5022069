#include "wander/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wander {

Image::Image(int w, int h, Rgb fill) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t k = 0; k < rgb.size(); k += 3) {
    rgb[k] = fill[0];
    rgb[k + 1] = fill[1];
    rgb[k + 2] = fill[2];
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t k = 3 * (static_cast<std::size_t>(y) * width + x);
  return {rgb[k], rgb[k + 1], rgb[k + 2]};
}

void Image::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const std::size_t k = 3 * (static_cast<std::size_t>(y) * width + x);
  rgb[k] = c[0];
  rgb[k + 1] = c[1];
  rgb[k + 2] = c[2];
}

void Image::write_ppm(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "P6\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

Image Image::read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255) throw Error(ErrorKind::Io, "not an 8-bit P6 file: " + path);
  in.get();
  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (!in) throw Error(ErrorKind::Io, "truncated pixel data in " + path);
  return img;
}

cplx View::pixel_center(int x, int y) const {
  const double dx = (hi.real() - lo.real()) / width;
  const double dy = (hi.imag() - lo.imag()) / height;
  return {lo.real() + (x + 0.5) * dx, hi.imag() - (y + 0.5) * dy};
}

bool View::pixel_of(cplx z, int& x, int& y) const {
  const double fx = (z.real() - lo.real()) / (hi.real() - lo.real()) * width;
  const double fy = (hi.imag() - z.imag()) / (hi.imag() - lo.imag()) * height;
  if (!(fx >= 0.0 && fx < width && fy >= 0.0 && fy < height)) return false;
  x = static_cast<int>(fx);
  y = static_cast<int>(fy);
  return true;
}

std::vector<std::int32_t> escape_times(const AnalyticMap& f, const View& view, const RenderOptions& options) {
  std::vector<cplx> z(static_cast<std::size_t>(view.width) * view.height);
  for (int y = 0; y < view.height; ++y)
    for (int x = 0; x < view.width; ++x) z[static_cast<std::size_t>(y) * view.width + x] = view.pixel_center(x, y);
  std::vector<std::int32_t> out(z.size());
  if (options.parallel)
    kernels::escape_counts(f.value, z, options.max_iter, options.gate, out, options.gate_kind);
  else
    kernels::serial::escape_counts(f.value, z, options.max_iter, options.gate, out, options.gate_kind);
  return out;
}

Rgb palette_color(int palette, std::int32_t count, int max_iter) {
  if (count <= 0) return {0, 0, 0};
  if (palette == 1) {
    const int v = 255 - static_cast<int>((static_cast<long long>(count) * 215) / std::max(1, max_iter));
    const auto c = static_cast<std::uint8_t>(std::clamp(v, 40, 255));
    return {c, c, c};
  }
  // Six-step hue wheel in integer arithmetic so colors are exact.
  static constexpr Rgb wheel[6] = {{230, 60, 60}, {230, 160, 40}, {200, 210, 60},
                                   {60, 190, 90}, {50, 120, 220}, {150, 70, 200}};
  return wheel[(count - 1) % 6];
}

Image render_escape(const AnalyticMap& f, const View& view, const RenderOptions& options) {
  if (view.width < 1 || view.height < 1 || view.width > 8192 || view.height > 8192)
    throw Error(ErrorKind::Precondition, "resolution must be between 1 and 8192 per side");
  const auto counts = escape_times(f, view, options);
  Image img(view.width, view.height);
  for (int y = 0; y < view.height; ++y)
    for (int x = 0; x < view.width; ++x)
      img.set(x, y, palette_color(options.palette, counts[static_cast<std::size_t>(y) * view.width + x],
                                  options.max_iter));
  return img;
}

void draw_polyline(Image& image, const View& view, const PolyLoop& loop, Rgb color, bool closed) {
  if (loop.empty()) return;
  const double px = std::min((view.hi.real() - view.lo.real()) / view.width,
                             (view.hi.imag() - view.lo.imag()) / view.height);
  const std::size_t n = loop.size();
  const std::size_t edges = closed ? n : n - 1;
  for (std::size_t k = 0; k < edges; ++k) {
    const cplx a = loop[k], b = loop[(k + 1) % n];
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / (0.5 * px))));
    for (int s = 0; s <= steps; ++s) {
      int x, y;
      if (view.pixel_of(a + (b - a) * (static_cast<double>(s) / steps), x, y)) image.set(x, y, color);
    }
  }
}

void draw_circle(Image& image, const View& view, cplx center, double radius, Rgb color) {
  const int n = std::max(64, static_cast<int>(std::ceil(2.0 * kPi * radius / (0.5 * (view.hi.real() - view.lo.real()) /
                                                                                view.width))));
  PolyLoop loop(n);
  for (int k = 0; k < n; ++k) loop[k] = center + std::polar(radius, 2.0 * kPi * k / n);
  draw_polyline(image, view, loop, color);
}

void draw_hline(Image& image, const View& view, double y, Rgb color) {
  draw_polyline(image, view, {cplx(view.lo.real(), y), cplx(view.hi.real() - 1e-12, y)}, color, false);
}

}  // namespace wander
