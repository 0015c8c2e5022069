#include "wander/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "wander/kernels.hpp"

namespace wander {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::TruncationOverflow: return "truncation overflow";
    case ErrorKind::ResolutionExceeded: return "resolution exceeded";
    case ErrorKind::FitFailed: return "fit failed";
    case ErrorKind::ConditioningFailure: return "conditioning failure";
    case ErrorKind::QuadratureUnresolved: return "quadrature unresolved";
    case ErrorKind::InversionFailure: return "inversion failure";
    case ErrorKind::BranchEscape: return "branch escape";
    case ErrorKind::ScaffoldBreach: return "scaffold breach";
    case ErrorKind::RUnreachable: return "R unreachable";
    case ErrorKind::SpikeThresholdUnreachable: return "spike threshold unreachable";
    case ErrorKind::EtaExhaustion: return "eta exhaustion";
    case ErrorKind::StageUnreachable: return "stage unreachable";
    case ErrorKind::RegionSeparation: return "region separation failure";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt17(cplx z) { return fmt17(z.real()) + " " + fmt17(z.imag()); }

// ---------------------------------------------------------------------------

Window Window::around(cplx lo, cplx hi, double cell) {
  if (!(cell > 0.0)) throw Error(ErrorKind::Domain, "cell size must be positive");
  Window w;
  w.cell = cell;
  w.x0 = lo.real();
  w.y0 = lo.imag();
  w.nx = std::max(1, static_cast<int>(std::ceil((hi.real() - lo.real()) / cell - 1e-9)));
  w.ny = std::max(1, static_cast<int>(std::ceil((hi.imag() - lo.imag()) / cell - 1e-9)));
  return w;
}

bool Window::locate(cplx z, int& i, int& j) const {
  const double fx = (z.real() - x0) / cell;
  const double fy = (z.imag() - y0) / cell;
  if (!(fx >= 0.0 && fy >= 0.0 && fx < nx && fy < ny)) return false;
  i = static_cast<int>(fx);
  j = static_cast<int>(fy);
  return true;
}

bool CompactSet::contains(cplx z) const {
  if (circle) return std::abs(z - circle->center) <= circle->radius;
  int i, j;
  if (!window.locate(z, i, j)) return false;
  return mask[window.index(i, j)] != 0;
}

double CompactSet::boundary_distance(cplx z) const {
  if (circle) return std::abs(std::abs(z - circle->center) - circle->radius);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& loop : loops)
    for (cplx v : loop) best = std::min(best, std::abs(v - z));
  return best;
}

std::size_t CompactSet::cell_count() const {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto b) { return b != 0; }));
}

double CompactSet::perimeter() const {
  if (circle) return 2.0 * kPi * circle->radius;
  double total = 0.0;
  for (const auto& loop : loops) total += loop_length(loop);
  return total;
}

std::vector<cplx> CompactSet::boundary_samples(double spacing) const {
  std::vector<cplx> out;
  if (circle) {
    const int n = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * circle->radius / spacing)));
    out.reserve(n);
    for (int k = 0; k < n; ++k) out.push_back(circle->center + std::polar(circle->radius, 2.0 * kPi * k / n));
    return out;
  }
  for (const auto& loop : loops) {
    const auto dense = resample_loop(loop, spacing);
    out.insert(out.end(), dense.begin(), dense.end());
  }
  return out;
}

std::vector<cplx> CompactSet::interior_samples(double spacing) const {
  std::vector<cplx> out;
  const int step = std::max(1, static_cast<int>(std::round(spacing / window.cell)));
  for (int j = step / 2; j < window.ny; j += step)
    for (int i = step / 2; i < window.nx; i += step) {
      const cplx z = window.center(i, j);
      if (circle ? std::abs(z - circle->center) <= circle->radius : mask[window.index(i, j)] != 0)
        out.push_back(z);
    }
  return out;
}

double CompactSet::max_distance_to(const CompactSet& other) const {
  // Distance transform of `other` on this window, then max over our cells.
  Mask resampled(window.size(), 0);
  for (int j = 0; j < window.ny; ++j)
    for (int i = 0; i < window.nx; ++i) resampled[window.index(i, j)] = other.contains(window.center(i, j)) ? 1 : 0;
  const auto d2 = distance_to_mask(window, resampled);
  double worst = 0.0;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k]) worst = std::max(worst, d2[k]);
  return std::sqrt(worst);
}

// ---------------------------------------------------------------------------

Labels label_components(int nx, int ny, const Mask& mask, Connectivity conn) {
  Labels out;
  out.label.assign(static_cast<std::size_t>(nx) * ny, 0);
  std::vector<int> stack;
  const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const int d8[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  const int nd = conn == Connectivity::Four ? 4 : 8;
  const int(*dirs)[2] = conn == Connectivity::Four ? d4 : d8;
  for (int start = 0; start < nx * ny; ++start) {
    if (!mask[start] || out.label[start]) continue;
    const int id = ++out.count;
    out.label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      const int ci = c % nx, cj = c / nx;
      for (int d = 0; d < nd; ++d) {
        const int ni = ci + dirs[d][0], nj = cj + dirs[d][1];
        if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
        const int n = nj * nx + ni;
        if (mask[n] && !out.label[n]) {
          out.label[n] = id;
          stack.push_back(n);
        }
      }
    }
  }
  return out;
}

std::vector<double> distance_to_mask(const Window& w, const Mask& mask) {
  auto d2 = kernels::squared_distance_transform(w.nx, w.ny, mask);
  const double c2 = w.cell * w.cell;
  for (double& v : d2) v *= c2;
  return d2;
}

Mask dilate(const Window& w, const Mask& mask, double radius) {
  const auto d2 = distance_to_mask(w, mask);
  const double r2 = radius * radius * (1.0 + 1e-12);
  Mask out(w.size(), 0);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = d2[k] <= r2 ? 1 : 0;
  return out;
}

Mask rasterize_disc(const Window& w, cplx center, double radius) {
  Mask out(w.size(), 0);
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) out[w.index(i, j)] = std::abs(w.center(i, j) - center) <= radius ? 1 : 0;
  return out;
}

bool point_in_polygon(const PolyLoop& poly, cplx z) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
    const cplx p = poly[a], q = poly[b];
    if ((p.imag() > z.imag()) != (q.imag() > z.imag())) {
      const double x = p.real() + (z.imag() - p.imag()) * (q.real() - p.real()) / (q.imag() - p.imag());
      if (z.real() < x) inside = !inside;
    }
  }
  return inside;
}

Mask rasterize_polygon(const Window& w, const PolyLoop& polygon) {
  Mask out(w.size(), 0);
  // Scanline crossings per row.
  std::vector<double> xs;
  const std::size_t n = polygon.size();
  for (int j = 0; j < w.ny; ++j) {
    const double y = w.y0 + (j + 0.5) * w.cell;
    xs.clear();
    for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
      const cplx p = polygon[a], q = polygon[b];
      if ((p.imag() > y) != (q.imag() > y))
        xs.push_back(p.real() + (y - p.imag()) * (q.real() - p.real()) / (q.imag() - p.imag()));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int i0 = std::max(0, static_cast<int>(std::ceil((xs[k] - w.x0) / w.cell - 0.5)));
      const int i1 = std::min(w.nx - 1, static_cast<int>(std::floor((xs[k + 1] - w.x0) / w.cell - 0.5)));
      for (int i = i0; i <= i1; ++i) out[w.index(i, j)] = 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Marching squares. Dual cell (i, j), i in [-1, nx-1], has corners at the
// cell centers (i,j) (i+1,j) (i+1,j+1) (i,j+1). Boundary vertices sit at the
// midpoints of dual edges whose two corners disagree.

namespace {

struct EdgeKey {
  // kind 0: horizontal edge between (i,j) and (i+1,j); kind 1: vertical between (i,j) and (i,j+1).
  static long long make(int kind, int i, int j, int nx) {
    return (static_cast<long long>(j + 1) * (nx + 2) + (i + 1)) * 2 + kind;
  }
};

}  // namespace

std::vector<PolyLoop> extract_loops(const Window& w, const Mask& mask) {
  const int nx = w.nx, ny = w.ny;
  auto at = [&](int i, int j) -> int {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return 0;
    return mask[w.index(i, j)] ? 1 : 0;
  };
  auto point_of = [&](long long key) -> cplx {
    const int kind = static_cast<int>(key % 2);
    const long long cell = key / 2;
    const int i = static_cast<int>(cell % (nx + 2)) - 1;
    const int j = static_cast<int>(cell / (nx + 2)) - 1;
    const cplx c = w.center(i, j);
    return kind == 0 ? c + cplx(0.5 * w.cell, 0.0) : c + cplx(0.0, 0.5 * w.cell);
  };

  std::unordered_map<long long, std::vector<long long>> adj;
  auto link = [&](long long a, long long b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };

  for (int j = -1; j < ny; ++j)
    for (int i = -1; i < nx; ++i) {
      const int b0 = at(i, j), b1 = at(i + 1, j), b2 = at(i + 1, j + 1), b3 = at(i, j + 1);
      const int code = b0 | (b1 << 1) | (b2 << 2) | (b3 << 3);
      if (code == 0 || code == 15) continue;
      const long long bottom = EdgeKey::make(0, i, j, nx);
      const long long right = EdgeKey::make(1, i + 1, j, nx);
      const long long top = EdgeKey::make(0, i, j + 1, nx);
      const long long left = EdgeKey::make(1, i, j, nx);
      if (code == 5) {  // b0 and b2 land, diagonal: keep apart
        link(bottom, left);
        link(top, right);
        continue;
      }
      if (code == 10) {  // b1 and b3 land
        link(bottom, right);
        link(top, left);
        continue;
      }
      std::vector<long long> hits;
      if (b0 != b1) hits.push_back(bottom);
      if (b1 != b2) hits.push_back(right);
      if (b2 != b3) hits.push_back(top);
      if (b3 != b0) hits.push_back(left);
      if (hits.size() == 2) link(hits[0], hits[1]);
    }

  std::vector<PolyLoop> loops;
  std::unordered_map<long long, bool> used;
  // Deterministic traversal order: sort the keys.
  std::vector<long long> keys;
  keys.reserve(adj.size());
  for (const auto& kv : adj) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  for (long long start : keys) {
    if (used[start]) continue;
    PolyLoop loop;
    long long prev = -1, cur = start;
    while (true) {
      used[cur] = true;
      loop.push_back(point_of(cur));
      const auto& nb = adj[cur];
      long long next = nb[0] == prev ? nb[1] : nb[0];
      if (nb.size() == 2 && nb[0] == nb[1]) next = nb[0];
      if (next == start) break;
      if (used[next]) break;
      prev = cur;
      cur = next;
    }
    if (loop.size() >= 3) loops.push_back(std::move(loop));
  }
  return loops;
}

namespace {

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(d)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

void douglas_peucker(const PolyLoop& pts, std::size_t a, std::size_t b, double tol, std::vector<char>& keep) {
  if (b <= a + 1) return;
  double worst = -1.0;
  std::size_t at = a;
  for (std::size_t k = a + 1; k < b; ++k) {
    const double d = segment_distance(pts[k], pts[a], pts[b]);
    if (d > worst) {
      worst = d;
      at = k;
    }
  }
  if (worst > tol) {
    keep[at] = 1;
    douglas_peucker(pts, a, at, tol, keep);
    douglas_peucker(pts, at, b, tol, keep);
  }
}

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
  auto orient = [](cplx a, cplx b, cplx c) {
    const double v = (b.real() - a.real()) * (c.imag() - a.imag()) - (b.imag() - a.imag()) * (c.real() - a.real());
    return (v > 0) - (v < 0);
  };
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  return false;
}

}  // namespace

PolyLoop simplify_loop(const PolyLoop& loop, double tolerance) {
  const std::size_t n = loop.size();
  if (n < 8) return loop;
  // Split at vertex 0 and the vertex farthest from it.
  std::size_t far = 0;
  double best = -1.0;
  for (std::size_t k = 1; k < n; ++k)
    if (std::abs(loop[k] - loop[0]) > best) {
      best = std::abs(loop[k] - loop[0]);
      far = k;
    }
  PolyLoop closed(loop);
  closed.push_back(loop[0]);
  std::vector<char> keep(n + 1, 0);
  keep[0] = keep[far] = keep[n] = 1;
  douglas_peucker(closed, 0, far, tolerance, keep);
  douglas_peucker(closed, far, n, tolerance, keep);
  PolyLoop out;
  for (std::size_t k = 0; k < n; ++k)
    if (keep[k]) out.push_back(loop[k]);
  if (out.size() < 3 || !is_simple(out)) return loop;
  return out;
}

bool is_simple(const PolyLoop& loop) {
  const std::size_t n = loop.size();
  if (n < 3) return false;
  for (std::size_t a = 0; a < n; ++a) {
    const cplx p1 = loop[a], p2 = loop[(a + 1) % n];
    for (std::size_t b = a + 2; b < n; ++b) {
      if (a == 0 && b == n - 1) continue;
      if (segments_cross(p1, p2, loop[b], loop[(b + 1) % n])) return false;
    }
  }
  return true;
}

double loop_length(const PolyLoop& loop) {
  double total = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k) total += std::abs(loop[(k + 1) % loop.size()] - loop[k]);
  return total;
}

PolyLoop resample_loop(const PolyLoop& loop, double spacing) {
  PolyLoop out;
  const std::size_t n = loop.size();
  for (std::size_t k = 0; k < n; ++k) {
    const cplx a = loop[k], b = loop[(k + 1) % n];
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / spacing)));
    for (int s = 0; s < pieces; ++s) out.push_back(a + (b - a) * (static_cast<double>(s) / pieces));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Complement cells 8-connected to the frame (the window exterior is unbounded).
Mask outside_component(const Window& w, const Mask& region) {
  const int nx = w.nx, ny = w.ny;
  Mask outside(w.size(), 0);
  std::vector<int> stack;
  auto seed = [&](int i, int j) {
    const std::size_t k = w.index(i, j);
    if (!region[k] && !outside[k]) {
      outside[k] = 1;
      stack.push_back(static_cast<int>(k));
    }
  };
  for (int i = 0; i < nx; ++i) {
    seed(i, 0);
    seed(i, ny - 1);
  }
  for (int j = 0; j < ny; ++j) {
    seed(0, j);
    seed(nx - 1, j);
  }
  while (!stack.empty()) {
    const int c = stack.back();
    stack.pop_back();
    const int ci = c % nx, cj = c / nx;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int ni = ci + di, nj = cj + dj;
        if ((di == 0 && dj == 0) || ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
        seed(ni, nj);
      }
  }
  return outside;
}

bool touches_frame(const Window& w, const Mask& region) {
  for (int i = 0; i < w.nx; ++i)
    if (region[w.index(i, 0)] || region[w.index(i, w.ny - 1)]) return true;
  for (int j = 0; j < w.ny; ++j)
    if (region[w.index(0, j)] || region[w.index(w.nx - 1, j)]) return true;
  return false;
}

// Diagonal-only contacts between land cells make marching-squares loops touch
// at a point. Bridge them so each component is bounded by one Jordan curve.
void bridge_diagonals(const Window& w, Mask& m) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int j = 0; j + 1 < w.ny; ++j)
      for (int i = 0; i + 1 < w.nx; ++i) {
        const bool a = m[w.index(i, j)], b = m[w.index(i + 1, j)], c = m[w.index(i + 1, j + 1)],
                   d = m[w.index(i, j + 1)];
        if (a && c && !b && !d) {
          m[w.index(i + 1, j)] = 1;
          changed = true;
        } else if (b && d && !a && !c) {
          m[w.index(i, j)] = 1;
          changed = true;
        }
      }
  }
}

}  // namespace

bool is_full(const Window& w, const Mask& mask) {
  const Mask outside = outside_component(w, mask);
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (!mask[k] && !outside[k]) return false;
  return true;
}

CompactSet fill_compact(const Window& w, const Mask& region) {
  if (region.size() != w.size()) throw Error(ErrorKind::Precondition, "mask size does not match window");
  if (std::none_of(region.begin(), region.end(), [](auto b) { return b != 0; }))
    throw Error(ErrorKind::Precondition, "fill of an empty region");
  if (touches_frame(w, region)) throw Error(ErrorKind::TruncationOverflow, "region touches the window frame");
  const Mask outside = outside_component(w, region);
  CompactSet out;
  out.window = w;
  out.mask.resize(w.size());
  for (std::size_t k = 0; k < region.size(); ++k) out.mask[k] = outside[k] ? 0 : 1;
  out.loops = extract_loops(w, out.mask);
  return out;
}

CompactSet disc_set(cplx center, double radius, double cell, int pad) {
  const double r = radius + pad * cell;
  const Window w = Window::around(center - cplx(r, r), center + cplx(r, r), cell);
  CompactSet out = fill_compact(w, rasterize_disc(w, center, radius));
  out.circle = Circle{center, radius};
  return out;
}

CompactSet polygon_set(const PolyLoop& polygon, double cell, int pad) {
  if (polygon.size() < 3) throw Error(ErrorKind::Precondition, "polygon needs at least three vertices");
  cplx lo = polygon.front(), hi = polygon.front();
  for (cplx v : polygon) {
    lo = {std::min(lo.real(), v.real()), std::min(lo.imag(), v.imag())};
    hi = {std::max(hi.real(), v.real()), std::max(hi.imag(), v.imag())};
  }
  const cplx margin(pad * cell, pad * cell);
  const Window w = Window::around(lo - margin, hi + margin, cell);
  CompactSet out = fill_compact(w, rasterize_polygon(w, polygon));
  out.loops = {polygon};
  return out;
}

CompactSet transform(const CompactSet& set, double scale, cplx shift) {
  if (!(scale > 0.0)) throw Error(ErrorKind::Domain, "transform scale must be positive");
  CompactSet out = set;
  out.window.x0 = scale * set.window.x0 + shift.real();
  out.window.y0 = scale * set.window.y0 + shift.imag();
  out.window.cell = scale * set.window.cell;
  for (auto& loop : out.loops)
    for (cplx& v : loop) v = scale * v + shift;
  if (out.circle) out.circle = Circle{scale * set.circle->center + shift, scale * set.circle->radius};
  return out;
}

CompactSet pad_set(const CompactSet& set, int cells) {
  if (cells < 0) throw Error(ErrorKind::Precondition, "padding must be non-negative");
  CompactSet out = set;
  const Window& a = set.window;
  Window& b = out.window;
  b.x0 = a.x0 - cells * a.cell;
  b.y0 = a.y0 - cells * a.cell;
  b.nx = a.nx + 2 * cells;
  b.ny = a.ny + 2 * cells;
  out.mask.assign(b.size(), 0);
  for (int j = 0; j < a.ny; ++j)
    for (int i = 0; i < a.nx; ++i) out.mask[b.index(i + cells, j + cells)] = set.mask[a.index(i, j)];
  return out;
}

// ---------------------------------------------------------------------------

CompactSet shell_at(const CompactSet& k, double radius) {
  const Window& w = k.window;
  Mask grown = dilate(w, k.mask, radius);
  if (touches_frame(w, grown)) throw Error(ErrorKind::TruncationOverflow, "dilation exits the window");
  CompactSet filled = fill_compact(w, grown);
  bridge_diagonals(w, filled.mask);
  CompactSet out = fill_compact(w, filled.mask);
  for (auto& loop : out.loops) loop = simplify_loop(loop, 0.5 * w.cell);
  if (k.circle) out.circle = Circle{k.circle->center, k.circle->radius + radius};
  return out;
}

ShellSequence shell_sequence(const CompactSet& k, int count, const std::vector<double>& radii) {
  if (count < 1) throw Error(ErrorKind::Precondition, "shell count must be at least 1");
  if (!radii.empty() && static_cast<int>(radii.size()) < count)
    throw Error(ErrorKind::Precondition, "radius schedule shorter than shell count");
  ShellSequence seq;
  seq.target = k;
  for (int m = 0; m < count; ++m) {
    const double r = radii.empty() ? 1.0 / (m + 1) : radii[m];
    if (m > 0 && !(r < seq.radii.back())) throw Error(ErrorKind::Precondition, "shell radii must decrease");
    seq.radii.push_back(r);
    seq.shells.push_back(shell_at(k, r));
  }
  return seq;
}

// ---------------------------------------------------------------------------

BoundaryNet boundary_net(const CompactSet& shell, int level, NetMode mode, cplx arc_center) {
  BoundaryNet net;
  net.level = level;
  net.mode = mode;
  net.arc_center = arc_center;
  net.spacing = std::ldexp(1.0, -level);
  const double cell = shell.circle ? net.spacing / 64.0 : shell.window.cell;
  if (net.spacing < cell) throw Error(ErrorKind::ResolutionExceeded, "net spacing finer than the raster cell");
  const double dense_step = std::min(cell, net.spacing / 16.0);
  net.sampling_density = dense_step;

  std::vector<PolyLoop> dense;
  if (shell.circle) {
    dense.push_back(shell.boundary_samples(dense_step));
  } else {
    for (const auto& loop : shell.loops) dense.push_back(resample_loop(loop, dense_step));
  }

  // Which dense loop and index hosts the excluded arc.
  std::size_t arc_loop = 0, arc_first = 0, arc_len = 0;
  if (mode == NetMode::MinusArc) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t l = 0; l < dense.size(); ++l)
      for (std::size_t k = 0; k < dense[l].size(); ++k)
        if (std::abs(dense[l][k] - arc_center) < best) {
          best = std::abs(dense[l][k] - arc_center);
          arc_loop = l;
          at = k;
        }
    const auto& pts = dense[arc_loop];
    const std::size_t n = pts.size();
    const cplx v = pts[at];
    // Keep the closure of the arc within a disc of diameter spacing about v.
    const double reach = 0.5 * net.spacing - dense_step;
    std::size_t back = 0, fwd = 0;
    while (back + fwd + 2 < n && std::abs(pts[(at + n - back - 1) % n] - v) <= reach) ++back;
    while (back + fwd + 2 < n && std::abs(pts[(at + fwd + 1) % n] - v) <= reach) ++fwd;
    arc_first = (at + n - back) % n;
    arc_len = back + fwd + 1;
    double diam = 0.0;
    for (std::size_t a = 0; a < arc_len; ++a) {
      net.arc_points.push_back(pts[(arc_first + a) % n]);
      for (std::size_t b = 0; b < a; ++b)
        diam = std::max(diam, std::abs(pts[(arc_first + a) % n] - pts[(arc_first + b) % n]));
    }
    net.arc_diameter = diam;
  }

  for (std::size_t l = 0; l < dense.size(); ++l) {
    const auto& pts = dense[l];
    const std::size_t n = pts.size();
    if (mode == NetMode::MinusArc && l == arc_loop) {
      // Open chain from just after the arc to just before it; keep both ends.
      const std::size_t start = (arc_first + arc_len) % n;
      const std::size_t count = n - arc_len;
      double walked = 0.0;
      net.points.push_back(pts[start]);
      for (std::size_t s = 1; s < count; ++s) {
        walked += std::abs(pts[(start + s) % n] - pts[(start + s - 1) % n]);
        if (walked >= net.spacing - 1e-15 || s + 1 == count) {
          net.points.push_back(pts[(start + s) % n]);
          walked = 0.0;
        }
      }
      continue;
    }
    double walked = 0.0;
    net.points.push_back(pts[0]);
    for (std::size_t s = 1; s < n; ++s) {
      walked += std::abs(pts[s] - pts[s - 1]);
      if (walked >= net.spacing - 1e-15) {
        net.points.push_back(pts[s]);
        walked = 0.0;
      }
    }
  }
  return net;
}

BoundaryNet boundary_net(const ShellSequence& shells, int index, int level, NetMode mode, cplx arc_center) {
  if (index < 0 || index >= static_cast<int>(shells.shells.size()))
    throw Error(ErrorKind::Precondition, "net index beyond the shell count");
  return boundary_net(shells.shells[index], level, mode, arc_center);
}

}  // namespace wander
