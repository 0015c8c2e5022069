#include "wander/wada.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace wander {

namespace {

struct Grid {
  const Window& w;
  std::vector<int>& body;

  bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < w.nx && j < w.ny; }
  int at(int i, int j) const { return inside(i, j) ? body[w.index(i, j)] : 0; }  // outside is sea
  bool land(int i, int j) const { return inside(i, j) && body[w.index(i, j)] < 0; }
};

bool land_connected_without(const Grid& g, int pi, int pj) {
  const Window& w = g.w;
  std::vector<char> seen(w.size(), 0);
  std::vector<int> stack;
  std::size_t total = 0, start = w.size();
  for (std::size_t k = 0; k < w.size(); ++k)
    if (g.body[k] < 0 && k != w.index(pi, pj)) {
      ++total;
      if (start == w.size()) start = k;
    }
  if (total == 0) return false;
  seen[start] = 1;
  stack.push_back(static_cast<int>(start));
  std::size_t reached = 1;
  const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  while (!stack.empty()) {
    const int c = stack.back();
    stack.pop_back();
    const int ci = c % w.nx, cj = c / w.nx;
    for (const auto& d : d4) {
      const int ni = ci + d[0], nj = cj + d[1];
      if (!g.land(ni, nj) || (ni == pi && nj == pj)) continue;
      const std::size_t n = w.index(ni, nj);
      if (!seen[n]) {
        seen[n] = 1;
        ++reached;
        stack.push_back(static_cast<int>(n));
      }
    }
  }
  return reached == total;
}

// Removing (pi, pj) keeps its land 4-neighbours 4-connected inside the 3x3
// block. Sufficient for global connectivity; the caller falls back to a
// flood fill when this says no.
bool locally_simple(const Grid& g, int pi, int pj) {
  int local[3][3];
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) local[dj + 1][di + 1] = (di || dj) && g.land(pi + di, pj + dj);
  const int n4[4][2] = {{2, 1}, {0, 1}, {1, 2}, {1, 0}};  // (col, row) in local coordinates
  int seed = -1, count = 0;
  for (int k = 0; k < 4; ++k)
    if (local[n4[k][1]][n4[k][0]]) {
      ++count;
      if (seed < 0) seed = k;
    }
  if (count <= 1) return true;
  int seen[3][3] = {};
  std::vector<std::pair<int, int>> stack{{n4[seed][0], n4[seed][1]}};
  seen[n4[seed][1]][n4[seed][0]] = 1;
  while (!stack.empty()) {
    auto [c, r] = stack.back();
    stack.pop_back();
    const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& d : d4) {
      const int nc = c + d[0], nr = r + d[1];
      if (nc < 0 || nr < 0 || nc > 2 || nr > 2 || !local[nr][nc] || seen[nr][nc]) continue;
      seen[nr][nc] = 1;
      stack.push_back({nc, nr});
    }
  }
  for (int k = 0; k < 4; ++k)
    if (local[n4[k][1]][n4[k][0]] && !seen[n4[k][1]][n4[k][0]]) return false;
  return true;
}

bool touches_other_body(const Grid& g, int pi, int pj, int b) {
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) {
      const int v = g.at(pi + di, pj + dj);
      if (v >= 0 && v != b) return true;
    }
  return false;
}

std::vector<double> body_distance2(const WadaIsland& island, int b) {
  return distance_to_mask(island.window, island.water_mask(b));
}

// Digs one canal from body b; returns the number of cells dug.
int dig_canal(WadaIsland& island, int b, int round) {
  const Window& w = island.window;
  Grid g{w, island.body};
  const auto d2 = body_distance2(island, b);
  std::size_t target = w.size();
  double far = -1.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (island.body[k] < 0 && d2[k] > far) {
      far = d2[k];
      target = k;
    }
  std::ostringstream note;
  note << "round " << round << " body " << b << ": ";
  if (target == w.size()) {
    island.log.push_back(note.str() + "no land left, canal skipped");
    return 0;
  }

  // BFS through land from the cells 4-adjacent to body b.
  std::vector<int> parent(w.size(), -2);
  std::deque<int> queue;
  const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) {
      if (!g.land(i, j)) continue;
      bool adjacent = false;
      for (const auto& d : d4) adjacent = adjacent || g.at(i + d[0], j + d[1]) == b;
      if (adjacent) {
        parent[w.index(i, j)] = -1;
        queue.push_back(static_cast<int>(w.index(i, j)));
      }
    }
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    if (static_cast<std::size_t>(c) == target) break;
    const int ci = c % w.nx, cj = c / w.nx;
    for (const auto& d : d4) {
      const int ni = ci + d[0], nj = cj + d[1];
      if (!g.land(ni, nj)) continue;
      const std::size_t n = w.index(ni, nj);
      if (parent[n] == -2) {
        parent[n] = c;
        queue.push_back(static_cast<int>(n));
      }
    }
  }
  if (parent[target] == -2) {
    island.log.push_back(note.str() + "farthest land unreachable, canal skipped");
    return 0;
  }
  std::vector<int> path;
  for (int c = static_cast<int>(target); c != -1; c = parent[c]) path.push_back(c);
  std::reverse(path.begin(), path.end());  // body side first

  int dug = 0;
  for (int c : path) {
    const int ci = c % w.nx, cj = c / w.nx;
    if (touches_other_body(g, ci, cj, b)) {
      note << "stopped before another water body after " << dug << " of " << path.size() << " cells";
      island.log.push_back(note.str());
      return dug;
    }
    if (!locally_simple(g, ci, cj) && !land_connected_without(g, ci, cj)) {
      note << "stopped before disconnecting land after " << dug << " of " << path.size() << " cells";
      island.log.push_back(note.str());
      return dug;
    }
    island.body[c] = b;
    ++dug;
  }
  return dug;
}

void refresh_land(WadaIsland& island) {
  const Window& w = island.window;
  island.land.window = w;
  island.land.mask.assign(w.size(), 0);
  for (std::size_t k = 0; k < w.size(); ++k) island.land.mask[k] = island.body[k] < 0 ? 1 : 0;
  island.land.loops = extract_loops(w, island.land.mask);
}

}  // namespace

Mask WadaIsland::water_mask(int b) const {
  Mask m(body.size(), 0);
  for (std::size_t k = 0; k < body.size(); ++k) m[k] = body[k] == b ? 1 : 0;
  return m;
}

CompactSet WadaIsland::filled() const { return fill_compact(window, land.mask); }

double max_distance_to_body(const WadaIsland& island, int b) {
  const auto d2 = body_distance2(island, b);
  double worst = 0.0;
  for (std::size_t k = 0; k < d2.size(); ++k)
    if (island.body[k] < 0) worst = std::max(worst, d2[k]);
  return std::sqrt(worst);
}

WadaIsland wada_build(const WadaOptions& options) {
  if (options.lakes < 2) throw Error(ErrorKind::Precondition, "need at least two lakes");
  if (options.grid < 64) throw Error(ErrorKind::Precondition, "grid must be at least 64 cells per side");
  if (options.rounds < 0) throw Error(ErrorKind::Precondition, "rounds must be non-negative");
  WadaIsland island;
  island.window = Window::around({-1.0, -1.0}, {1.0, 1.0}, 2.0 / options.grid);
  const Window& w = island.window;
  island.bodies = options.lakes + 1;
  island.body.assign(w.size(), 0);
  // Keep neighbouring lakes at least a few cells apart on the ring.
  const double chord = 2.0 * options.lake_ring * std::sin(kPi / options.lakes);
  const double lake_r = std::min(options.lake_radius, 0.35 * chord);
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) {
      const cplx z = w.center(i, j);
      int v = std::abs(z) <= options.island_radius ? -1 : 0;
      for (int l = 0; l < options.lakes; ++l) {
        const cplx c = std::polar(options.lake_ring, 2.0 * kPi * l / options.lakes);
        if (std::abs(z - c) <= lake_r) v = l + 1;
      }
      island.body[w.index(i, j)] = v;
    }
  auto record = [&] {
    std::vector<double> row;
    for (int b = 0; b < island.bodies; ++b) row.push_back(max_distance_to_body(island, b));
    island.distances.push_back(std::move(row));
  };
  record();
  for (int r = 1; r <= options.rounds; ++r) {
    for (int b = 0; b < island.bodies; ++b) dig_canal(island, b, r);
    island.iteration = r;
    record();
  }
  refresh_land(island);
  return island;
}

}  // namespace wander
