#include <fstream>
#include <sstream>

#include "wander/geometry.hpp"
#include "wander/textio.hpp"

namespace wander {

// PBM P4: 1 bits are land, rows run top-down so j = ny-1 is written first.
void write_pbm(const std::string& path, const Window& w, const Mask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "P4\n" << w.nx << " " << w.ny << "\n";
  const int row_bytes = (w.nx + 7) / 8;
  std::string row(row_bytes, '\0');
  for (int j = w.ny - 1; j >= 0; --j) {
    std::fill(row.begin(), row.end(), '\0');
    for (int i = 0; i < w.nx; ++i)
      if (mask[w.index(i, j)]) row[i / 8] = static_cast<char>(row[i / 8] | (0x80 >> (i % 8)));
    out.write(row.data(), row_bytes);
  }
}

void write_compact_set(const std::string& stem, const CompactSet& set) {
  write_pbm(stem + ".pbm", set.window, set.mask);
  std::ofstream out(stem + ".txt");
  if (!out) throw Error(ErrorKind::Io, "cannot write " + stem + ".txt");
  out << "x0: " << fmt17(set.window.x0) << "\n";
  out << "y0: " << fmt17(set.window.y0) << "\n";
  out << "cell: " << fmt17(set.window.cell) << "\n";
  out << "nx: " << set.window.nx << "\n";
  out << "ny: " << set.window.ny << "\n";
  out << "loops: " << set.loops.size() << "\n";
  if (set.circle) {
    out << "circle_center: " << fmt17(set.circle->center) << "\n";
    out << "circle_radius: " << fmt17(set.circle->radius) << "\n";
  }
}

CompactSet read_compact_set(const std::string& stem) {
  const KeyValues kv = read_key_values(stem + ".txt");
  Window w;
  w.x0 = kv.get_double("x0");
  w.y0 = kv.get_double("y0");
  w.cell = kv.get_double("cell");
  w.nx = static_cast<int>(kv.get_int("nx"));
  w.ny = static_cast<int>(kv.get_int("ny"));

  std::ifstream in(stem + ".pbm", std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + stem + ".pbm");
  std::string magic;
  int nx = 0, ny = 0;
  in >> magic >> nx >> ny;
  in.get();
  if (magic != "P4" || nx != w.nx || ny != w.ny) throw Error(ErrorKind::Io, "PBM header does not match sidecar");
  const int row_bytes = (nx + 7) / 8;
  std::string row(row_bytes, '\0');
  Mask mask(w.size(), 0);
  for (int j = ny - 1; j >= 0; --j) {
    if (!in.read(row.data(), row_bytes)) throw Error(ErrorKind::Io, "truncated PBM " + stem + ".pbm");
    for (int i = 0; i < nx; ++i) mask[w.index(i, j)] = (static_cast<unsigned char>(row[i / 8]) >> (7 - i % 8)) & 1;
  }
  CompactSet set = fill_compact(w, mask);
  if (kv.has("circle_radius")) set.circle = Circle{kv.get_complex("circle_center"), kv.get_double("circle_radius")};
  return set;
}

}  // namespace wander
