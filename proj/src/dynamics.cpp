#include "wander/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace wander {

std::string OrbitLabel::str() const {
  switch (kind) {
    case LabelKind::InS: return "S" + std::to_string(index);
    case LabelKind::InT: return "T" + std::to_string(index);
    case LabelKind::InD: return "D";
    case LabelKind::Elsewhere: return "E";
    case LabelKind::Overflow: return "X";
  }
  return "?";
}

OrbitLabel label_point(cplx z, const ScaffoldConfig& config) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !config.in_window(z)) return {LabelKind::Overflow, -1};
  if (config.in_d(z)) return {LabelKind::InD, -1};
  if (const int k = config.s_index(z); k >= 0) return {LabelKind::InS, k};
  if (const int k = config.t_index(z); k >= 0) return {LabelKind::InT, k};
  return {LabelKind::Elsewhere, -1};
}

OrbitRecord orbit_itinerary(const AnalyticMap& f, cplx z, int horizon, const ScaffoldConfig& config) {
  OrbitRecord rec;
  rec.start = z;
  cplx x = z;
  for (int n = 0; n < horizon; ++n) {
    const OrbitLabel label = label_point(x, config);
    rec.points.push_back(x);
    rec.labels.push_back(label);
    if (label.kind == LabelKind::Overflow) break;
    x = f.value(x);
  }
  return rec;
}

bool labels_consistent(const OrbitRecord& orbit, const ScaffoldConfig& config) {
  if (orbit.points.size() != orbit.labels.size()) return false;
  for (std::size_t n = 0; n < orbit.points.size(); ++n)
    if (!(label_point(orbit.points[n], config) == orbit.labels[n])) return false;
  return true;
}

std::string itinerary_string(const OrbitRecord& orbit) {
  std::string out;
  for (const auto& l : orbit.labels) {
    if (!out.empty()) out += ' ';
    out += l.str();
  }
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::EscapingCandidate: return "escaping-candidate";
    case Verdict::BungeeCandidate: return "bungee-candidate";
    case Verdict::Bounded: return "bounded";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

std::string Classification::describe() const {
  std::ostringstream out;
  out << "verdict: " << to_string(verdict) << "\n";
  out << "horizon: " << horizon << "\n";
  out << "escape_gate: " << fmt17(escape_gate) << "\n";
  out << "return_gate: " << fmt17(return_gate) << "\n";
  out << "first_crossing: " << first_crossing << "\n";
  out << "monotone_tail: " << monotone_tail << "\n";
  out << "returns: " << returns << "\n";
  out << "overflow: " << (overflow ? "true" : "false") << "\n";
  out << "min_modulus: " << fmt17(min_modulus) << "\n";
  out << "max_modulus: " << fmt17(max_modulus) << "\n";
  return out.str();
}

Classification classify_point(const AnalyticMap& f, cplx z, int horizon, const ScaffoldConfig& config,
                              const OrbitOracle& oracle) {
  if (horizon < 10) throw Error(ErrorKind::Precondition, "classification horizon must be at least 10");
  Classification c;
  c.horizon = horizon;
  c.escape_gate = std::pow(5.0, config.j_max);
  std::vector<cplx> points;
  if (oracle) {
    points = oracle(z, horizon);
    if (points.size() > static_cast<std::size_t>(horizon)) points.resize(horizon);
    for (std::size_t n = 0; n < points.size(); ++n)
      if (!std::isfinite(points[n].real()) || !std::isfinite(points[n].imag())) {
        points.resize(n + 1);
        c.overflow = true;
        break;
      }
  } else {
    const OrbitRecord rec = orbit_itinerary(f, z, horizon, config);
    points = rec.points;
    c.overflow = !rec.labels.empty() && rec.labels.back().kind == LabelKind::Overflow;
  }
  for (std::size_t n = 0; n < points.size(); ++n) {
    const bool last_overflow = c.overflow && n + 1 == points.size();
    c.moduli.push_back(last_overflow ? std::numeric_limits<double>::infinity() : std::abs(points[n]));
  }
  if (c.moduli.empty()) return c;
  c.min_modulus = *std::min_element(c.moduli.begin(), c.moduli.end());
  c.max_modulus = *std::max_element(c.moduli.begin(), c.moduli.end());
  for (std::size_t n = 0; n < c.moduli.size(); ++n)
    if (c.moduli[n] > c.escape_gate) {
      c.first_crossing = static_cast<int>(n);
      break;
    }
  if (c.first_crossing >= 0)
    for (std::size_t n = c.first_crossing + 1; n < c.moduli.size(); ++n)
      if (c.moduli[n] <= c.return_gate && c.moduli[n - 1] > c.return_gate) ++c.returns;
  for (std::size_t n = c.moduli.size() - 1; n > 0 && c.moduli[n] > c.moduli[n - 1]; --n) ++c.monotone_tail;

  if (c.first_crossing < 0)
    c.verdict = Verdict::Bounded;
  else if (c.returns >= 2)
    c.verdict = Verdict::BungeeCandidate;
  else if ((c.moduli.back() > c.escape_gate && c.monotone_tail >= 5) || (c.overflow && c.monotone_tail >= 1))
    c.verdict = Verdict::EscapingCandidate;
  else
    c.verdict = Verdict::Undetermined;
  return c;
}

// ---------------------------------------------------------------------------

double chordal_distance(cplx a, cplx b) {
  const bool ia = !std::isfinite(std::abs(a)), ib = !std::isfinite(std::abs(b));
  if (ia && ib) return 0.0;
  if (ia) return 2.0 / std::sqrt(1.0 + std::norm(b));
  if (ib) return 2.0 / std::sqrt(1.0 + std::norm(a));
  return 2.0 * std::abs(a - b) / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

MaverickScore maverick_detect(const AnalyticMap& f, cplx anchor, cplx z, int horizon, double threshold,
                              double overflow_modulus) {
  if (horizon < 1) throw Error(ErrorKind::Precondition, "maverick horizon must be positive");
  MaverickScore out;
  out.threshold = threshold;
  out.horizon = horizon;
  const double inf = std::numeric_limits<double>::infinity();
  auto step = [&](cplx x) {
    if (!std::isfinite(std::abs(x))) return cplx(inf, 0.0);
    const cplx y = f.value(x);
    return (std::isfinite(std::abs(y)) && std::abs(y) <= overflow_modulus) ? y : cplx(inf, 0.0);
  };
  cplx a = anchor, b = z;
  for (int n = 0; n <= horizon; ++n) {
    if (2 * n >= horizon) out.score = std::max(out.score, chordal_distance(a, b));
    a = step(a);
    b = step(b);
  }
  out.maverick = out.score > threshold;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

HarmonicEstimate harmonic_measure_estimate(const CompactSet& u, const BoundaryPredicate& predicate, int walkers,
                                           std::uint64_t seed, const WalkOptions& options) {
  if (walkers < 1) throw Error(ErrorKind::Precondition, "need at least one walker");
  const Window& w = u.window;
  const double stop = 0.5 * w.cell;
  // Lower bound for the distance from a point to the boundary of U.
  std::vector<double> d2;
  if (!u.circle) {
    Mask outside(w.size());
    for (std::size_t k = 0; k < outside.size(); ++k) outside[k] = u.mask[k] ? 0 : 1;
    d2 = distance_to_mask(w, outside);
  }
  auto radius = [&](cplx x) -> double {
    if (u.circle) return u.circle->radius - std::abs(x - u.circle->center);
    int i, j;
    if (!w.locate(x, i, j) || !u.mask[w.index(i, j)]) return 0.0;
    return std::sqrt(d2[w.index(i, j)]) - std::sqrt(2.0) * w.cell;
  };

  HarmonicEstimate est;
  est.walkers = walkers;
  est.seed = seed;
  if (options.start) {
    est.start = *options.start;
  } else if (u.circle) {
    est.start = u.circle->center;
  } else {
    double best = -1.0;
    for (int j = 0; j < w.ny; ++j)
      for (int i = 0; i < w.nx; ++i)
        if (u.mask[w.index(i, j)] && d2[w.index(i, j)] > best) {
          best = d2[w.index(i, j)];
          est.start = w.center(i, j);
        }
  }
  if (!(radius(est.start) > stop)) throw Error(ErrorKind::Precondition, "walk start is not inside U");

  int hits = 0, discarded = 0;
  const int step_cap = options.step_cap;
  const cplx start = est.start;
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : hits, discarded) if (options.parallel)
  for (int k = 0; k < walkers; ++k) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k))));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    cplx x = start;
    bool done = false;
    for (int s = 0; s < step_cap; ++s) {
      const double r = radius(x);
      if (r < stop) {
        done = true;
        break;
      }
      x += std::polar(r, angle(rng));
    }
    if (!done) {
      ++discarded;
      continue;
    }
    if (u.circle) x = u.circle->center + u.circle->radius * (x - u.circle->center) / std::abs(x - u.circle->center);
    if (predicate(x)) ++hits;
  }
  est.hits = hits;
  est.discarded = discarded;
  const int used = walkers - discarded;
  if (used > 0) {
    est.fraction = static_cast<double>(hits) / used;
    est.sigma = std::sqrt(est.fraction * (1.0 - est.fraction) / used);
  }
  return est;
}

}  // namespace wander
