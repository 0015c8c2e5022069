#pragma once

// Orbits against the strip scaffold, finite-horizon classification,
// maverick scoring in the spherical metric, and walk-on-spheres harmonic
// measure.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wander/geometry.hpp"
#include "wander/scaffold.hpp"

namespace wander {

enum class LabelKind { InS, InT, InD, Elsewhere, Overflow };

struct OrbitLabel {
  LabelKind kind = LabelKind::Elsewhere;
  int index = -1;  // strip index for InS / InT

  bool operator==(const OrbitLabel&) const = default;
  /// "S3", "T0", "D", "E" or "X".
  std::string str() const;
};

/// Label of a single point; pure function of the point and the scaffold.
OrbitLabel label_point(cplx z, const ScaffoldConfig& config);

struct OrbitRecord {
  cplx start{};
  std::vector<cplx> points;  // points[n] = f^n(start)
  std::vector<OrbitLabel> labels;
};

/// Iterates while n < horizon; a point leaving the window is labelled
/// Overflow and ends the orbit.
OrbitRecord orbit_itinerary(const AnalyticMap& f, cplx z, int horizon, const ScaffoldConfig& config);
/// True when the stored labels equal a recomputation from the points.
bool labels_consistent(const OrbitRecord& orbit, const ScaffoldConfig& config);
std::string itinerary_string(const OrbitRecord& orbit);

enum class Verdict { EscapingCandidate, BungeeCandidate, Bounded, Undetermined };
const char* to_string(Verdict v);

struct Classification {
  Verdict verdict = Verdict::Undetermined;
  double escape_gate = 0.0;
  double return_gate = 3.0;
  int horizon = 0;
  std::vector<double> moduli;  // |f^n(z)|, infinity after Overflow
  int first_crossing = -1;     // first n above the escape gate
  int monotone_tail = 0;       // strictly increasing steps at the end of the orbit
  int returns = 0;             // drops to |z| <= return gate after the first crossing
  bool overflow = false;
  double min_modulus = 0.0;
  double max_modulus = 0.0;

  std::string describe() const;
};

/// Scripted orbit hook: returns f^0(z)..f^{horizon-1}(z); a non-finite entry
/// counts as Overflow. The window is not applied to scripted points.
using OrbitOracle = std::function<std::vector<cplx>(cplx z, int horizon)>;

/// Finite-horizon verdict with escape gate 5^{J_max} and return gate 3.
Classification classify_point(const AnalyticMap& f, cplx z, int horizon, const ScaffoldConfig& config,
                              const OrbitOracle& oracle = {});

/// Chordal distance on the Riemann sphere; an infinite argument is the pole.
double chordal_distance(cplx a, cplx b);

struct MaverickScore {
  double score = 0.0;
  double threshold = 0.1;
  int horizon = 0;
  bool maverick = false;
};

/// max over n in [horizon/2, horizon] of the chordal distance between the
/// orbits of anchor and z; |w| > overflow_modulus maps to the pole.
MaverickScore maverick_detect(const AnalyticMap& f, cplx anchor, cplx z, int horizon, double threshold = 0.1,
                              double overflow_modulus = 1e100);

struct HarmonicEstimate {
  double fraction = 0.0;
  double sigma = 0.0;
  int walkers = 0;
  int hits = 0;
  int discarded = 0;  // walkers that exceeded the step cap
  std::uint64_t seed = 0;
  cplx start{};
};

using BoundaryPredicate = std::function<bool(cplx)>;

struct WalkOptions {
  int step_cap = 100000;
  bool parallel = true;
  std::optional<cplx> start;  // default: the cell center deepest inside U
};

/// Walk on spheres from the start point until within half a cell of the
/// boundary of U (exactly on the circle for disc sets); the hit point is
/// passed to the predicate. Each walker has its own generator seeded from
/// (seed, walker index), so the result does not depend on scheduling.
HarmonicEstimate harmonic_measure_estimate(const CompactSet& u, const BoundaryPredicate& predicate, int walkers,
                                           std::uint64_t seed, const WalkOptions& options = {});

}  // namespace wander
