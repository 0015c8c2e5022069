#pragma once

// Certified polynomial approximation (the constructive stand-in for Runge's
// theorem), epsilon budgets, and injectivity / inversion checks for
// univalent iterates.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wander/core.hpp"
#include "wander/geometry.hpp"

namespace wander {

struct Certificate {
  std::string domain_id;
  std::size_t fit_net_size = 0;
  std::size_t validation_net_size = 0;
  std::size_t interior_samples = 0;
  double measured_error = 0.0;  // sup of |p - g| over the validation net
  double inflated_bound = 0.0;  // measured + inflation_margin
  double inflation_margin = 0.0;
  double max_error_slope = 0.0;  // finite-difference slope of the error along the net
  double validation_spacing = 0.0;
  std::uint64_t seed = 0;
};

/// p(z) = sum_k c_k prod_{i<k} (z - nodes[i]) / scale.
/// With every node equal to z0 this is the monomial basis in (z - z0)/scale.
class CertifiedPolynomial {
 public:
  CertifiedPolynomial() = default;
  CertifiedPolynomial(std::vector<cplx> nodes, double scale, std::vector<cplx> coefficients);
  static CertifiedPolynomial monomial(cplx center, double scale, std::vector<cplx> coefficients);

  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
  /// Value and derivative in one Horner pass.
  std::pair<cplx, cplx> value_and_derivative(cplx z) const;

  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  const std::vector<cplx>& nodes() const { return nodes_; }
  const std::vector<cplx>& coefficients() const { return coefficients_; }
  std::vector<cplx>& coefficients() { return coefficients_; }
  double scale() const { return scale_; }
  AnalyticMap as_map() const;

  Certificate certificate;

  void write(const std::string& path) const;
  static CertifiedPolynomial read(const std::string& path);
  void write_certificate(const std::string& path) const;

 private:
  std::vector<cplx> nodes_;  // size = degree (node k is used by basis k+1)
  std::vector<cplx> coefficients_;
  double scale_ = 1.0;
};

/// Greedy Leja ordering of `count` points chosen from `pool`, starting from
/// the pool point of largest modulus about the pool centroid.
std::vector<cplx> leja_points(const std::vector<cplx>& pool, int count);
/// Same sequence, as indices into the pool.
std::vector<std::size_t> leja_indices(const std::vector<cplx>& pool, int count);
/// Logarithmic capacity estimate from a Leja sequence (geometric mean of the
/// last point's distances to its predecessors).
double leja_capacity(const std::vector<cplx>& leja);

// ---------------------------------------------------------------------------

enum class RuleKind { Constant, Affine, PriorPolynomial, Composite };

struct Rule {
  RuleKind kind = RuleKind::Constant;
  cplx a{};  // constant value, or affine slope
  cplx b{};  // affine offset
  int stage = -1;
  std::shared_ptr<const CertifiedPolynomial> prior;
  AnalyticMap map;  // composite chains
  std::string description;

  static Rule constant(cplx c);
  static Rule affine(cplx a, cplx b);
  static Rule prior_polynomial(int stage, std::shared_ptr<const CertifiedPolynomial> p);
  static Rule composite(AnalyticMap map, std::string description);

  cplx operator()(cplx z) const;
  std::string describe() const;
};

struct PlanPiece {
  std::string name;
  CompactSet region;
  Rule rule;
};

struct PiecewisePlan {
  std::vector<PlanPiece> pieces;

  /// Pairwise positive separation and fullness of the union. Throws
  /// Precondition on overlap or when the union separates the plane.
  void validate() const;
  /// Minimum boundary-to-boundary distance between distinct pieces.
  double min_separation() const;
  std::string domain_id() const;
};

struct FitOptions {
  int degree_cap = 400;
  int min_degree = 2;
  int interior_samples = 512;
  std::uint64_t seed = 20240601;
  bool validate_plan = true;
};

/// Least-squares fit on boundary nets with geometric degree escalation,
/// certified on a 4x denser validation net plus random interior points.
CertifiedPolynomial runge_fit(const PiecewisePlan& plan, double epsilon, const FitOptions& options = {});

/// Fresh-sample audit: max |p - g| over `count` random points of the plan
/// regions (boundary and interior mixed).
double audit_fit(const CertifiedPolynomial& p, const PiecewisePlan& plan, int count, std::uint64_t seed);

// ---------------------------------------------------------------------------

struct EpsilonBudget {
  std::vector<double> history;

  /// Tail sum from index k onward is at most 2 * history[k] for every k.
  bool tail_invariant_holds() const;
};

/// Accepts min(proposal, last / 2) (or the proposal itself for an empty
/// history) and appends it.
double epsilon_next(EpsilonBudget& budget, double proposal);

// ---------------------------------------------------------------------------

struct InjectivityResult {
  bool injective = true;
  std::optional<std::pair<cplx, cplx>> witness;
  std::size_t samples = 0;
  double min_margin = 0.0;  // min over pairs of |f(z)-f(w)| / rho, >= 1 when passing
  double worst_winding_error = 0.0;
};

/// Grid-sample injectivity check with Koebe margins plus a 256-node
/// argument-principle winding count at every sample.
InjectivityResult verify_injective(const AnalyticMap& f, const CompactSet& k, double spacing);
/// Same check on an explicit sample list.
InjectivityResult verify_injective(const AnalyticMap& f, const std::vector<cplx>& samples, double spacing);

/// Winding number of f around f(z0) along the circle |z - z0| = radius.
double winding_number(const AnalyticMap& f, cplx z0, double radius, int nodes = 256);

/// f composed with itself n times, with the chain-rule derivative.
AnalyticMap iterate_map(const AnalyticMap& f, int n);

/// Newton inversion of a univalent map on `domain`, seeded from a forward
/// image grid at spacing `seed_spacing`.
class UnivalentInverse {
 public:
  UnivalentInverse(AnalyticMap f, CompactSet domain, double seed_spacing);
  cplx operator()(cplx w) const;
  const CompactSet& domain() const { return domain_; }

 private:
  AnalyticMap f_;
  CompactSet domain_;
  std::vector<cplx> seeds_;
  std::vector<cplx> images_;
};

cplx invert_on_univalent(const AnalyticMap& f, const CompactSet& domain, cplx w);

/// For k = 1..n, max over samples of |f^k(z) - g^k(z)|. Throws
/// TruncationOverflow if an f-orbit leaves |z| <= bound.
std::vector<double> iterates_close(const AnalyticMap& f, const AnalyticMap& g, const std::vector<cplx>& samples,
                                   int n, double bound);
std::vector<double> iterates_close(const AnalyticMap& f, const AnalyticMap& g, const CompactSet& k, int n,
                                   double bound);

}  // namespace wander
