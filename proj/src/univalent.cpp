#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "wander/approx.hpp"
#include "wander/conformal.hpp"

namespace wander {

double winding_number(const AnalyticMap& f, cplx z0, double radius, int nodes) {
  const cplx w0 = f(z0);
  double total = 0.0;
  cplx prev = f(z0 + radius) - w0;
  for (int k = 1; k <= nodes; ++k) {
    const cplx cur = f(z0 + std::polar(radius, 2.0 * kPi * k / nodes)) - w0;
    total += std::arg(cur / prev);
    prev = cur;
  }
  return total / (2.0 * kPi);
}

namespace {

struct CellKey {
  long long x, y;
  bool operator==(const CellKey&) const = default;
};
struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    return std::hash<long long>()(k.x * 73856093LL ^ k.y * 19349663LL);
  }
};

}  // namespace

InjectivityResult verify_injective(const AnalyticMap& f, const std::vector<cplx>& samples, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorKind::Domain, "spacing must be positive");
  InjectivityResult res;
  const std::size_t n = samples.size();
  res.samples = n;
  res.min_margin = std::numeric_limits<double>::infinity();
  if (n == 0) return res;
  std::vector<cplx> w(n);
  std::vector<double> rho(n);
  std::vector<double> wind(n);
  const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t k = 0; k < sn; ++k) {
    w[k] = f.value(samples[k]);
    const double eta = f.derivative ? std::abs(f.derivative(samples[k])) : 0.0;
    rho[k] = eta > 0.0 ? koebe_margin(spacing, eta) : 0.0;
    wind[k] = winding_number(f, samples[k], spacing, 256);
  }
  // Argument principle: exactly one preimage of f(z0) in D(z0, spacing).
  for (std::size_t k = 0; k < n; ++k) {
    const double r = std::round(wind[k]);
    const double err = std::abs(wind[k] - r);
    res.worst_winding_error = std::max(res.worst_winding_error, err);
    if (err > 0.1) {
      std::ostringstream msg;
      msg << "winding " << fmt17(wind[k]) << " at " << fmt17(samples[k]) << " is not near an integer";
      throw Error(ErrorKind::QuadratureUnresolved, msg.str());
    }
    if (r != 1.0 && res.injective) {
      res.injective = false;
      res.witness = std::make_pair(samples[k], samples[k] + spacing);
    }
  }
  // Koebe: univalent on D(z, spacing) means f covers D(f(z), rho). A sample
  // at least `spacing` away whose image falls inside that disc is a second
  // preimage.
  double cell = 0.0;
  for (double r : rho) cell = std::max(cell, r);
  if (!(cell > 0.0)) cell = spacing;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> buckets;
  auto key_of = [&](cplx z) {
    return CellKey{static_cast<long long>(std::floor(z.real() / cell)), static_cast<long long>(std::floor(z.imag() / cell))};
  };
  for (std::size_t k = 0; k < n; ++k) buckets[key_of(w[k])].push_back(k);
  for (std::size_t k = 0; k < n; ++k) {
    const CellKey c = key_of(w[k]);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = buckets.find({c.x + dx, c.y + dy});
        if (it == buckets.end()) continue;
        for (std::size_t m : it->second) {
          if (m <= k) continue;
          const double dw = std::abs(w[k] - w[m]);
          const double dz = std::abs(samples[k] - samples[m]);
          const double r = std::max(rho[k], rho[m]);
          if (dw == 0.0 && dz > 0.0) {
            if (res.injective) res.witness = std::make_pair(samples[k], samples[m]);
            res.injective = false;
            res.min_margin = 0.0;
            continue;
          }
          if (dz < spacing || r == 0.0) continue;
          res.min_margin = std::min(res.min_margin, dw / r);
          if (dw < r) {
            if (res.injective) res.witness = std::make_pair(samples[k], samples[m]);
            res.injective = false;
          }
        }
      }
  }
  return res;
}

InjectivityResult verify_injective(const AnalyticMap& f, const CompactSet& k, double spacing) {
  std::vector<cplx> samples = k.interior_samples(spacing);
  const auto edge = k.boundary_samples(spacing);
  samples.insert(samples.end(), edge.begin(), edge.end());
  return verify_injective(f, samples, spacing);
}

AnalyticMap iterate_map(const AnalyticMap& f, int n) {
  if (n < 0) throw Error(ErrorKind::Precondition, "iterate count must be non-negative");
  AnalyticMap out;
  out.value = [f, n](cplx z) {
    for (int k = 0; k < n; ++k) z = f.value(z);
    return z;
  };
  out.derivative = [f, n](cplx z) {
    cplx d = 1.0;
    for (int k = 0; k < n; ++k) {
      d *= f.derivative(z);
      z = f.value(z);
    }
    return d;
  };
  return out;
}

// ---------------------------------------------------------------------------

UnivalentInverse::UnivalentInverse(AnalyticMap f, CompactSet domain, double seed_spacing)
    : f_(std::move(f)), domain_(std::move(domain)) {
  if (!f_.derivative) throw Error(ErrorKind::Precondition, "inversion needs the derivative");
  seeds_ = domain_.interior_samples(seed_spacing);
  const auto edge = domain_.boundary_samples(seed_spacing);
  seeds_.insert(seeds_.end(), edge.begin(), edge.end());
  if (seeds_.empty()) throw Error(ErrorKind::Precondition, "inversion domain has no samples");
  images_.resize(seeds_.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(seeds_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) images_[k] = f_.value(seeds_[k]);
}

cplx UnivalentInverse::operator()(cplx w) const {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t k = 0; k < images_.size(); ++k) {
    const double d = std::abs(images_[k] - w);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  cplx z = seeds_[best];
  cplx fz = images_[best];
  const double tol = 1e-12 * std::max(1.0, std::abs(w));
  bool converged = std::abs(fz - w) <= tol;
  for (int it = 0; it < 50 && !converged; ++it) {
    const cplx d = f_.derivative(z);
    if (d == 0.0) break;
    cplx step = (fz - w) / d;
    // Backtrack while the residual grows.
    double res = std::abs(fz - w);
    cplx znew = z - step, fnew = f_.value(znew);
    for (int half = 0; half < 30 && !(std::abs(fnew - w) < res); ++half) {
      step *= 0.5;
      znew = z - step;
      fnew = f_.value(znew);
    }
    z = znew;
    fz = fnew;
    converged = std::abs(fz - w) <= tol;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "no convergence in 50 steps for w = " << fmt17(w) << ", residual " << fmt17(std::abs(fz - w));
    throw Error(ErrorKind::InversionFailure, msg.str());
  }
  const double slack = domain_.circle ? 1e-12 * domain_.circle->radius : domain_.window.cell;
  if (!domain_.contains(z) && domain_.boundary_distance(z) > slack) {
    std::ostringstream msg;
    msg << "preimage " << fmt17(z) << " of " << fmt17(w) << " lies outside the univalence domain";
    throw Error(ErrorKind::BranchEscape, msg.str());
  }
  return z;
}

cplx invert_on_univalent(const AnalyticMap& f, const CompactSet& domain, cplx w) {
  const double spacing = domain.circle ? domain.circle->radius / 8.0 : 4.0 * domain.window.cell;
  return UnivalentInverse(f, domain, spacing)(w);
}

// ---------------------------------------------------------------------------

std::vector<double> iterates_close(const AnalyticMap& f, const AnalyticMap& g, const std::vector<cplx>& samples,
                                   int n, double bound) {
  if (n < 1) throw Error(ErrorKind::Precondition, "need at least one iterate");
  std::vector<double> dev(n, 0.0);
  for (cplx z : samples) {
    cplx a = z, b = z;
    for (int k = 0; k < n; ++k) {
      a = f.value(a);
      b = g.value(b);
      if (!(std::abs(a) <= bound)) {
        std::ostringstream msg;
        msg << "orbit of " << fmt17(z) << " left |z| <= " << fmt17(bound) << " at step " << k + 1;
        throw Error(ErrorKind::TruncationOverflow, msg.str());
      }
      dev[k] = std::max(dev[k], std::abs(a - b));
    }
  }
  return dev;
}

std::vector<double> iterates_close(const AnalyticMap& f, const AnalyticMap& g, const CompactSet& k, int n,
                                   double bound) {
  const double spacing = k.circle ? k.circle->radius / 4.0 : 4.0 * k.window.cell;
  std::vector<cplx> samples = k.interior_samples(spacing);
  const auto edge = k.boundary_samples(spacing);
  samples.insert(samples.end(), edge.begin(), edge.end());
  return iterates_close(f, g, samples, n, bound);
}

}  // namespace wander
