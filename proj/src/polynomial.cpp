#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "wander/approx.hpp"
#include "wander/textio.hpp"

namespace wander {

CertifiedPolynomial::CertifiedPolynomial(std::vector<cplx> nodes, double scale, std::vector<cplx> coefficients)
    : nodes_(std::move(nodes)), coefficients_(std::move(coefficients)), scale_(scale) {
  if (coefficients_.empty()) throw Error(ErrorKind::Precondition, "polynomial needs at least one coefficient");
  if (!(scale_ > 0.0)) throw Error(ErrorKind::Domain, "basis scale must be positive");
  if (nodes_.size() + 1 < coefficients_.size())
    throw Error(ErrorKind::Precondition, "Newton basis needs degree nodes");
  nodes_.resize(coefficients_.size() - 1);
}

CertifiedPolynomial CertifiedPolynomial::monomial(cplx center, double scale, std::vector<cplx> coefficients) {
  std::vector<cplx> nodes(coefficients.empty() ? 0 : coefficients.size() - 1, center);
  return CertifiedPolynomial(std::move(nodes), scale, std::move(coefficients));
}

cplx CertifiedPolynomial::operator()(cplx z) const {
  const int n = degree();
  const double inv = 1.0 / scale_;
  cplx acc = coefficients_[n];
  for (int k = n - 1; k >= 0; --k) acc = coefficients_[k] + (z - nodes_[k]) * inv * acc;
  return acc;
}

std::pair<cplx, cplx> CertifiedPolynomial::value_and_derivative(cplx z) const {
  const int n = degree();
  const double inv = 1.0 / scale_;
  cplx acc = coefficients_[n];
  cplx dacc = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    const cplx u = (z - nodes_[k]) * inv;
    dacc = acc * inv + u * dacc;
    acc = coefficients_[k] + u * acc;
  }
  return {acc, dacc};
}

cplx CertifiedPolynomial::derivative(cplx z) const { return value_and_derivative(z).second; }

AnalyticMap CertifiedPolynomial::as_map() const {
  auto self = std::make_shared<const CertifiedPolynomial>(*this);
  return AnalyticMap{[self](cplx z) { return (*self)(z); }, [self](cplx z) { return self->derivative(z); }};
}

void CertifiedPolynomial::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "basis: newton\n";
  out << "degree: " << degree() << "\n";
  out << "scale: " << fmt17(scale_) << "\n";
  for (std::size_t k = 0; k < nodes_.size(); ++k) out << "node." << k << ": " << fmt17(nodes_[k]) << "\n";
  for (std::size_t k = 0; k < coefficients_.size(); ++k)
    out << "coef." << k << ": " << fmt17(coefficients_[k]) << "\n";
}

CertifiedPolynomial CertifiedPolynomial::read(const std::string& path) {
  const KeyValues kv = read_key_values(path);
  const int degree = kv.get_int("degree");
  const double scale = kv.get_double("scale");
  std::vector<cplx> nodes(degree), coefs(degree + 1);
  for (int k = 0; k < degree; ++k) nodes[k] = kv.get_complex("node." + std::to_string(k));
  for (int k = 0; k <= degree; ++k) coefs[k] = kv.get_complex("coef." + std::to_string(k));
  return CertifiedPolynomial(std::move(nodes), scale, std::move(coefs));
}

void CertifiedPolynomial::write_certificate(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  const Certificate& c = certificate;
  char buf[64];
  auto sci = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return std::string(buf);
  };
  out << "domain_id: " << c.domain_id << "\n";
  out << "degree: " << degree() << "\n";
  out << "fit_net_size: " << c.fit_net_size << "\n";
  out << "validation_net_size: " << c.validation_net_size << "\n";
  out << "interior_samples: " << c.interior_samples << "\n";
  out << "validation_spacing: " << sci(c.validation_spacing) << "\n";
  out << "measured_sup_error: " << sci(c.measured_error) << "\n";
  out << "max_error_slope: " << sci(c.max_error_slope) << "\n";
  out << "inflation_margin: " << sci(c.inflation_margin) << "\n";
  out << "inflated_bound: " << sci(c.inflated_bound) << "\n";
  out << "seed: " << c.seed << "\n";
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> leja_indices(const std::vector<cplx>& pool, int count) {
  std::vector<std::size_t> out;
  if (pool.empty() || count <= 0) return out;
  cplx centroid = 0.0;
  for (cplx p : pool) centroid += p;
  centroid /= static_cast<double>(pool.size());
  std::size_t first = 0;
  double far = -1.0;
  for (std::size_t k = 0; k < pool.size(); ++k)
    if (std::abs(pool[k] - centroid) > far) {
      far = std::abs(pool[k] - centroid);
      first = k;
    }
  // logprod[k] = sum over chosen nodes of log|pool[k] - node|
  std::vector<double> logprod(pool.size(), 0.0);
  std::vector<char> taken(pool.size(), 0);
  std::size_t pick = first;
  for (int n = 0; n < count; ++n) {
    out.push_back(pick);
    taken[pick] = 1;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t next = pick;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (taken[k]) continue;
      logprod[k] += std::log(std::abs(pool[k] - pool[pick]));
      if (logprod[k] > best) {
        best = logprod[k];
        next = k;
      }
    }
    if (next == pick) break;  // pool exhausted
    pick = next;
  }
  return out;
}

std::vector<cplx> leja_points(const std::vector<cplx>& pool, int count) {
  std::vector<cplx> out;
  for (std::size_t k : leja_indices(pool, count)) out.push_back(pool[k]);
  return out;
}

double leja_capacity(const std::vector<cplx>& leja) {
  const std::size_t n = leja.size();
  if (n < 2) return 1.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) s += std::log(std::abs(leja[n - 1] - leja[i]));
  return std::exp(s / static_cast<double>(n - 1));
}

}  // namespace wander
