#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace wander {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Failure categories shared by every module. The string form is what the
/// CLI prints and what reports record, so keep them stable.
enum class ErrorKind {
  Domain,              // argument outside the mathematical domain
  Precondition,        // caller broke a documented precondition
  TruncationOverflow,  // a set or orbit left the finite window
  ResolutionExceeded,
  FitFailed,
  ConditioningFailure,
  QuadratureUnresolved,
  InversionFailure,
  BranchEscape,
  ScaffoldBreach,
  RUnreachable,
  SpikeThresholdUnreachable,
  EtaExhaustion,
  StageUnreachable,
  RegionSeparation,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// An analytic map together with its derivative. Everything that gets
/// iterated, inverted or checked for injectivity is passed around as one.
struct AnalyticMap {
  std::function<cplx(cplx)> value;
  std::function<cplx(cplx)> derivative;

  cplx operator()(cplx z) const { return value(z); }
};

/// 17 significant digits, the precision used by every text artifact.
std::string fmt17(double x);
std::string fmt17(cplx z);

}  // namespace wander
