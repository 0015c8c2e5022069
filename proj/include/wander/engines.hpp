#pragma once

// The inductive constructions. Each engine builds f_0, f_1, ... one stage at
// a time, verifies the stage contracts on samples and only emits stages whose
// report passed.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wander/approx.hpp"
#include "wander/geometry.hpp"
#include "wander/scaffold.hpp"

namespace wander {

struct ContractCheck {
  std::string name;
  std::string paper_item;
  std::size_t samples = 0;
  /// Smallest margin over the samples; the check passes iff it is positive.
  double worst_margin = 0.0;
  bool passed = true;
  bool indeterminate = false;  // a sample left the window or could not be evaluated
  std::optional<cplx> witness;
  std::string note;
};

struct StageReport {
  int stage = 0;
  std::vector<ContractCheck> checks;

  bool passed() const;
  const ContractCheck* find(const std::string& name) const;
  /// First failing check, or nullptr.
  const ContractCheck* first_failure() const;
  std::string text() const;
  void write(const std::string& path) const;
};

/// A named condition. Either `margin` is evaluated on every sample (NaN or
/// infinity means the sample escaped: indeterminate), or `global` computes
/// the whole check at once.
struct Contract {
  std::string name;
  std::string paper_item;
  std::vector<cplx> samples;
  std::function<double(cplx)> margin;
  std::function<ContractCheck()> global;
};

struct NamedRegion {
  std::string name;
  CompactSet set;
};

struct NamedNet {
  std::string name;
  std::vector<cplx> points;
};

struct StageState {
  int j = 0;
  std::shared_ptr<const CertifiedPolynomial> f;
  double epsilon = 0.0;
  int m = 0;  // shell index m_j
  PiecewisePlan plan;  // the plan g_j fitted by f (empty at stage 0)
  std::vector<NamedRegion> regions;
  std::vector<NamedNet> nets;
  std::vector<std::string> log;  // adaptive-search decisions
  StageReport report;
};

/// Evaluates every contract; sample margins are computed in parallel and
/// reduced in sample order, so the report is deterministic.
StageReport stage_verify(const StageState& state, const std::vector<Contract>& contracts);

/// Margin radius - |g(z) - center| for every sample; |g(z)| > escape counts as
/// leaving the window.
Contract disc_contract(std::string name, std::string item, std::vector<cplx> samples, AnalyticMap g, cplx center,
                       double radius, double escape = 1e8);

/// Writes polynomial.txt, certificate.txt, report.txt, stage.txt and one
/// PBM mask (plus sidecar) per region into `dir`.
void write_stage(const StageState& state, const std::string& dir);

struct EngineRun {
  std::string engine;
  std::vector<StageState> stages;  // emitted stages only; every report passed
  bool complete = false;
  std::string failure;  // error text for the stage that could not be emitted
  std::optional<StageReport> failed_report;
  std::vector<std::string> diagnostics;
  EpsilonBudget budget;
};

// ---------------------------------------------------------------------------

/// Runge defaults with the degree cap raised to 800: stage plans carry the
/// previous polynomial as a rule, so they need more degree than a fresh plan.
inline FitOptions uniform_fit_defaults() {
  FitOptions o;
  o.degree_cap = 800;
  return o;
}

struct UniformConfig {
  int stages = 3;
  /// K is scaled so its circumradius is k_radius. Shell K_m uses dilation
  /// radius r_min + (J - m) step with step = (k0_radius - k_radius - r_min) / J,
  /// and L_m sits l_share * step inside K_m.
  double k_radius = 0.15;
  double k0_radius = 0.9;
  double r_min = 0.05;
  double l_share = 0.8;
  double r_disc_cap = 0.01;  // largest radius of the discs forming R_j
  double epsilon_start = 0.1;  // eps_1, must be < 1/4
  int max_halvings = 8;
  int retain_steps = 20;
  double injectivity_spacing = 0.04;
  double sample_spacing = 0.02;
  FitOptions fit = uniform_fit_defaults();
  /// Stage whose fitted polynomial gets coefficient 0 shifted by 1 before
  /// verification (fault injection); -1 disables.
  int fault_stage = -1;
};

/// Affine normalization K -> scale K + shift used by the uniform engine.
struct Normalization {
  double scale = 1.0;
  cplx shift{};
};

/// Prop. 3.2: f_0 = (z - 3)/2, D_j = D(3j, 1); stage j+1 fits f_j on the
/// earlier pieces, -3 on R_j and z + 3 on f_j^j(L_j).
EngineRun uniform_escape_run(const CompactSet& k, const UniformConfig& config, Normalization* normalization = nullptr);

// ---------------------------------------------------------------------------

struct MaverickSpec {
  cplx center{0.0, 1.5};
  double radius = 0.25;
  /// Marks on the boundary of K whose orbits should escape (Z_I) or be
  /// bungee (Z_BU), given as angles on the circle.
  std::vector<double> escaping_marks{0.0};
  std::vector<double> bungee_marks{3.14159265358979323846};
};

struct ScaffoldEngineConfig {
  int stages = 3;
  double r_max = 10.0;
  double eps_cap = 0.2;
  int retain_steps = 20;
  FitOptions fit;
  int fault_stage = -1;
};

/// Prop. 5.2 with disc shells. Stage 0 needs the Lemma 4.1 function f_0.
EngineRun maverick_run(const MaverickSpec& spec, const ScaffoldEngineConfig& config);

/// Thm. 6.1 for the truncated ray K = [0, 3 R_max / 4] + 7i/2.
EngineRun eremenko_run(const ScaffoldEngineConfig& config);

}  // namespace wander
