#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "wander/engines.hpp"

namespace wander {

bool StageReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

const ContractCheck* StageReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

const ContractCheck* StageReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return &c;
  return nullptr;
}

std::string StageReport::text() const {
  std::ostringstream out;
  out << "stage: " << stage << "\n";
  out << "passed: " << (passed() ? "true" : "false") << "\n";
  out << "checks: " << checks.size() << "\n";
  for (std::size_t k = 0; k < checks.size(); ++k) {
    const auto& c = checks[k];
    out << "[check." << k << "]\n";
    out << "name: " << c.name << "\n";
    out << "paper_item: " << c.paper_item << "\n";
    out << "samples: " << c.samples << "\n";
    out << "worst_margin: " << fmt17(c.worst_margin) << "\n";
    out << "passed: " << (c.passed ? "true" : "false") << "\n";
    if (c.indeterminate) out << "indeterminate: true\n";
    if (c.witness) out << "witness: " << fmt17(*c.witness) << "\n";
    if (!c.note.empty()) out << "note: " << c.note << "\n";
  }
  return out.str();
}

void StageReport::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << text();
}

namespace {

ContractCheck evaluate(const Contract& c) {
  if (c.global) {
    ContractCheck out = c.global();
    out.name = c.name;
    out.paper_item = c.paper_item;
    return out;
  }
  ContractCheck out;
  out.name = c.name;
  out.paper_item = c.paper_item;
  out.samples = c.samples.size();
  out.worst_margin = std::numeric_limits<double>::infinity();
  if (c.samples.empty()) return out;
  std::vector<double> margins(c.samples.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(c.samples.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      margins[k] = c.margin(c.samples[k]);
    } catch (const Error&) {
      margins[k] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  for (std::size_t k = 0; k < margins.size(); ++k) {
    if (!std::isfinite(margins[k])) {
      if (!out.indeterminate) out.witness = c.samples[k];
      out.indeterminate = true;
      continue;
    }
    if (margins[k] < out.worst_margin) {
      out.worst_margin = margins[k];
      if (!out.indeterminate) out.witness = c.samples[k];
    }
  }
  if (out.indeterminate) {
    out.passed = false;
    out.note = "sample left the window";
  } else {
    out.passed = out.worst_margin > 0.0;
    if (out.passed) out.witness.reset();
  }
  return out;
}

}  // namespace

StageReport stage_verify(const StageState& state, const std::vector<Contract>& contracts) {
  StageReport report;
  report.stage = state.j;
  for (const auto& c : contracts) report.checks.push_back(evaluate(c));
  return report;
}

Contract disc_contract(std::string name, std::string item, std::vector<cplx> samples, AnalyticMap g, cplx center,
                       double radius, double escape) {
  Contract c;
  c.name = std::move(name);
  c.paper_item = std::move(item);
  c.samples = std::move(samples);
  c.margin = [g = std::move(g), center, radius, escape](cplx z) {
    const cplx w = g.value(z);
    if (!std::isfinite(std::abs(w)) || std::abs(w) > escape) return std::numeric_limits<double>::quiet_NaN();
    return radius - std::abs(w - center);
  };
  return c;
}

void write_stage(const StageState& state, const std::string& dir) {
  std::filesystem::create_directories(dir);
  if (state.f) {
    state.f->write(dir + "/polynomial.txt");
    state.f->write_certificate(dir + "/certificate.txt");
  }
  state.report.write(dir + "/report.txt");
  std::ofstream out(dir + "/stage.txt", std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + dir + "/stage.txt");
  out << "stage: " << state.j << "\n";
  out << "epsilon: " << fmt17(state.epsilon) << "\n";
  out << "shell_index: " << state.m << "\n";
  out << "degree: " << (state.f ? state.f->degree() : -1) << "\n";
  out << "plan_pieces: " << state.plan.pieces.size() << "\n";
  for (std::size_t k = 0; k < state.plan.pieces.size(); ++k)
    out << "piece." << k << ": " << state.plan.pieces[k].name << " " << state.plan.pieces[k].rule.describe() << "\n";
  for (const auto& net : state.nets) out << "net." << net.name << ": " << net.points.size() << "\n";
  for (std::size_t k = 0; k < state.log.size(); ++k) out << "log." << k << ": " << state.log[k] << "\n";
  for (const auto& r : state.regions) write_compact_set(dir + "/" + r.name, r.set);
}

}  // namespace wander
