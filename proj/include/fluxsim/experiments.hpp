#pragma once

// Seeded statistical experiments shared by the CLI demos and the
// acceptance runner. Every line of a report depends only on the config.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fluxsim {

struct RunConfig {
  std::uint64_t seed = 1;
  std::int64_t trials = 0;  // 0: the experiment's own default
  std::string group;        // empty: A5
  double charged_weight = 0.0;
  int d = 0;                // 0: every dimension the experiment covers
  int budget = 0;           // distillation draws; 0: default
};

struct ExperimentReport {
  explicit ExperimentReport(std::string n) : name(std::move(n)) {}

  std::string name;
  bool pass = true;
  std::vector<std::string> lines;

  void note(std::string line) { lines.push_back(std::move(line)); }
  /// Records a bound check; one failure fails the report.
  void check(bool ok, std::string line);
  std::string text() const;
};

ExperimentReport toffoli_experiment(const RunConfig& cfg);
ExperimentReport fusion_experiment(const RunConfig& cfg);
ExperimentReport xsector_experiment(const RunConfig& cfg);
ExperimentReport synthesis_experiment(const RunConfig& cfg);
ExperimentReport group_theory_experiment(const RunConfig& cfg);
ExperimentReport leakage_experiment(const RunConfig& cfg);
ExperimentReport probe_experiment(const RunConfig& cfg);
ExperimentReport universality_experiment(const RunConfig& cfg);
ExperimentReport coset_experiment(const RunConfig& cfg);
ExperimentReport bootstrap_experiment(const RunConfig& cfg);
ExperimentReport measure_x_experiment(const RunConfig& cfg);
ExperimentReport distill_experiment(const RunConfig& cfg);

struct NamedExperiment {
  const char* name;
  ExperimentReport (*run)(const RunConfig&);
};

/// Demo names in CLI order.
const std::vector<NamedExperiment>& demos();
/// Acceptance criteria 1 to 9 in order.
const std::vector<NamedExperiment>& criteria();

/// Runs the listed criteria (all when empty) with their wall-clock limits,
/// printing each report and then one "criterion N: PASS|FAIL" line apiece.
/// Returns true when every criterion run passed.
bool run_acceptance(const RunConfig& cfg, std::span<const int> only, std::ostream& out);

/// "observed x vs p (3 sigma band [lo, hi], n trials)"
std::string rate_line(const std::string& what, std::int64_t hits, std::int64_t n, double p);
/// |hits - n p| <= k sqrt(n p (1 - p)); exact equality when p is 0 or 1.
bool within_sigma(std::int64_t hits, std::int64_t n, double p, double k = 3.0);

}  // namespace fluxsim
