#pragma once

#include <string>
#include <vector>

#include "fluxsim/gate.hpp"

namespace fluxsim {

enum class LeakageStage { NetFlux, ChargeFilter, CosetFilter };
enum class LeakageVerdict { Clean, Replaced };

struct ProbeTally {
  int element = 0;        // quotient element of the probe ancilla
  int reps = 0;           // fusions made
  int vacua = 0;
  double baseline = 0.0;  // vacuum rate when the pair has no effect
};

struct LeakageReport {
  int qudit = -1;
  LeakageStage stage = LeakageStage::NetFlux;
  LeakageVerdict verdict = LeakageVerdict::Clean;
  std::vector<ProbeTally> tallies;
};

struct LeakageOptions {
  std::vector<int> probes;  // empty: default_probe_elements
  int reps = 0;  // 0: default_probe_reps
  double sigma = 5.0;
};

/// One representative per nontrivial class of the quotient, extended until
/// the centralizers of the probes meet only in the identity.
std::vector<int> default_probe_elements(const FiniteGroup& Q);

/// Vacuum rate for fusing the left anyon of rho_x with the left anyon of
/// rho_{x^-1}; 1/|C(x)| in pure mode.
double probe_baseline(const QuditRegister& reg, int x);

/// 500, raised when some probe's baseline is too low for `sigma` to be
/// reachable in 500 fusions.
int default_probe_reps(const QuditRegister& reg, std::span<const int> probes, double sigma = 5.0);

/// Stage one. For each probe x the pair encircles a rho_x ancilla, which is
/// then fused against rho_{x^-1}. Flags the pair when the vacuum count at
/// some probe falls `sigma` standard deviations below the baseline. A probe
/// stops early once its count can no longer fall that far.
bool detect_nontrivial_effect(QuditRegister& reg, PairId pair, std::span<const int> probes, int reps,
                              double sigma = 5.0, std::vector<ProbeTally>* tallies = nullptr);

/// Simple perfect group: net flux test, then an incomplete swap into a
/// fresh |0>. The qudit id is kept; its pair is replaced.
LeakageReport leakage_correct(QuditRegister& reg, int q, const LeakageOptions& options = {});
/// Coset mode: braid-effect test against rho_x, then two swaps into fresh
/// rho_0 ancillas.
LeakageReport leakage_correct_general(QuditRegister& reg, int q, const LeakageOptions& options = {});

/// The x~0 protocol in coset mode.
int prepare_rho_xzero(QuditRegister& reg, int retry_cap = 0);

std::string to_string(LeakageStage s);
std::string to_string(LeakageVerdict v);
/// One header line, then one line per probe.
std::string format_report(const LeakageReport& report, const FiniteGroup& Q);

// Injected damage for tests and demos.

/// Multiplies the right anyon of q by h, giving the pair net flux h.
void inject_net_flux(QuditRegister& reg, int q, int h);
/// New qudit holding sum_i amps[i] |fluxes[i]> |fluxes[i]^-1> (fluxes in G).
int leaked_qudit(QuditRegister& reg, std::span<const int> fluxes, std::span<const Amplitude> amps);
/// New qudit whose anyons carry conjugate charge tokens and trivial flux.
int charged_qudit(QuditRegister& reg);

}  // namespace fluxsim
