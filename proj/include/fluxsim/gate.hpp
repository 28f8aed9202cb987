#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fluxsim/anyon.hpp"
#include "fluxsim/oracle.hpp"
#include "fluxsim/program.hpp"
#include "fluxsim/synth.hpp"

namespace fluxsim {

struct RegisterOptions {
  std::optional<int> prefer_d;
  /// Charged weight of the vacuum pairs consumed by the x~0 protocol.
  double charged_weight = 0.0;
  /// Words longer than this are applied as one permutation of the
  /// configurations instead of atom by atom.
  double compile_threshold = 20000;
  int xzero_retry_cap = 20000;
  int bootstrap_retry_cap = 64;
  /// Copies for the x~0 zero test during bootstrap; 0 picks the default.
  int zero_test_copies = 0;
  /// After the first certified x~0, later ones skip the failed attempts: their
  /// count is drawn from the geometric law of the (constant) filter
  /// probability and the certified pair is recreated from a captured template.
  bool xzero_fast_forward = false;
  /// Replaces the default vacuum sectors of the x~0 protocol.
  std::optional<SectorModel> xzero_vacuum;
};

struct LogicalOutcome {
  int digit = 0;
  double confidence = 0.0;  // posterior probability of `digit`
  int fusions = 0;          // fusion attempts made
};

enum class DiscardBasis { Flux, X, Y };

/// Logical qudits encoded as flux pairs (a^n b a^-n, inverse), either over a
/// simple perfect group directly or over G through P/N with rho_x ancillas.
class QuditRegister {
 public:
  /// Pure mode over Q with parameters from find_qudit_params.
  QuditRegister(GroupPtr Q, std::uint64_t seed, RegisterOptions options = {});
  /// Coset mode; the parameters live in the quotient.
  QuditRegister(CosetContext ctx, std::uint64_t seed, RegisterOptions options = {});
  QuditRegister(CosetContext ctx, QuditParams params, std::uint64_t seed, RegisterOptions options = {});

  bool coset_mode() const { return coset_; }
  const CosetContext& context() const { return ctx_; }
  const FiniteGroup& quotient() const { return *ctx_.quotient; }
  const QuditParams& params() const { return q_; }
  int d() const { return q_.d; }
  const std::vector<int>& basis() const { return basis_; }
  AnyonSystem& system() { return sys_; }
  const AnyonSystem& system() const { return sys_; }
  const RegisterOptions& options() const { return opt_; }

  int encode(int digit);
  bool alive(int q) const;
  PairId pair(int q) const;
  /// Logical digit of a physical flux, -1 outside the computational basis.
  int digit_of_flux(int g) const;
  /// Image of a physical flux in the quotient, -1 outside P.
  int logical_flux(int g) const { return ctx_.epi[g]; }

  void conjugate_by_function(const Program& f, std::span<const int> controls, int target, int power = 1);
  void toffoli(int q1, int q2, int q3, int power = 1);
  void controlled_sum(int qc, int qt, int power = 1);
  void gate_X(int q, int power = 1);
  void gate_Z(int q, int power = 1);
  /// Controlled (X^a Z^b) with the phase computed in scratch qudits.
  void controlled_XaZb(int qc, int qt, int a, int b);
  /// Controlled (Z X) for qubits.
  void controlled_ZX(int qc, int qt);

  LogicalOutcome measure_Z(int q, int copies = 0);
  LogicalOutcome measure_X(int q, int copies = 0);
  int measure_XaZb(int q, int a, int b);

  /// Runs the incomplete-swap protocol until it certifies an x~0 ancilla.
  /// A positive `retry_cap` overrides the option.
  int prepare_xzero(int retry_cap = 0);
  /// x~0 from the pool, or a fresh one.
  int take_xzero();
  std::vector<int>& xzero_pool() { return xzero_pool_; }
  /// Fills the x~1 pool; for qubits also designates an iY eigenstate.
  void bootstrap_xone();
  bool bootstrapped() const { return !xone_pool_.empty(); }
  int xone() const;
  /// Designated iY eigenstate (qubits only).
  int iy_reference() const;
  /// Copy of the iY reference made with controlled-ZX from an x~0.
  int copy_iy(int source);
  /// Single-shot check that two iY eigenstates are the same one. Uses one
  /// x~0; returns false only when a contradiction is observed.
  bool iy_consistent(int a, int b);

  /// Partial trace over one qudit, unravelled in the given basis.
  void discard(int q, DiscardBasis basis = DiscardBasis::Flux);

  /// Register x~1 equals the physical x~_k; Z acts as Z^k with the principal
  /// root. Set when bootstrapping, for comparison with the oracle only.
  int omega_power() const { return omega_power_; }

  /// Overwrites the amplitudes of fresh qudits (test and demo input only).
  std::vector<int> inject(const oracle::DenseState& state);

  std::size_t attempts() const { return xzero_attempts_; }
  std::size_t xzero_successes() const { return xzero_successes_; }
  std::size_t xzero_failures() const { return xzero_attempts_ - xzero_successes_; }

  /// Vacuum pair sectors used by the x~0 protocol: all weight on classes of G
  /// that meet the preimage of C(b), proportional to the overlap.
  const SectorModel& vacuum_model() const { return vacuum_model_; }

  PairId make_ancilla(int x);
  int adopt(PairId p);
  /// Points qudit q at another pair; the old pair is left to the caller.
  void rebind(int q, PairId p);
  /// Conjugates `target` by f(flux of control) with the x~0 function f,
  /// or by its inverse for power -1. Both pairs may carry net flux in N.
  void xzero_conjugation(PairId control, PairId target, int power);
  /// Net flux of the pair lies in N in every term.
  bool net_flux_in_kernel(PairId p) const;
  void forget(int q);
  void discard_particles(std::vector<ParticleId> ps);

 private:
  struct Function {
    Program q_prog;
    Program g_prog;
    bool compiled = false;
    std::vector<Atom> word;
    std::unordered_map<std::uint64_t, int> memo;  // control fluxes in mixed radix -> f
  };

  void init();
  Function& function(const std::string& name);
  Function make_function(const Program& f) const;
  void apply_function(Function& fn, std::span<const PairId> controls, PairId target, int power);
  void conjugate_rows(PairId target, int g);
  Unravelling unravelling(const PairId& p, DiscardBasis basis) const;
  int xone_candidate();
  bool zero_test(int q, int copies);
  int fast_forward_xzero();

  struct PairTemplate {
    std::vector<double> weights;
    std::vector<std::vector<int>> fluxes;
    std::vector<std::vector<Amplitude>> amps;
  };
  PairTemplate capture_template(const PairId& p) const;

  bool coset_;
  CosetContext ctx_;
  QuditParams q_;
  RegisterOptions opt_;
  AnyonSystem sys_;
  std::unique_ptr<Synthesizer> syn_;
  std::vector<int> basis_;
  std::vector<int> digit_of_q_;  // quotient element -> digit
  std::vector<int> fiber_size_;  // quotient element -> preimages in P
  SectorModel vacuum_model_;
  std::vector<PairId> qudits_;
  std::vector<char> alive_;
  std::map<std::string, Function> functions_;
  std::vector<int> xzero_pool_;
  std::vector<int> xone_pool_;
  int iy_ref_ = -1;
  int omega_power_ = 1;
  std::size_t xzero_attempts_ = 0;
  std::size_t xzero_successes_ = 0;
  double xzero_filter_p_ = 0.0;
  std::optional<PairTemplate> xzero_template_;
};

/// Reads the logical state of the listed qudits. They must be unentangled
/// from everything else and every branch must agree up to phase.
oracle::DenseState extract_logical_state(const QuditRegister& reg, std::span<const int> qudits);
/// Digit tuples with nonzero weight in any branch; throws OutOfSubspace for
/// fluxes outside the basis.
std::vector<std::vector<int>> logical_support(const QuditRegister& reg, std::span<const int> qudits);
/// Probability that the listed qudits lie in the computational subspace.
double computational_weight(const QuditRegister& reg, std::span<const int> qudits);

enum class CircuitOpKind { Encode, Toffoli, Csum, X, Z, MeasureZ, MeasureX, MeasureXZ };

struct CircuitOp {
  CircuitOpKind kind;
  std::vector<int> args;
  int line = 0;
};

std::vector<CircuitOp> parse_circuit(std::string_view text);
std::string format_circuit(const std::vector<CircuitOp>& ops);
/// Runs the circuit; circuit qudit labels are mapped to register qudits on
/// `enc`. Returns one result line per measurement.
std::vector<std::string> run_circuit(QuditRegister& reg, const std::vector<CircuitOp>& ops);

}  // namespace fluxsim
