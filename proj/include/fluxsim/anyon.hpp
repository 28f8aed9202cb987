#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fluxsim/group.hpp"
#include "fluxsim/rng.hpp"

namespace fluxsim {

using Amplitude = std::complex<double>;

/// Probabilities of the superselection sectors a vacuum pair can be born in.
struct SectorModel {
  std::vector<double> class_weights;  // indexed by class id
  double charged_weight = 0.0;

  /// Uniform over the non-identity classes; the charged sector gets
  /// `charged_weight` and the rest is split evenly.
  static SectorModel uniform_magnetic(const FiniteGroup& G, double charged_weight = 0.0);
  /// All magnetic weight on the class of `element`.
  static SectorModel concentrated(const FiniteGroup& G, int element, double charged_weight = 0.0);
  void validate(const FiniteGroup& G) const;
};

/// Unitary matrices R(g) for every group element, row-major.
struct Representation {
  std::string name;
  int dim = 1;
  std::vector<std::vector<Amplitude>> matrices;

  Amplitude entry(int g, int row, int col) const { return matrices[g][row * dim + col]; }
  Amplitude trace(int g) const;

  static Representation trivial(const FiniteGroup& G);
  /// Permutation action on the degree points restricted to the sum-zero subspace.
  static Representation standard(const FiniteGroup& G);
  /// Throws NotAHomomorphism unless R(g)R(h) = R(gh) and R is unitary within tol.
  void validate(const FiniteGroup& G, double tol = 1e-9) const;
};
using RepresentationPtr = std::shared_ptr<const Representation>;

enum class Direction { Cw, Ccw };
enum class FusionResult { Vacuum, Residual };

struct FusionOutcome {
  FusionResult result;
  double vacuum_probability;
};

using ParticleId = int;

struct PairId {
  ParticleId left = -1;
  ParticleId right = -1;
};

/// One pure component of the ensemble. Row t of `configs` holds the
/// register values of term t.
struct Branch {
  double weight = 1.0;
  std::vector<std::uint16_t> configs;
  std::vector<Amplitude> amps;
  std::vector<int> token_partner;  // per column: partner column, -1 none, -2 partner gone

  std::size_t terms() const { return amps.size(); }
};

/// Orthonormal vectors over the joint values of discarded registers, used to
/// pick how a partial trace is unravelled.
struct Unravelling {
  std::vector<std::vector<std::uint16_t>> keys;  // joint register values
  std::vector<std::vector<Amplitude>> vectors;   // each over `keys`
};

/// Ordered line of flux anyons plus off-line probe charges. Single owner;
/// every random collapse draws from the owned generator.
class AnyonSystem {
 public:
  AnyonSystem(GroupPtr G, std::uint64_t seed);

  const FiniteGroup& group() const { return *G_; }
  const GroupPtr& group_ptr() const { return G_; }
  Rng& rng() { return rng_; }

  PairId create_flux_ancilla(int g);
  PairId create_vacuum_pair(const SectorModel& model);
  /// Trivial-flux pair whose members carry mutually conjugate charge tokens.
  PairId create_charged_pair();
  /// Pair in sum_x amp[x] |x> |x^-1> over the listed fluxes (weights per
  /// entry of `fluxes`, normalized by the caller).
  PairId create_pair_superposition(std::span<const int> fluxes, std::span<const Amplitude> amps);
  /// Independent branches, one per (weight, fluxes, amps) entry.
  PairId create_pair_mixture(const std::vector<double>& weights, const std::vector<std::vector<int>>& fluxes,
                             const std::vector<std::vector<Amplitude>>& amps);

  void exchange(int position, Direction dir);
  void conjugate_pair(PairId actor, PairId target, int power);
  /// Moves a trivial-flux pair so that it starts at `position` (pure relabelling).
  void move_pair(PairId pair, int position);

  FusionOutcome fuse(ParticleId i, ParticleId j);
  /// Flux-basis measurement of one anyon, which is then removed.
  bool flux_is_trivial_destructive(ParticleId p);

  int create_charge_probe(RepresentationPtr rep);
  /// Encircles a contiguous run of anyons.
  void encircle_with_probe(int probe, std::span<const ParticleId> anyons);
  /// Encircles anyons one after another in the given order; the probe picks
  /// up R(g_1 ... g_k). Works for non-contiguous sets.
  void lasso(int probe, std::span<const ParticleId> anyons);
  bool fuse_probe(int probe);

  /// Partial trace over the particles. Separable factors are dropped
  /// without randomness; otherwise the discarded registers are measured in
  /// the flux basis (or the given basis) and the result forgotten.
  void discard(std::span<const ParticleId> particles, const Unravelling* basis = nullptr);

  // Inspection and low-level access.
  const std::vector<ParticleId>& line() const { return line_; }
  int position_of(ParticleId p) const;
  bool alive(ParticleId p) const;
  bool is_composite(ParticleId p) const;
  int column_of(ParticleId p) const;
  int probe_columns(int probe, int which) const;
  int columns() const { return static_cast<int>(reg_of_col_.size()); }
  const std::vector<Branch>& branches() const { return branches_; }
  std::vector<Branch>& mutable_branches() { return branches_; }
  /// Flux of a particle in one row (product of its registers).
  int flux_in_row(const std::uint16_t* row, ParticleId p) const;
  /// Net flux of the pair is 1 in every term of every branch.
  bool pair_is_neutral(PairId pair) const;
  /// Applies an in-place bijection to every row of every branch.
  void permute_rows(const std::function<void(std::uint16_t*)>& f);
  /// Rebuilds each branch after an amplitude map that may merge rows.
  void normalize_branches();

  std::vector<std::string>& transcript() { return transcript_; }
  void log(std::string line) { transcript_.push_back(std::move(line)); }

  /// Probability that particle p carries flux g.
  std::vector<double> flux_distribution(ParticleId p) const;
  double total_weight() const;
  double max_norm_error() const;

 private:
  struct Particle {
    std::vector<int> regs;  // register ids, left to right
    bool alive = true;
  };
  struct Probe {
    RepresentationPtr rep;
    int left_reg;
    int right_reg;
    bool alive = true;
  };

  int add_register();
  ParticleId add_particle(std::vector<int> regs);
  void add_columns(int count, const std::function<void(Branch&, std::vector<std::uint16_t>&, std::vector<Amplitude>&)>& fill);
  void remove_registers(std::span<const int> regs);
  void merge_branches();
  void discard_registers(std::span<const int> regs, const Unravelling* basis);
  void apply_probe_rep(int probe, const std::function<int(const std::uint16_t*)>& flux_of_row);

  GroupPtr G_;
  Rng rng_;
  std::vector<Branch> branches_;
  std::vector<int> col_of_reg_;
  std::vector<int> reg_of_col_;
  std::vector<Particle> particles_;
  std::vector<Probe> probes_;
  std::vector<ParticleId> line_;
  std::vector<std::string> transcript_;
};

/// Probe test that g1 == g2 for pairs (g1, g1^-1) and (g2, g2^-1). Moves
/// pair2 next to pair1 and encircles g2^-1 g1 with fresh probes; stops at
/// the first probe that fails to fuse to vacuum.
bool compare_fluxes(AnyonSystem& sys, PairId pair1, PairId pair2, int reps, RepresentationPtr rep);

/// Probe test that the ordered product of the listed anyons' fluxes is 1.
/// Repeated anyons are wound around repeatedly.
bool product_is_trivial(AnyonSystem& sys, std::span<const ParticleId> anyons, int reps, RepresentationPtr rep);

struct DistillOptions {
  int budget = 0;         // vacuum pairs drawn
  int reps = 8;           // probes per equality test
  int keep_per_bin = 2;   // pairs retained per bin, extra ones are discarded
  SectorModel sectors;    // empty: uniform over magnetic sectors
  /// When nonempty, pairs are drawn uniformly from the non-identity elements
  /// of the subgroup generated by these elements and labels refer to it.
  std::vector<int> subgroup_generators;
  RepresentationPtr rep;  // empty: standard representation
};

struct FluxBin {
  std::vector<PairId> pairs;
  int drawn = 0;    // pairs sorted into this bin
  int label = -1;   // group element, -1 when unlabeled
};

struct DistillResult {
  std::vector<FluxBin> bins;
  bool labeled = false;
  bool partial = false;                // some non-identity element has no bin
  std::vector<int> generator_bins;     // bin chosen for each generator
  int trivial_discarded = 0;           // pairs with trivial flux thrown away
};

/// Sorts vacuum pairs into bins of equal flux and labels the bins with group
/// elements by checking relations with probe loops. Labels are determined up
/// to an automorphism.
DistillResult distill_flux_bins(AnyonSystem& sys, const DistillOptions& options);

}  // namespace fluxsim
