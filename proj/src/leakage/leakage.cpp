#include "fluxsim/leakage.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fluxsim/errors.hpp"

namespace fluxsim {

namespace {

// Full loop of the probe pair around `pair`: the probe is conjugated by the
// pair's net flux, the pair by the probe's (trivial) one.
void encircle(AnyonSystem& sys, PairId pair, PairId probe) {
  const FiniteGroup& G = sys.group();
  const int pl = sys.column_of(probe.left);
  const int pr = sys.column_of(probe.right);
  sys.permute_rows([&](std::uint16_t* row) {
    const int h = G.mul(sys.flux_in_row(row, pair.left), sys.flux_in_row(row, pair.right));
    if (h == G.identity()) return;
    row[pl] = static_cast<std::uint16_t>(G.conj(h, row[pl]));
    row[pr] = static_cast<std::uint16_t>(G.conj(h, row[pr]));
  });
}

// Moves both anyons of the pair to the end of the line, always as the left
// member of the exchange so that only the moving anyon is conjugated.
void route_off_line(AnyonSystem& sys, PairId p) {
  int pos = sys.position_of(p.right);
  const int n = static_cast<int>(sys.line().size());
  for (; pos + 1 < n; ++pos) sys.exchange(pos, Direction::Cw);
  for (pos = sys.position_of(p.left); pos + 2 < n; ++pos) sys.exchange(pos, Direction::Cw);
}

void replace_with_zero(QuditRegister& reg, int q) {
  const PairId old = reg.pair(q);
  route_off_line(reg.system(), old);
  reg.discard_particles({old.left, old.right});
  reg.rebind(q, reg.make_ancilla(reg.basis()[0]));
}

// Ancilla conjugated by f(qudit), qudit by f(ancilla)^-1; the ancilla
// becomes the qudit and the old pair is traced out.
void swap_into_fresh(QuditRegister& reg, int q) {
  const PairId old = reg.pair(q);
  const PairId anc = reg.make_ancilla(reg.basis()[0]);
  reg.xzero_conjugation(old, anc, 1);
  reg.xzero_conjugation(anc, old, -1);
  reg.rebind(q, anc);
  reg.discard_particles({old.left, old.right});
}

LeakageReport run_stage_one(QuditRegister& reg, int q, const LeakageOptions& opt, bool& flagged) {
  LeakageReport rep;
  rep.qudit = q;
  const std::vector<int> probes = opt.probes.empty() ? default_probe_elements(reg.quotient()) : opt.probes;
  const int reps = opt.reps > 0 ? opt.reps : default_probe_reps(reg, probes, opt.sigma);
  flagged = detect_nontrivial_effect(reg, reg.pair(q), probes, reps, opt.sigma, &rep.tallies);
  if (flagged) {
    replace_with_zero(reg, q);
    rep.stage = LeakageStage::NetFlux;
    rep.verdict = LeakageVerdict::Replaced;
  }
  return rep;
}

}  // namespace

std::vector<int> default_probe_elements(const FiniteGroup& Q) {
  std::vector<int> probes;
  for (const auto& cls : Q.classes()) {
    if (cls.front() != Q.identity()) probes.push_back(cls.front());
  }
  for (;;) {
    int z = -1;
    for (int g = 1; g < Q.order() && z < 0; ++g) {
      bool all = true;
      for (int p : probes) all = all && Q.commute(g, p);
      if (all) z = g;
    }
    if (z < 0) break;
    int y = -1;
    for (int g = 0; g < Q.order() && y < 0; ++g) {
      if (!Q.commute(g, z)) y = g;
    }
    if (y < 0) break;  // z is central
    probes.push_back(y);
  }
  return probes;
}

double probe_baseline(const QuditRegister& reg, int x) {
  const CosetContext& ctx = reg.context();
  const FiniteGroup& G = *ctx.G;
  std::map<int, int> in_class;
  int fiber = 0;
  for (int g = 0; g < G.order(); ++g) {
    if (ctx.epi[g] == x) {
      ++in_class[G.class_of(g)];
      ++fiber;
    }
  }
  double p = 0;
  for (const auto& [c, m] : in_class) {
    p += m / (static_cast<double>(fiber) * fiber * static_cast<double>(G.classes()[c].size()));
  }
  return p;
}

int default_probe_reps(const QuditRegister& reg, std::span<const int> probes, double sigma) {
  int reps = 500;
  for (int x : probes) {
    const double p0 = probe_baseline(reg, x);
    reps = std::max(reps, static_cast<int>(std::ceil(sigma * sigma * (1 - p0) / p0)));
  }
  return reps;
}

bool detect_nontrivial_effect(QuditRegister& reg, PairId pair, std::span<const int> probes, int reps, double sigma,
                              std::vector<ProbeTally>* tallies) {
  const FiniteGroup& Q = reg.quotient();
  AnyonSystem& sys = reg.system();
  struct Plan {
    int x;
    double p0;
    double kmax;  // flagged iff vacua <= kmax
  };
  std::vector<Plan> plans;
  for (int x : probes) {
    if (x < 0 || x >= Q.order()) throw PositionOutOfRange("probe element out of range");
    if (x == Q.identity()) throw StructuralError("the identity cannot serve as a probe");
    const double p0 = probe_baseline(reg, x);
    if (reps * p0 / (1 - p0) < sigma * sigma) {
      throw Indeterminate(std::to_string(reps) + " fusions cannot reach " + std::to_string(sigma) +
                          " sigma against a baseline of " + std::to_string(p0));
    }
    plans.push_back({x, p0, reps * p0 - sigma * std::sqrt(reps * p0 * (1 - p0))});
  }
  for (const Plan& pl : plans) {
    ProbeTally t{pl.x, 0, 0, pl.p0};
    while (t.reps < reps && t.vacua <= pl.kmax) {
      const PairId A = reg.make_ancilla(pl.x);
      encircle(sys, pair, A);
      const PairId B = reg.make_ancilla(Q.inv(pl.x));
      ++t.reps;
      if (sys.fuse(A.left, B.left).result == FusionResult::Vacuum) ++t.vacua;
      reg.discard_particles({A.left, A.right, B.left, B.right});
    }
    if (tallies) tallies->push_back(t);
    if (t.vacua <= pl.kmax) {
      sys.log("leak probe " + Q.format(pl.x) + " flagged vacua=" + std::to_string(t.vacua) + "/" +
              std::to_string(t.reps));
      return true;
    }
  }
  return false;
}

LeakageReport leakage_correct(QuditRegister& reg, int q, const LeakageOptions& options) {
  if (reg.coset_mode()) throw StructuralError("coset-mode registers use leakage_correct_general");
  bool flagged = false;
  LeakageReport rep = run_stage_one(reg, q, options, flagged);
  if (!flagged) {
    swap_into_fresh(reg, q);
    rep.stage = LeakageStage::ChargeFilter;
  }
  reg.system().log("leak " + to_string(rep.stage) + " " + to_string(rep.verdict));
  return rep;
}

LeakageReport leakage_correct_general(QuditRegister& reg, int q, const LeakageOptions& options) {
  if (!reg.coset_mode()) throw StructuralError("leakage_correct_general needs a coset-mode register");
  bool flagged = false;
  LeakageReport rep = run_stage_one(reg, q, options, flagged);
  if (!flagged) {
    // The first swap lands in P; the second in the computational basis.
    swap_into_fresh(reg, q);
    swap_into_fresh(reg, q);
    rep.stage = LeakageStage::CosetFilter;
  }
  reg.system().log("leak " + to_string(rep.stage) + " " + to_string(rep.verdict));
  return rep;
}

int prepare_rho_xzero(QuditRegister& reg, int retry_cap) {
  if (!reg.coset_mode()) throw StructuralError("prepare_rho_xzero needs a coset-mode register");
  return reg.prepare_xzero(retry_cap);
}

std::string to_string(LeakageStage s) {
  switch (s) {
    case LeakageStage::NetFlux: return "net-flux";
    case LeakageStage::ChargeFilter: return "charge-filter";
    case LeakageStage::CosetFilter: return "coset-filter";
  }
  return "?";
}

std::string to_string(LeakageVerdict v) { return v == LeakageVerdict::Clean ? "clean" : "replaced"; }

std::string format_report(const LeakageReport& report, const FiniteGroup& Q) {
  std::ostringstream os;
  os << "leakage qudit=" << report.qudit << " stage=" << to_string(report.stage)
     << " verdict=" << to_string(report.verdict) << '\n';
  for (const ProbeTally& t : report.tallies) {
    os << "probe reps=" << t.reps << " vacua=" << t.vacua << " baseline=" << t.baseline
       << " element=" << Q.format(t.element) << '\n';
  }
  return os.str();
}

void inject_net_flux(QuditRegister& reg, int q, int h) {
  AnyonSystem& sys = reg.system();
  const PairId p = reg.pair(q);
  if (sys.is_composite(p.right)) throw StructuralError("cannot inject into a composite anyon");
  const FiniteGroup& G = sys.group();
  const int c = sys.column_of(p.right);
  sys.permute_rows([&](std::uint16_t* row) { row[c] = static_cast<std::uint16_t>(G.mul(row[c], h)); });
}

int leaked_qudit(QuditRegister& reg, std::span<const int> fluxes, std::span<const Amplitude> amps) {
  return reg.adopt(reg.system().create_pair_superposition(fluxes, amps));
}

int charged_qudit(QuditRegister& reg) { return reg.adopt(reg.system().create_charged_pair()); }

}  // namespace fluxsim
