#include "fluxsim/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <random>

#include "fluxsim/errors.hpp"
#include "fluxsim/leakage.hpp"
#include "fluxsim/parallel.hpp"

namespace fluxsim {

namespace {

// Register-heavy experiments split their trials over this many independent
// registers; the count is fixed so results do not depend on thread count.
constexpr int kShards = 8;

std::string fmt(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string frac(std::int64_t a, std::int64_t b) { return std::to_string(a) + "/" + std::to_string(b); }

GroupPtr group_of(const RunConfig& c) { return resolve_group(c.group.empty() ? "A5" : c.group); }

const GroupPtr& a5() {
  static const GroupPtr G = alternating_group(5);
  return G;
}

std::vector<int> dims(const RunConfig& c, std::vector<int> fallback) {
  return c.d > 0 ? std::vector<int>{c.d} : fallback;
}

std::int64_t trials_or(const RunConfig& c, std::int64_t fallback) { return c.trials > 0 ? c.trials : fallback; }

// Independent stream for one part of an experiment.
std::uint64_t sub(const RunConfig& c, std::uint64_t tag) { return trial_seed(c.seed, (1ULL << 40) + tag); }

std::int64_t shard_size(std::int64_t n, int s) { return n / kShards + (s < n % kShards ? 1 : 0); }

RegisterOptions opts(int d, bool fast = false, double charged_weight = 0.0) {
  RegisterOptions o;
  o.prefer_d = d;
  o.xzero_fast_forward = fast;
  o.charged_weight = charged_weight;
  return o;
}

oracle::DenseState random_state(int d, int k, std::mt19937_64& eng) {
  std::normal_distribution<double> n;
  oracle::DenseState s(d, k);
  double norm = 0;
  for (auto& a : s.amplitudes()) {
    a = {n(eng), n(eng)};
    norm += std::norm(a);
  }
  for (auto& a : s.amplitudes()) a /= std::sqrt(norm);
  return s;
}

oracle::DenseState single(int d, std::vector<Amplitude> v) { return oracle::DenseState::from_amplitudes(d, 1, std::move(v)); }

bool in_subspace(const QuditRegister& reg, int q) {
  const int qs[1] = {q};
  return computational_weight(reg, qs) >= 1 - 1e-9;
}

int class_size(const FiniteGroup& G, int g) { return static_cast<int>(G.class_elements_of(g).size()); }

}  // namespace

void ExperimentReport::check(bool ok, std::string line) {
  pass = pass && ok;
  lines.push_back((ok ? "ok   " : "FAIL ") + line);
}

std::string ExperimentReport::text() const {
  std::string out = "== " + name + "\n";
  for (const auto& l : lines) out += l + "\n";
  out += std::string(pass ? "PASS" : "FAIL") + " " + name + "\n";
  return out;
}

bool within_sigma(std::int64_t hits, std::int64_t n, double p, double k) {
  if (p <= 0 || p >= 1) return hits == static_cast<std::int64_t>(std::llround(p * static_cast<double>(n)));
  const double sd = std::sqrt(static_cast<double>(n) * p * (1 - p));
  return std::abs(static_cast<double>(hits) - static_cast<double>(n) * p) <= k * sd;
}

std::string rate_line(const std::string& what, std::int64_t hits, std::int64_t n, double p) {
  const double nn = static_cast<double>(n);
  const double sd = std::sqrt(p * (1 - p) / nn);
  return what + ": observed " + fmt(static_cast<double>(hits) / nn) + " (" + frac(hits, n) + ") vs " + fmt(p) +
         ", 3 sigma band [" + fmt(std::max(0.0, p - 3 * sd)) + ", " + fmt(std::min(1.0, p + 3 * sd)) + "]";
}

ExperimentReport toffoli_experiment(const RunConfig& cfg) {
  ExperimentReport r{"toffoli"};
  const GroupPtr G = group_of(cfg);
  const std::int64_t n = trials_or(cfg, 100);
  for (int d : dims(cfg, {2, 3})) {
    QuditRegister reg(G, sub(cfg, d), opts(d));
    r.note("d=" + std::to_string(d) + " a=" + G->format(reg.params().a) + " b=" + G->format(reg.params().b));
    int agree = 0, total = 0;
    double worst = 1;
    for (int l = 0; l < d; ++l)
      for (int m = 0; m < d; ++m)
        for (int k = 0; k < d; ++k) {
          const int qs[3] = {reg.encode(l), reg.encode(m), reg.encode(k)};
          reg.toffoli(qs[0], qs[1], qs[2]);
          const int in[3] = {l, m, k};
          auto want = oracle::DenseState::basis(d, in);
          want.apply_toffoli(0, 1, 2);
          const double f = oracle::fidelity(extract_logical_state(reg, qs), want);
          worst = std::min(worst, f);
          agree += f >= 1 - 1e-9;
          ++total;
          for (int q : qs) reg.discard(q);
        }
    r.check(agree == total, "d=" + std::to_string(d) + " basis agreements " + frac(agree, total) +
                                ", min fidelity " + fmt(worst, 12));
    std::mt19937_64 eng(sub(cfg, 100 + d));
    double worst_sup = 1;
    for (std::int64_t t = 0; t < n; ++t) {
      auto in = random_state(d, 3, eng);
      const auto qs = reg.inject(in);
      reg.toffoli(qs[0], qs[1], qs[2]);
      in.apply_toffoli(0, 1, 2);
      worst_sup = std::min(worst_sup, oracle::fidelity(extract_logical_state(reg, qs), in));
      for (int q : qs) reg.discard(q);
    }
    r.check(worst_sup >= 1 - 1e-9, "d=" + std::to_string(d) + " random superpositions " + std::to_string(n) +
                                       ", min fidelity " + fmt(worst_sup, 12));
  }
  return r;
}

ExperimentReport fusion_experiment(const RunConfig& cfg) {
  ExperimentReport r{"fusion statistics"};
  const GroupPtr G = group_of(cfg);
  const std::int64_t n = trials_or(cfg, 100000);
  const QuditParams q = find_qudit_params(*G, cfg.d > 0 ? std::optional<int>(cfg.d) : std::optional<int>(2));
  const int b = q.b;
  const double p = 1.0 / class_size(*G, b);
  const std::int64_t hits = count_trials(sub(cfg, 1), n, [&](std::int64_t, std::uint64_t seed) {
    AnyonSystem sys(G, seed);
    const PairId x = sys.create_flux_ancilla(b);
    const PairId y = sys.create_flux_ancilla(G->inv(b));
    return sys.fuse(x.left, y.left).result == FusionResult::Vacuum;
  });
  r.check(within_sigma(hits, n, p), rate_line("|" + G->format(b) + "> against its inverse, vacuum rate", hits, n, p));
  const SectorModel model = SectorModel::uniform_magnetic(*G, cfg.charged_weight);
  const std::int64_t vac = count_trials(sub(cfg, 2), n, [&](std::int64_t, std::uint64_t seed) {
    AnyonSystem sys(G, seed);
    const PairId v = sys.create_vacuum_pair(model);
    return sys.fuse(v.left, v.right).result == FusionResult::Vacuum;
  });
  r.check(vac == n, "fresh vacuum pair fuses to the vacuum: " + frac(vac, n));
  return r;
}

ExperimentReport xsector_experiment(const RunConfig& cfg) {
  ExperimentReport r{"x sector"};
  const GroupPtr G = group_of(cfg);
  const int d = cfg.d > 0 ? cfg.d : 2;
  const std::int64_t n = trials_or(cfg, 10000);
  const QuditParams qp = find_qudit_params(*G, d);
  const double C = class_size(*G, qp.b);

  using Counts = std::array<std::int64_t, 2>;
  const auto parts = run_trials<Counts>(sub(cfg, 1), kShards, [&](std::int64_t s, std::uint64_t seed) {
    QuditRegister reg(G, seed, opts(d, false, cfg.charged_weight));
    const auto want = static_cast<std::size_t>(shard_size(n, static_cast<int>(s)));
    while (reg.attempts() < want) {
      try {
        reg.discard(reg.prepare_xzero(static_cast<int>(want - reg.attempts())));
      } catch (const ProtocolStalled&) {
      }
    }
    return Counts{static_cast<std::int64_t>(reg.xzero_successes()), static_cast<std::int64_t>(reg.attempts())};
  });
  std::int64_t succ = 0, att = 0;
  for (const auto& c : parts) {
    succ += c[0];
    att += c[1];
  }
  const double p_stated = d / C;
  const double p_model = d / (C * C);
  r.check(within_sigma(succ, att, p_stated), rate_line("x~0 certification per attempt, d/|C(b)|", succ, att, p_stated));
  r.note((within_sigma(succ, att, p_model) ? "     within 3 sigma of " : "     outside 3 sigma of ") +
         std::string("d/|C(b)|^2 = ") + fmt(p_model) + " (flux match times fusion to vacuum)");

  const std::int64_t m = 10 * n;
  const auto vac = run_trials<std::int64_t>(sub(cfg, 2), kShards, [&](std::int64_t s, std::uint64_t seed) {
    QuditRegister reg(G, seed, opts(d, true));
    reg.bootstrap_xone();
    std::int64_t v = 0;
    for (std::int64_t t = 0; t < shard_size(m, static_cast<int>(s)); ++t) {
      const int x = reg.take_xzero();
      reg.gate_Z(x);  // x~0 -> x~(d-1), which is x~1 for qubits
      const PairId p = reg.pair(x);
      reg.forget(x);
      v += reg.system().fuse(p.left, p.right).result == FusionResult::Vacuum;
      reg.discard_particles({p.left, p.right});
    }
    return v;
  });
  std::int64_t v = 0;
  for (auto x : vac) v += x;
  r.check(v == 0, "Z x~0 self-fusion vacuum events: " + frac(v, m));

  QuditRegister reg(G, sub(cfg, 3), opts(d, false, cfg.charged_weight));
  double worst = 1;
  for (int i = 0; i < 10; ++i) {
    const int qs[1] = {reg.prepare_xzero()};
    worst = std::min(worst, oracle::fidelity(extract_logical_state(reg, qs), single(d, oracle::x_eigenstate(d, 0))));
    reg.discard(qs[0]);
  }
  r.check(worst >= 1 - 1e-9, "certified x~0 oracle fidelity over 10 preparations, min " + fmt(worst, 12));
  return r;
}

ExperimentReport synthesis_experiment(const RunConfig& cfg) {
  ExperimentReport r{"synthesis"};
  const GroupPtr G = group_of(cfg);
  Synthesizer syn(G);
  const int order = G->order();
  auto run = [&](int arity, std::int64_t count, std::uint64_t tag) {
    std::int64_t checked = 0, bad = 0;
    for (std::int64_t i = 0; i < count; ++i) {
      Rng rng(sub(cfg, tag + static_cast<std::uint64_t>(i)));
      std::vector<int> table(arity == 1 ? order : order * order);
      for (auto& v : table) v = static_cast<int>(rng.below(order));
      const Program p = synthesize(syn, arity, table);
      const TableCheck c = verify_table(*G, p, table);
      checked += c.checked;
      bad += c.mismatches;
    }
    r.check(bad == 0, std::to_string(count) + " random tables of arity " + std::to_string(arity) + ": " +
                          frac(checked - bad, checked) + " inputs match");
  };
  run(1, trials_or(cfg, 10), 100);
  run(2, 3, 200);
  return r;
}

ExperimentReport group_theory_experiment(const RunConfig&) {
  ExperimentReport r{"group theory"};
  const GroupPtr S4 = symmetric_group(4);
  std::string sizes;
  std::vector<int> got;
  for (const Subgroup& H : derived_series(*S4)) {
    got.push_back(H.size());
    sizes += (sizes.empty() ? "" : ", ") + std::to_string(H.size());
  }
  r.check(got == std::vector<int>{24, 12, 4, 1}, "derived series of S4 has orders [" + sizes + "] (S4, A4, V4, 1)");
  for (const char* name : {"S5", "A5xA5", "SL25"}) {
    const CosetContext ctx = simple_perfect_quotient(resolve_group(name));
    const FiniteGroup& Q = *ctx.quotient;
    const bool ok = Q.order() == 60 && is_perfect(Q) && is_simple(Q);
    r.check(ok, std::string(name) + ": |P| = " + std::to_string(ctx.P.size()) + ", |N| = " +
                    std::to_string(ctx.N.size()) + ", |P/N| = " + std::to_string(Q.order()) +
                    (is_perfect(Q) ? ", perfect" : ", not perfect") + (is_simple(Q) ? ", simple" : ", not simple"));
  }
  return r;
}

ExperimentReport leakage_experiment(const RunConfig& cfg) {
  ExperimentReport r{"leakage"};
  const int d = cfg.d > 0 ? cfg.d : 2;
  const std::int64_t n = trials_or(cfg, 100);
  const GroupPtr G = a5();

  auto tally = [&](const std::string& what, std::int64_t viol, std::int64_t replaced) {
    r.check(viol == 0, what + ": " + frac(viol, n) + " outputs outside the computational subspace, " +
                           std::to_string(replaced) + " replaced at stage one");
  };
  {
    QuditRegister reg(G, sub(cfg, 1), opts(d));
    std::mt19937_64 eng(sub(cfg, 11));
    std::int64_t viol = 0, replaced = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const int q = reg.inject(random_state(d, 1, eng)).front();
      inject_net_flux(reg, q, 1 + static_cast<int>(eng() % (G->order() - 1)));
      replaced += leakage_correct(reg, q).verdict == LeakageVerdict::Replaced;
      viol += !in_subspace(reg, q);
      reg.discard(q);
    }
    tally("net flux g != 1", viol, replaced);
  }
  {
    QuditRegister reg(G, sub(cfg, 2), opts(d));
    std::vector<int> wrong;
    for (int g : G->class_elements_of(reg.params().b)) {
      if (reg.digit_of_flux(g) < 0) wrong.push_back(g);
    }
    std::mt19937_64 eng(sub(cfg, 12));
    std::normal_distribution<double> nd;
    std::int64_t viol = 0, replaced = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const int fl[2] = {reg.basis()[eng() % d], wrong[eng() % wrong.size()]};
      Amplitude am[2] = {{nd(eng), nd(eng)}, {nd(eng), nd(eng)}};
      const double norm = std::sqrt(std::norm(am[0]) + std::norm(am[1]));
      for (auto& a : am) a /= norm;
      const int q = leaked_qudit(reg, fl, am);
      replaced += leakage_correct(reg, q).verdict == LeakageVerdict::Replaced;
      viol += !in_subspace(reg, q);
      reg.discard(q);
    }
    tally("wrong flux in the class of b", viol, replaced);
  }
  {
    QuditRegister reg(G, sub(cfg, 3), opts(d));
    std::int64_t viol = 0, replaced = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const int q = charged_qudit(reg);
      replaced += leakage_correct(reg, q).verdict == LeakageVerdict::Replaced;
      viol += !in_subspace(reg, q);
      reg.discard(q);
    }
    tally("charged token", viol, replaced);
  }
  {
    const GroupPtr S5 = symmetric_group(5);
    const CosetContext ctx = simple_perfect_quotient(S5);
    std::vector<int> outside;
    for (int g = 0; g < S5->order(); ++g) {
      if (!ctx.in_P(g)) outside.push_back(g);
    }
    QuditRegister reg(ctx, sub(cfg, 4), opts(d));
    std::mt19937_64 eng(sub(cfg, 14));
    std::int64_t viol = 0, replaced = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const int fl[1] = {outside[eng() % outside.size()]};
      const Amplitude am[1] = {1.0};
      const int q = leaked_qudit(reg, fl, am);
      replaced += leakage_correct_general(reg, q).verdict == LeakageVerdict::Replaced;
      viol += !in_subspace(reg, q);
      reg.discard(q);
    }
    tally("flux outside P (S5, coset mode)", viol, replaced);
  }
  {
    QuditRegister reg(G, sub(cfg, 5), opts(d));
    std::mt19937_64 eng(sub(cfg, 15));
    std::int64_t clean = 0;
    double worst = 1;
    for (std::int64_t i = 0; i < n; ++i) {
      const auto s = random_state(d, 1, eng);
      const int qs[1] = {reg.inject(s).front()};
      clean += leakage_correct(reg, qs[0]).verdict == LeakageVerdict::Clean;
      worst = std::min(worst, oracle::fidelity(extract_logical_state(reg, qs), s));
      reg.discard(qs[0]);
    }
    r.check(clean == n && worst >= 1 - 1e-9,
            "clean inputs: " + frac(clean, n) + " reported clean, min fidelity " + fmt(worst, 12));
  }
  return r;
}

ExperimentReport probe_experiment(const RunConfig& cfg) {
  ExperimentReport r{"electric probes"};
  const GroupPtr G = a5();
  const auto rep = std::make_shared<const Representation>(Representation::standard(*G));
  const std::int64_t n = trials_or(cfg, 100000);
  std::uint64_t tag = 1;
  for (const char* cyc : {"()", "(1 2 3)", "(1 2)(3 4)"}) {
    const int g = G->index_of(parse_cycles(cyc, 5));
    // Character of the standard representation: fixed points minus one.
    int fixed = 0;
    for (int x = 0; x < 5; ++x) fixed += G->element(g)[x] == x;
    const double p = (fixed - 1) * (fixed - 1) / 16.0;
    const std::int64_t hits = count_trials(sub(cfg, tag++), n, [&](std::int64_t, std::uint64_t seed) {
      AnyonSystem sys(G, seed);
      const PairId a = sys.create_flux_ancilla(g);
      const int probe = sys.create_charge_probe(rep);
      const ParticleId ring[1] = {a.left};
      sys.encircle_with_probe(probe, ring);
      return sys.fuse_probe(probe);
    });
    r.check(within_sigma(hits, n, p), rate_line(std::string("probe around ") + cyc, hits, n, p));
  }
  const std::int64_t m = std::max<std::int64_t>(n / 5, 1);
  for (int reps : {1, 5, 10}) {
    const double bound = std::pow(9.0 / 16, reps);
    const std::int64_t wrong = count_trials(sub(cfg, 10 + reps), m, [&](std::int64_t, std::uint64_t seed) {
      Rng pick(splitmix64(seed));
      const int g1 = 1 + static_cast<int>(pick.below(G->order() - 1));
      int g2 = g1;
      while (g2 == g1) g2 = 1 + static_cast<int>(pick.below(G->order() - 1));
      AnyonSystem sys(G, seed);
      const PairId p1 = sys.create_flux_ancilla(g1);
      const PairId p2 = sys.create_flux_ancilla(g2);
      return compare_fluxes(sys, p1, p2, reps, rep);
    });
    const double slack = 3 * std::sqrt(static_cast<double>(m) * bound * (1 - bound));
    r.check(static_cast<double>(wrong) <= static_cast<double>(m) * bound + slack,
            "compare_fluxes, unequal fluxes, reps=" + std::to_string(reps) + ": judged equal " + frac(wrong, m) +
                " = " + fmt(static_cast<double>(wrong) / static_cast<double>(m)) + ", bound (9/16)^reps = " +
                fmt(bound));
  }
  return r;
}

ExperimentReport universality_experiment(const RunConfig& cfg) {
  ExperimentReport r{"universality reductions"};
  const GroupPtr G = a5();
  const std::int64_t n = trials_or(cfg, 1000);
  using Counts = std::array<std::int64_t, 2>;
  const auto xz = run_trials<Counts>(sub(cfg, 1), kShards, [&](std::int64_t s, std::uint64_t seed) {
    QuditRegister reg(G, seed, opts(3, true));
    reg.bootstrap_xone();
    const int k = reg.omega_power();
    Counts c{0, 0};
    // Register Z is the physical Z^k.
    for (const auto& e : oracle::xz_eigenpairs(3, 1, k % 3)) {
      int want = -1;
      for (int j = 0; j < 3; ++j) {
        if (std::abs(e.value - oracle::omega(3, k * j)) < 1e-9) want = j;
      }
      for (std::int64_t t = 0; t < shard_size(n, static_cast<int>(s)); ++t) {
        const int q = reg.inject(single(3, e.vector)).front();
        c[0] += reg.measure_XaZb(q, 1, 1) == want;
        ++c[1];
        reg.discard(q);
      }
    }
    return c;
  });
  Counts total{0, 0};
  for (const auto& c : xz) {
    total[0] += c[0];
    total[1] += c[1];
  }
  r.check(total[0] == total[1], "d=3 XZ eigenstates: " + frac(total[0], total[1]) + " runs return the eigenvalue index");

  const auto iy = run_trials<Counts>(sub(cfg, 2), kShards, [&](std::int64_t s, std::uint64_t seed) {
    QuditRegister reg(G, seed, opts(2, true));
    reg.bootstrap_xone();
    const int ref = reg.iy_reference();
    Counts c{0, 0};
    for (std::int64_t t = 0; t < shard_size(n, static_cast<int>(s)); ++t) {
      const int copy = reg.copy_iy(ref);
      c[0] += !reg.iy_consistent(ref, copy);
      ++c[1];
      reg.discard(copy);
    }
    return c;
  });
  Counts bad{0, 0};
  for (const auto& c : iy) {
    bad[0] += c[0];
    bad[1] += c[1];
  }
  r.check(bad[0] == 0, "d=2 iY reference copy and check: " + frac(bad[0], bad[1]) + " contradictory rounds");
  return r;
}

ExperimentReport coset_experiment(const RunConfig& cfg) {
  ExperimentReport r{"coset mode"};
  const CosetContext trivial = simple_perfect_quotient(a5());
  struct Protocol {
    const char* name;
    void (*run)(QuditRegister&);
  };
  const Protocol protocols[] = {
      {"toffoli",
       [](QuditRegister& reg) {
         const int d = reg.d();
         for (int l = 0; l < d; ++l)
           for (int m = 0; m < d; ++m) {
             const int q1 = reg.encode(l), q2 = reg.encode(m), q3 = reg.encode((l + m) % d);
             reg.toffoli(q1, q2, q3);
             reg.measure_Z(q3);  // the gate itself logs nothing
             for (int q : {q1, q2, q3}) reg.discard(q);
           }
       }},
      {"measure-z",
       [](QuditRegister& reg) {
         for (int n = 0; n < reg.d(); ++n) reg.measure_Z(reg.encode(n));
       }},
      {"xzero",
       [](QuditRegister& reg) {
         for (int i = 0; i < 3; ++i) reg.discard(reg.prepare_xzero());
       }},
  };
  for (int d : dims(cfg, {2, 3})) {
    for (const Protocol& p : protocols) {
      const std::uint64_t seed = sub(cfg, 10 * d);
      QuditRegister pure(a5(), seed, opts(d));
      QuditRegister coset(trivial, seed, opts(d));
      p.run(pure);
      p.run(coset);
      const auto& a = pure.system().transcript();
      const auto& b = coset.system().transcript();
      r.check(a == b, "N = {1}, d=" + std::to_string(d) + ", " + p.name + ": transcripts " +
                          (a == b ? "identical" : "differ") + " (" + std::to_string(a.size()) + " lines)");
    }
  }
  const CosetContext sl = simple_perfect_quotient(sl25_group());
  for (int d : dims(cfg, {2, 3})) {
    QuditRegister reg(sl, sub(cfg, 100 + d), opts(d));
    int agree = 0, total = 0;
    for (int l = 0; l < d; ++l)
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
          const int qs[3] = {reg.encode(l), reg.encode(m), reg.encode(n)};
          reg.toffoli(qs[0], qs[1], qs[2]);
          agree += logical_support(reg, qs) == std::vector<std::vector<int>>{{l, m, (l * m + n) % d}};
          ++total;
          for (int q : qs) reg.discard(q);
        }
    r.check(agree == total, "SL(2,5) mod its center, d=" + std::to_string(d) + ": Toffoli support matches on " +
                                frac(agree, total) + " basis tuples");
  }
  return r;
}

ExperimentReport bootstrap_experiment(const RunConfig& cfg) {
  ExperimentReport r{"bootstrap"};
  const GroupPtr G = group_of(cfg);
  for (int d : dims(cfg, {2, 3})) {
    QuditRegister reg(G, sub(cfg, d), opts(d, true, cfg.charged_weight));
    reg.bootstrap_xone();
    const int k = reg.omega_power();
    const int qs[1] = {reg.xone()};
    const double f = oracle::fidelity(extract_logical_state(reg, qs), single(d, oracle::x_eigenstate(d, k)));
    r.check(f >= 1 - 1e-9, "d=" + std::to_string(d) + ": x~1 is the physical x~" + std::to_string(k) +
                               ", fidelity " + fmt(f, 12) + ", x~0 attempts " + std::to_string(reg.attempts()));
    if (d == 2) {
      const int ref[1] = {reg.iy_reference()};
      const auto s = extract_logical_state(reg, ref);
      const double h = 1 / std::sqrt(2.0);
      const double fy = std::max(oracle::fidelity(s, single(2, {h, {0, h}})), oracle::fidelity(s, single(2, {h, {0, -h}})));
      r.check(fy >= 1 - 1e-9, "d=2: iY reference is an eigenstate of ZX, fidelity " + fmt(fy, 12));
    }
  }
  return r;
}

ExperimentReport measure_x_experiment(const RunConfig& cfg) {
  ExperimentReport r{"measure X"};
  const GroupPtr G = group_of(cfg);
  const std::int64_t n = trials_or(cfg, 2000);
  for (int d : dims(cfg, {2})) {
    QuditRegister reg(G, sub(cfg, d), opts(d, true));
    reg.bootstrap_xone();
    const int k = reg.omega_power();
    int right = 0, total = 0;
    for (int i = 0; i < d; ++i) {
      const int q = reg.inject(single(d, oracle::x_eigenstate(d, k * i % d))).front();
      for (int t = 0; t < 20; ++t, ++total) right += reg.measure_X(q).digit == i;
      reg.discard(q);
    }
    r.check(right == total, "d=" + std::to_string(d) + ": X eigenstates read back " + frac(right, total));
    std::vector<std::int64_t> counts(d, 0);
    std::int64_t inconclusive = 0;
    for (std::int64_t t = 0; t < n; ++t) {
      const int q = reg.encode(0);
      try {
        ++counts[reg.measure_X(q).digit];
      } catch (const Inconclusive&) {
        ++inconclusive;
      }
      reg.discard(q);
    }
    const std::int64_t m = n - inconclusive;
    for (int i = 0; i < d; ++i) {
      r.check(within_sigma(counts[i], m, 1.0 / d), rate_line("d=" + std::to_string(d) + ": X outcome " +
                                                                 std::to_string(i) + " on |0>", counts[i], m, 1.0 / d));
    }
    r.note("     inconclusive runs: " + frac(inconclusive, n));
  }
  return r;
}

ExperimentReport distill_experiment(const RunConfig& cfg) {
  ExperimentReport r{"distill"};
  const GroupPtr G = group_of(cfg);
  AnyonSystem sys(G, sub(cfg, 1));
  DistillOptions o;
  o.budget = cfg.budget > 0 ? cfg.budget : 900;
  o.reps = 6;
  o.sectors = SectorModel::uniform_magnetic(*G, cfg.charged_weight);
  const DistillResult res = distill_flux_bins(sys, o);
  int labeled = 0;
  for (const FluxBin& b : res.bins) labeled += b.label >= 0;
  r.note("budget " + std::to_string(o.budget) + ": " + std::to_string(res.bins.size()) + " bins, " +
         std::to_string(labeled) + " labeled, " + std::to_string(res.trivial_discarded) + " trivial pairs discarded");
  if (res.partial) {
    r.note("warning: partial bins, " + std::to_string(G->order() - 1 - static_cast<int>(res.bins.size())) +
           " non-identity elements have no bin; raise --budget");
  } else {
    r.check(res.labeled, "every non-identity element has a labeled bin");
  }
  return r;
}

const std::vector<NamedExperiment>& demos() {
  static const std::vector<NamedExperiment> v{
      {"toffoli", toffoli_experiment},     {"measure-z", fusion_experiment}, {"xzero", xsector_experiment},
      {"bootstrap", bootstrap_experiment}, {"measure-x", measure_x_experiment}, {"leakage", leakage_experiment},
      {"coset", coset_experiment},         {"distill", distill_experiment},
  };
  return v;
}

const std::vector<NamedExperiment>& criteria() {
  static const std::vector<NamedExperiment> v{
      {"toffoli correctness", toffoli_experiment},
      {"fusion statistics", fusion_experiment},
      {"x-sector statistics", xsector_experiment},
      {"synthesis completeness", synthesis_experiment},
      {"group theory", group_theory_experiment},
      {"leakage", leakage_experiment},
      {"electric probes", probe_experiment},
      {"universality reductions", universality_experiment},
      {"coset degeneration", coset_experiment},
  };
  return v;
}

}  // namespace fluxsim

namespace fluxsim {

bool run_acceptance(const RunConfig& cfg, std::span<const int> only, std::ostream& out) {
  // Seconds; criteria without an entry are unbounded.
  const std::map<int, double> limits{{1, 60}, {2, 60}, {4, 600}, {5, 60}};
  const auto& all = criteria();
  std::vector<std::string> summary;
  bool ok = true;
  for (int i = 1; i <= static_cast<int>(all.size()); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), i) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport report = all[i - 1].run(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char t[96];
    if (const auto it = limits.find(i); it != limits.end()) {
      std::snprintf(t, sizeof t, "runtime %.1f s, limit %.0f s", secs, it->second);
      report.check(secs < it->second, t);
    } else {
      std::snprintf(t, sizeof t, "runtime %.1f s", secs);
      report.note(t);
    }
    out << report.text() << std::endl;
    summary.push_back("criterion " + std::to_string(i) + ": " + (report.pass ? "PASS" : "FAIL") + " (" +
                      all[i - 1].name + ")");
    ok = ok && report.pass;
  }
  for (const auto& s : summary) out << s << '\n';
  out.flush();
  return ok;
}

}  // namespace fluxsim
