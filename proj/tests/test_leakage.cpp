#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fluxsim/errors.hpp"
#include "fluxsim/leakage.hpp"

using namespace fluxsim;
using Catch::Approx;

namespace {

GroupPtr a5() {
  static const GroupPtr G = alternating_group(5);
  return G;
}

RegisterOptions with_d(int d) {
  RegisterOptions o;
  o.prefer_d = d;
  return o;
}

oracle::DenseState random_state(int d, std::mt19937_64& eng) {
  std::normal_distribution<double> n;
  oracle::DenseState s(d, 1);
  double norm = 0;
  for (auto& a : s.amplitudes()) {
    a = {n(eng), n(eng)};
    norm += std::norm(a);
  }
  for (auto& a : s.amplitudes()) a /= std::sqrt(norm);
  return s;
}

bool in_subspace(const QuditRegister& reg, int q) {
  const int qs[1] = {q};
  return computational_weight(reg, qs) >= 1 - 1e-9;
}

int element(const FiniteGroup& G, const char* cycles) { return G.index_of(parse_cycles(cycles, G.degree())); }

// Fluxes of the class of b that are not basis fluxes.
std::vector<int> off_basis_in_class(const QuditRegister& reg) {
  const FiniteGroup& G = reg.system().group();
  std::vector<int> out;
  for (int g : G.class_elements_of(reg.params().b)) {
    if (reg.digit_of_flux(g) < 0) out.push_back(g);
  }
  return out;
}

int central_element(const FiniteGroup& G) {
  for (int g = 1; g < G.order(); ++g) {
    bool all = true;
    for (int h = 0; h < G.order() && all; ++h) all = G.commute(g, h);
    if (all) return g;
  }
  return -1;
}

}  // namespace

TEST_CASE("default probes and baselines") {
  QuditRegister reg(a5(), 1, with_d(2));
  const FiniteGroup& G = *a5();
  const auto probes = default_probe_elements(G);
  REQUIRE(probes.size() == 4);
  for (int x : probes) {
    REQUIRE(probe_baseline(reg, x) == Approx(1.0 / G.class_elements_of(x).size()));
  }
  // Centralizers of the probes meet in the identity.
  for (int g = 1; g < G.order(); ++g) {
    bool all = true;
    for (int x : probes) all = all && G.commute(g, x);
    REQUIRE_FALSE(all);
  }
}

TEST_CASE("net flux detection") {
  const FiniteGroup& G = *a5();
  const auto probes = default_probe_elements(G);
  SECTION("trivial net flux passes every probe") {
    QuditRegister reg(a5(), 2, with_d(2));
    const int q = reg.encode(1);
    std::vector<ProbeTally> t;
    REQUIRE_FALSE(detect_nontrivial_effect(reg, reg.pair(q), probes, 500, 5.0, &t));
    REQUIRE(t.size() == probes.size());
    for (const auto& p : t) REQUIRE(p.vacua > 0);
  }
  SECTION("net flux (345) is flagged") {
    QuditRegister reg(a5(), 3, with_d(2));
    const int q = reg.encode(0);
    inject_net_flux(reg, q, element(G, "(3 4 5)"));
    REQUIRE(detect_nontrivial_effect(reg, reg.pair(q), probes, 500));
  }
  SECTION("flux central in a subgroup is still caught") {
    // (12)(34) is central in the Klein four-group but not in A5.
    QuditRegister reg(a5(), 4, with_d(2));
    const int q = reg.encode(1);
    inject_net_flux(reg, q, element(G, "(1 2)(3 4)"));
    REQUIRE(detect_nontrivial_effect(reg, reg.pair(q), probes, 500));
  }
  SECTION("too few repetitions") {
    QuditRegister reg(a5(), 5, with_d(2));
    const int q = reg.encode(1);
    REQUIRE_THROWS_AS(detect_nontrivial_effect(reg, reg.pair(q), probes, 100), Indeterminate);
    const int id[1] = {0};
    REQUIRE_THROWS_AS(detect_nontrivial_effect(reg, reg.pair(q), id, 500), StructuralError);
  }
}

TEST_CASE("clean computational input is left alone") {
  QuditRegister reg(a5(), 6, with_d(2));
  const int q = reg.encode(1);
  const auto rep = leakage_correct(reg, q);
  REQUIRE(rep.verdict == LeakageVerdict::Clean);
  REQUIRE(rep.stage == LeakageStage::ChargeFilter);
  const int qs[1] = {q};
  REQUIRE(logical_support(reg, qs) == std::vector<std::vector<int>>{{1}});
  REQUIRE(reg.system().columns() == 2);
}

TEST_CASE("random clean superpositions keep fidelity") {
  for (int d : {2, 3}) {
    QuditRegister reg(a5(), 7 + d, with_d(d));
    std::mt19937_64 eng(70 + d);
    for (int i = 0; i < 100; ++i) {
      const auto s = random_state(d, eng);
      const int q = reg.inject(s).front();
      const auto rep = leakage_correct(reg, q);
      REQUIRE(rep.verdict == LeakageVerdict::Clean);
      const int qs[1] = {q};
      REQUIRE(oracle::fidelity(extract_logical_state(reg, qs), s) >= 1 - 1e-9);
      reg.discard(q);
    }
  }
}

TEST_CASE("injected net flux is replaced") {
  const FiniteGroup& G = *a5();
  QuditRegister reg(a5(), 11, with_d(2));
  std::mt19937_64 eng(110);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const int q = reg.inject(random_state(2, eng)).front();
    inject_net_flux(reg, q, 1 + static_cast<int>(eng() % (G.order() - 1)));
    const auto rep = leakage_correct(reg, q);
    REQUIRE(rep.verdict == LeakageVerdict::Replaced);
    REQUIRE(rep.stage == LeakageStage::NetFlux);
    if (!in_subspace(reg, q)) ++violations;
    reg.discard(q);
  }
  REQUIRE(violations == 0);
}

TEST_CASE("wrong flux in the class is projected") {
  for (int d : {2, 3}) {
    QuditRegister reg(a5(), 12 + d, with_d(d));
    const auto wrong = off_basis_in_class(reg);
    REQUIRE(wrong.size() == 20 - static_cast<std::size_t>(d));
    std::mt19937_64 eng(120 + d);
    std::normal_distribution<double> n;
    int violations = 0;
    for (int i = 0; i < 100; ++i) {
      // Some weight on a basis flux, the rest on a wrong one.
      const int fl[2] = {reg.basis()[eng() % d], wrong[eng() % wrong.size()]};
      Amplitude am[2] = {{n(eng), n(eng)}, {n(eng), n(eng)}};
      const double norm = std::sqrt(std::norm(am[0]) + std::norm(am[1]));
      am[0] /= norm;
      am[1] /= norm;
      const int q = leaked_qudit(reg, fl, am);
      leakage_correct(reg, q);
      if (!in_subspace(reg, q)) ++violations;
      reg.discard(q);
    }
    REQUIRE(violations == 0);
  }
}

TEST_CASE("a fully leaked flux yields |0>") {
  QuditRegister reg(a5(), 15, with_d(2));
  const FiniteGroup& G = *a5();
  const int fl[1] = {element(G, "(1 2 3 4 5)")};
  const Amplitude am[1] = {1.0};
  const int q = leaked_qudit(reg, fl, am);
  leakage_correct(reg, q);
  const int qs[1] = {q};
  REQUIRE(logical_support(reg, qs) == std::vector<std::vector<int>>{{0}});
}

TEST_CASE("charged tokens are filtered by the swap") {
  QuditRegister reg(a5(), 16, with_d(3));
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const int q = charged_qudit(reg);
    const auto rep = leakage_correct(reg, q);
    REQUIRE(rep.verdict == LeakageVerdict::Clean);
    if (!in_subspace(reg, q)) ++violations;
    reg.discard(q);
  }
  REQUIRE(violations == 0);
}

TEST_CASE("routing a damaged pair off the line leaves neighbours alone") {
  const FiniteGroup& G = *a5();
  std::mt19937_64 eng(170);
  for (int i = 0; i < 20; ++i) {
    QuditRegister reg(a5(), 170 + i, with_d(2));
    const auto s1 = random_state(2, eng);
    const auto s2 = random_state(2, eng);
    const int q1 = reg.inject(s1).front();
    const int bad = reg.encode(1);
    const int q2 = reg.inject(s2).front();
    inject_net_flux(reg, bad, 1 + static_cast<int>(eng() % (G.order() - 1)));
    REQUIRE(leakage_correct(reg, bad).verdict == LeakageVerdict::Replaced);
    const int a[1] = {q1};
    const int b[1] = {q2};
    REQUIRE(oracle::fidelity(extract_logical_state(reg, a), s1) >= 1 - 1e-9);
    REQUIRE(oracle::fidelity(extract_logical_state(reg, b), s2) >= 1 - 1e-9);
    REQUIRE(in_subspace(reg, bad));
  }
}

TEST_CASE("coset mode: flux outside P") {
  const GroupPtr S5 = symmetric_group(5);
  const CosetContext ctx = simple_perfect_quotient(S5);
  REQUIRE(ctx.P.size() == 60);
  std::vector<int> odd;
  for (int g = 0; g < S5->order(); ++g) {
    if (!ctx.in_P(g)) odd.push_back(g);
  }
  QuditRegister reg(ctx, 18, with_d(2));
  std::mt19937_64 eng(180);
  std::normal_distribution<double> n;
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const int fl[2] = {odd[eng() % odd.size()], odd[eng() % odd.size()]};
    Amplitude am[2] = {{n(eng), n(eng)}, {n(eng), n(eng)}};
    const int k = fl[0] == fl[1] ? 1 : 2;
    double norm = 0;
    for (int j = 0; j < k; ++j) norm += std::norm(am[j]);
    for (auto& a : am) a /= std::sqrt(norm);
    const int q = leaked_qudit(reg, std::span<const int>(fl, k), std::span<const Amplitude>(am, k));
    leakage_correct_general(reg, q);
    if (!in_subspace(reg, q)) ++violations;
    reg.discard(q);
  }
  REQUIRE(violations == 0);
}

TEST_CASE("coset mode: clean inputs") {
  for (const GroupPtr& G : {symmetric_group(5), sl25_group()}) {
    const CosetContext ctx = simple_perfect_quotient(G);
    QuditRegister reg(ctx, 19, with_d(2));
    for (int digit = 0; digit < 2; ++digit) {
      const int q = reg.encode(digit);
      const auto rep = leakage_correct_general(reg, q);
      REQUIRE(rep.verdict == LeakageVerdict::Clean);
      REQUIRE(rep.stage == LeakageStage::CosetFilter);
      const int qs[1] = {q};
      REQUIRE(logical_support(reg, qs) == std::vector<std::vector<int>>{{digit}});
      REQUIRE(in_subspace(reg, q));
      reg.discard(q);
    }
  }
}

TEST_CASE("coset mode: clean superpositions keep fidelity") {
  const CosetContext ctx = simple_perfect_quotient(symmetric_group(5));
  QuditRegister reg(ctx, 20, with_d(2));
  std::mt19937_64 eng(200);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_state(2, eng);
    const int q = reg.inject(s).front();
    REQUIRE(leakage_correct_general(reg, q).verdict == LeakageVerdict::Clean);
    const int qs[1] = {q};
    REQUIRE(oracle::fidelity(extract_logical_state(reg, qs), s) >= 1 - 1e-9);
    reg.discard(q);
  }
}

TEST_CASE("coset mode: net flux in N passes stage one and is filtered") {
  const GroupPtr G = sl25_group();
  const CosetContext ctx = simple_perfect_quotient(G);
  const int z = central_element(*G);
  REQUIRE(z >= 0);
  REQUIRE(ctx.N.contains(z));
  QuditRegister reg(ctx, 21, with_d(2));
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const int q = reg.encode(i % 2);
    inject_net_flux(reg, q, z);
    const auto rep = leakage_correct_general(reg, q);
    REQUIRE(rep.verdict == LeakageVerdict::Clean);
    if (!in_subspace(reg, q)) ++violations;
    reg.discard(q);
  }
  REQUIRE(violations == 0);
}

TEST_CASE("coset mode: net flux outside N is replaced") {
  const GroupPtr G = sl25_group();
  const CosetContext ctx = simple_perfect_quotient(G);
  QuditRegister reg(ctx, 22, with_d(2));
  std::mt19937_64 eng(220);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const int q = reg.encode(i % 2);
    int h = 0;
    while (ctx.N.contains(h)) h = static_cast<int>(eng() % G->order());
    inject_net_flux(reg, q, h);
    REQUIRE(leakage_correct_general(reg, q).verdict == LeakageVerdict::Replaced);
    if (!in_subspace(reg, q)) ++violations;
    reg.discard(q);
  }
  REQUIRE(violations == 0);
}

TEST_CASE("rho x~0 preparation") {
  SECTION("trivial N matches the pure protocol") {
    QuditRegister pure(a5(), 23, with_d(2));
    QuditRegister coset(simple_perfect_quotient(a5()), 23, with_d(2));
    pure.discard(pure.prepare_xzero());
    coset.discard(prepare_rho_xzero(coset));
    REQUIRE(pure.system().transcript() == coset.system().transcript());
    REQUIRE_THROWS_AS(prepare_rho_xzero(pure), StructuralError);
  }
  SECTION("charged vacuum pairs never certify") {
    RegisterOptions o = with_d(2);
    o.charged_weight = 1.0;
    QuditRegister reg(simple_perfect_quotient(symmetric_group(5)), 24, o);
    REQUIRE_THROWS_AS(prepare_rho_xzero(reg, 200), ProtocolStalled);
  }
  SECTION("vacuum pairs outside P never certify") {
    const GroupPtr S5 = symmetric_group(5);
    RegisterOptions o = with_d(2);
    o.xzero_vacuum = SectorModel::concentrated(*S5, S5->index_of(parse_cycles("(1 2)", 5)));
    QuditRegister reg(simple_perfect_quotient(S5), 25, o);
    REQUIRE_THROWS_AS(prepare_rho_xzero(reg, 200), ProtocolStalled);
  }
}

TEST_CASE("report lines") {
  QuditRegister reg(a5(), 26, with_d(2));
  const int q = reg.encode(0);
  inject_net_flux(reg, q, element(*a5(), "(3 4 5)"));
  const auto rep = leakage_correct(reg, q);
  const std::string text = format_report(rep, reg.quotient());
  REQUIRE(text.rfind("leakage qudit=0 stage=net-flux verdict=replaced\n", 0) == 0);
  REQUIRE(text.find("probe reps=") != std::string::npos);
  REQUIRE(text.find("vacua=0") != std::string::npos);
}

TEST_CASE("coset probe baseline matches fusion statistics") {
  const CosetContext ctx = simple_perfect_quotient(sl25_group());
  QuditRegister reg(ctx, 27, with_d(2));
  const FiniteGroup& Q = reg.quotient();
  for (int x : default_probe_elements(Q)) {
    const double p0 = probe_baseline(reg, x);
    const int n = 4000;
    int vac = 0;
    for (int i = 0; i < n; ++i) {
      const PairId A = reg.make_ancilla(x);
      const PairId B = reg.make_ancilla(Q.inv(x));
      if (reg.system().fuse(A.left, B.left).result == FusionResult::Vacuum) ++vac;
      reg.discard_particles({A.left, A.right, B.left, B.right});
    }
    REQUIRE(std::abs(vac - n * p0) <= 3 * std::sqrt(n * p0 * (1 - p0)));
  }
}
