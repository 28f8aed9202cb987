#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fluxsim/errors.hpp"
#include "fluxsim/gate.hpp"

using namespace fluxsim;
using Catch::Approx;

namespace {

GroupPtr a5() {
  static const GroupPtr G = alternating_group(5);
  return G;
}

RegisterOptions with_d(int d, bool fast = false) {
  RegisterOptions o;
  o.prefer_d = d;
  o.xzero_fast_forward = fast;
  return o;
}

oracle::DenseState state_of(const QuditRegister& reg, std::vector<int> qs) {
  return extract_logical_state(reg, qs);
}

oracle::DenseState vec(int d, std::vector<oracle::Amplitude> v) {
  const int k = static_cast<int>(std::lround(std::log(static_cast<double>(v.size())) / std::log(d)));
  return oracle::DenseState::from_amplitudes(d, k, std::move(v));
}

double basis_overlap(const oracle::DenseState& s, std::vector<int> digits) {
  return std::norm(s[s.index_of(digits)]);
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

}  // namespace

TEST_CASE("computational basis encoding") {
  QuditRegister reg(a5(), 1, with_d(2));
  const FiniteGroup& G = *a5();
  REQUIRE(G.format(reg.params().a) == "(1 2)(3 4)");
  const int q0 = reg.encode(0);
  const int q1 = reg.encode(1);
  auto fluxes = [&](int q) {
    const auto dist = reg.system().flux_distribution(reg.pair(q).left);
    for (int g = 0; g < G.order(); ++g) {
      if (dist[g] > 0.5) return g;
    }
    return -1;
  };
  REQUIRE(G.format(fluxes(q0)) == "(3 4 5)");
  REQUIRE(fluxes(q1) == G.index_of(parse_cycles("(4 3 5)", 5)));
  REQUIRE_THROWS_AS(reg.encode(2), DigitOutOfRange);
  REQUIRE_THROWS_AS(reg.encode(-1), DigitOutOfRange);
  REQUIRE(basis_overlap(state_of(reg, {q0}), {0}) == Approx(1.0));
  REQUIRE(basis_overlap(state_of(reg, {q1}), {1}) == Approx(1.0));
}

TEST_CASE("conjugation by degenerate programs") {
  QuditRegister reg(a5(), 2, with_d(2));
  const int c = reg.encode(1);
  const int t = reg.encode(0);
  const int cs[1] = {c};
  Program id(1);
  reg.conjugate_by_function(id, cs, t);
  REQUIRE(basis_overlap(state_of(reg, {c, t}), {1, 0}) == Approx(1.0));

  // Input(0) alone conjugates by the control flux: b -> (a b a^-1) b (a b a^-1)^-1.
  Program in(1);
  in.set_root(in.input(0));
  reg.conjugate_by_function(in, cs, t);
  const FiniteGroup& G = *a5();
  const int b = reg.params().b;
  const int ab = reg.basis()[1];
  const int expect = G.conj(ab, b);
  REQUIRE(reg.system().flux_distribution(reg.pair(t).left)[expect] == Approx(1.0));
  REQUIRE_THROWS_AS(reg.conjugate_by_function(in, cs, c), StructuralError);
}

TEST_CASE("Toffoli on the computational basis") {
  for (int d : {2, 3}) {
    QuditRegister reg(a5(), 3, with_d(d));
    for (int l = 0; l < d; ++l)
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
          const int q1 = reg.encode(l), q2 = reg.encode(m), q3 = reg.encode(n);
          reg.toffoli(q1, q2, q3);
          REQUIRE(basis_overlap(state_of(reg, {q1, q2, q3}), {l, m, (l * m + n) % d}) == Approx(1.0).margin(1e-9));
          // Controls stay exactly in their input states.
          REQUIRE(basis_overlap(state_of(reg, {q1}), {l}) == Approx(1.0).margin(1e-9));
          REQUIRE(basis_overlap(state_of(reg, {q2}), {m}) == Approx(1.0).margin(1e-9));
          reg.discard(q1);
          reg.discard(q2);
          reg.discard(q3);
        }
  }
  QuditRegister reg(a5(), 4, with_d(3));
  const int q1 = reg.encode(2), q2 = reg.encode(2), q3 = reg.encode(1);
  reg.toffoli(q1, q2, q3);
  REQUIRE(basis_overlap(state_of(reg, {q1, q2, q3}), {2, 2, 2}) == Approx(1.0));
  REQUIRE_THROWS_AS(reg.toffoli(q1, q1, q3), StructuralError);
}

TEST_CASE("Toffoli on superpositions matches the oracle") {
  std::mt19937_64 eng(7);
  for (int d : {2, 3}) {
    QuditRegister reg(a5(), 5, with_d(d));
    for (int trial = 0; trial < 20; ++trial) {
      auto in = random_state(d, 3, eng);
      const auto qs = reg.inject(in);
      REQUIRE(oracle::fidelity(state_of(reg, qs), in) == Approx(1.0).margin(1e-12));
      reg.toffoli(qs[0], qs[1], qs[2]);
      in.apply_toffoli(0, 1, 2);
      REQUIRE(oracle::fidelity(state_of(reg, qs), in) >= 1 - 1e-9);
      for (int q : qs) reg.discard(q);
    }
  }
}

TEST_CASE("sum and X gates") {
  QuditRegister reg(a5(), 6, with_d(3));
  const int c = reg.encode(1), t = reg.encode(1);
  reg.controlled_sum(c, t);
  REQUIRE(basis_overlap(state_of(reg, {c, t}), {1, 2}) == Approx(1.0));
  reg.controlled_sum(c, t, -1);
  REQUIRE(basis_overlap(state_of(reg, {c, t}), {1, 1}) == Approx(1.0));
  const int x = reg.encode(2);
  reg.gate_X(x);
  REQUIRE(basis_overlap(state_of(reg, {x}), {0}) == Approx(1.0));
  reg.gate_X(x, 2);
  REQUIRE(basis_overlap(state_of(reg, {x}), {2}) == Approx(1.0));

  QuditRegister q2(a5(), 6, with_d(2));
  const int y = q2.encode(1);
  q2.gate_X(y);
  REQUIRE(basis_overlap(state_of(q2, {y}), {0}) == Approx(1.0));
  REQUIRE_THROWS_AS(q2.gate_Z(y), BootstrapRequired);
}

TEST_CASE("measure Z") {
  QuditRegister reg(a5(), 8, with_d(2));
  const int one = reg.encode(1);
  const auto out = reg.measure_Z(one, 200);
  REQUIRE(out.digit == 1);
  REQUIRE(out.confidence == 1.0);
  // Non-destructive: the qudit is still |1>.
  REQUIRE(basis_overlap(state_of(reg, {one}), {1}) == Approx(1.0));
  for (int r = 0; r < 20; ++r) REQUIRE(reg.measure_Z(one).digit == 1);
  const int zero = reg.encode(0);
  for (int r = 0; r < 20; ++r) REQUIRE(reg.measure_Z(zero).digit == 0);

  // Every copy tests two candidates; both ends must be able to fire.
  QuditRegister r3(a5(), 9, with_d(3));
  for (int n = 0; n < 3; ++n) {
    const int q = r3.encode(n);
    for (int r = 0; r < 30; ++r) REQUIRE(r3.measure_Z(q).digit == n);
  }
  REQUIRE_THROWS_AS(reg.measure_Z(reg.encode(0), 1), Inconclusive);
}

TEST_CASE("measure Z follows the Born rule") {
  const int runs = 1000;
  int ones = 0;
  const double r = 1 / std::sqrt(2.0);
  for (int i = 0; i < runs; ++i) {
    QuditRegister reg(a5(), 100 + i, with_d(2));
    const auto qs = reg.inject(vec(2, {r, r}));
    const int digit = reg.measure_Z(qs[0]).digit;
    ones += digit;
    // Repeatable.
    REQUIRE(reg.measure_Z(qs[0]).digit == digit);
  }
  const double sigma = std::sqrt(runs * 0.25);
  REQUIRE(std::abs(ones - runs / 2.0) < 3 * sigma);
}

TEST_CASE("x~0 preparation") {
  for (int d : {2, 3}) {
    QuditRegister reg(a5(), 11, with_d(d));
    const int x = reg.prepare_xzero();
    const auto s = state_of(reg, {x});
    REQUIRE(oracle::fidelity(s, vec(d, oracle::x_eigenstate(d, 0))) >= 1 - 1e-9);
    REQUIRE(reg.xzero_successes() == 1);
  }
}

TEST_CASE("x~0 certification rate") {
  // Flux match (d / |C|) times the fusion vacuum rate of independent flux
  // eigenstates (1 / |C|).
  QuditRegister reg(a5(), 12, with_d(2));
  while (reg.attempts() < 20000) reg.discard(reg.prepare_xzero());
  const double p = 2.0 / 20 / 20;
  const double n = static_cast<double>(reg.attempts());
  const double rate = reg.xzero_successes() / n;
  REQUIRE(std::abs(rate - p) < 3 * std::sqrt(p * (1 - p) / n) + 1.0 / n);
}

TEST_CASE("fast-forwarded x~0 matches the protocol") {
  QuditRegister reg(a5(), 13, with_d(3, true));
  for (int i = 0; i < 300; ++i) {
    const int x = reg.take_xzero();
    REQUIRE(oracle::fidelity(state_of(reg, {x}), vec(3, oracle::x_eigenstate(3, 0))) >= 1 - 1e-9);
    reg.discard(x);
  }
  const double p = 3.0 / 20 / 20;
  const double n = static_cast<double>(reg.attempts());
  REQUIRE(std::abs(300 / n - p) < 4 * std::sqrt(p * (1 - p) / n) * 1.0 + 0.0005);
}

TEST_CASE("charged vacuum pairs never certify") {
  RegisterOptions o = with_d(2);
  o.charged_weight = 1.0;
  o.xzero_retry_cap = 50;
  QuditRegister reg(a5(), 14, o);
  REQUIRE_THROWS_AS(reg.prepare_xzero(), ProtocolStalled);
  REQUIRE(reg.attempts() == 50);
}

TEST_CASE("bootstrap and Z") {
  for (int d : {2, 3}) {
    QuditRegister reg(a5(), 15, with_d(d, true));
    reg.bootstrap_xone();
    REQUIRE(reg.bootstrapped());
    const int k = reg.omega_power();
    REQUIRE(k >= 1);
    REQUIRE(k < d);
    REQUIRE(oracle::fidelity(state_of(reg, {reg.xone()}), vec(d, oracle::x_eigenstate(d, k))) >= 1 - 1e-9);

    // Z x~i = x~(i-1) in register labels.
    for (int i = 0; i < d; ++i) {
      const auto qs = reg.inject(vec(d, oracle::x_eigenstate(d, k * i % d)));
      reg.gate_Z(qs[0]);
      const auto want = vec(d, oracle::x_eigenstate(d, k * (i + d - 1) % d));
      REQUIRE(oracle::fidelity(state_of(reg, qs), want) >= 1 - 1e-9);
      reg.discard(qs[0]);
    }
    // Z and X act as the oracle's X and Z^k on superpositions, in both orders.
    std::mt19937_64 eng(d);
    for (int trial = 0; trial < 5; ++trial) {
      const auto in = random_state(d, 1, eng);
      const auto qa = reg.inject(in);
      reg.gate_X(qa[0]);
      reg.gate_Z(qa[0]);
      auto zx = in;
      zx.apply_X(0);
      zx.apply_Z(0, 1, k);
      REQUIRE(oracle::fidelity(state_of(reg, qa), zx) >= 1 - 1e-9);
      const auto qb = reg.inject(in);
      reg.gate_Z(qb[0]);
      reg.gate_X(qb[0]);
      auto xz = in;
      xz.apply_Z(0, 1, k);
      xz.apply_X(0);
      REQUIRE(oracle::fidelity(state_of(reg, qb), xz) >= 1 - 1e-9);
      // ZX = XZ omega as operators.
      for (std::size_t j = 0; j < zx.size(); ++j) REQUIRE(std::abs(zx[j] - oracle::omega(d, k) * xz[j]) < 1e-12);
      reg.discard(qa[0]);
      reg.discard(qb[0]);
    }
  }
}

TEST_CASE("copying X eigenstates") {
  QuditRegister reg(a5(), 16, with_d(3, true));
  reg.bootstrap_xone();
  const int k = reg.omega_power();
  const auto src = reg.inject(vec(3, oracle::x_eigenstate(3, k)));
  const int c = reg.take_xzero();
  reg.controlled_sum(c, src[0], -1);
  const auto want = vec(3, oracle::x_eigenstate(3, k));
  REQUIRE(oracle::fidelity(state_of(reg, {c}), want) >= 1 - 1e-9);
  REQUIRE(oracle::fidelity(state_of(reg, {src[0]}), want) >= 1 - 1e-9);
}

TEST_CASE("measure X") {
  QuditRegister reg(a5(), 17, with_d(2, true));
  reg.bootstrap_xone();
  const int x0 = reg.take_xzero();
  for (int r = 0; r < 10; ++r) REQUIRE(reg.measure_X(x0).digit == 0);
  const auto x1 = reg.inject(vec(2, oracle::x_eigenstate(2, 1)));
  for (int r = 0; r < 10; ++r) REQUIRE(reg.measure_X(x1[0]).digit == 1);

  // x~1 never fuses to the vacuum.
  for (int r = 0; r < 2000; ++r) {
    const auto q = reg.inject(vec(2, oracle::x_eigenstate(2, 1)));
    const PairId p = reg.pair(q[0]);
    reg.forget(q[0]);
    REQUIRE(reg.system().fuse(p.left, p.right).result == FusionResult::Residual);
    reg.discard_particles({p.left});
  }
}

TEST_CASE("measure X on a Z eigenstate is uniform") {
  const int runs = 10000;
  int counts[2] = {0, 0};
  int inconclusive = 0;
  QuditRegister reg(a5(), 500, with_d(2, true));
  reg.bootstrap_xone();
  for (int i = 0; i < runs; ++i) {
    const int q = reg.encode(0);
    try {
      ++counts[reg.measure_X(q).digit];
    } catch (const Inconclusive&) {
      ++inconclusive;  // about 1e-4 per run with the default copy count
    }
    reg.discard(q);
  }
  REQUIRE(inconclusive < 10);
  const int n = runs - inconclusive;
  const double sigma = std::sqrt(n * 0.25);
  for (int c : counts) REQUIRE(std::abs(c - n / 2.0) < 3 * sigma);
}

TEST_CASE("measure X^a Z^b for qutrits") {
  QuditRegister reg(a5(), 18, with_d(3, true));
  reg.bootstrap_xone();
  const int k = reg.omega_power();
  for (auto [a, b] : {std::pair{1, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 1}}) {
    // Register Z is the physical Z^k.
    for (const auto& e : oracle::xz_eigenpairs(3, a, (b * k) % 3)) {
      int want = -1;
      for (int j = 0; j < 3; ++j) {
        if (std::abs(e.value - oracle::omega(3, k * j)) < 1e-9) want = j;
      }
      REQUIRE(want >= 0);
      const auto qs = reg.inject(vec(3, e.vector));
      for (int r = 0; r < 3; ++r) REQUIRE(reg.measure_XaZb(qs[0], a, b) == want);
      // The eigenstate survives.
      REQUIRE(oracle::fidelity(state_of(reg, qs), vec(3, e.vector)) >= 1 - 1e-9);
      reg.discard(qs[0]);
    }
  }
  const auto x1 = reg.inject(vec(3, oracle::x_eigenstate(3, k)));
  REQUIRE(reg.measure_XaZb(x1[0], 1, 0) == 1);
}

TEST_CASE("qubit iY reference") {
  QuditRegister reg(a5(), 19, with_d(2, true));
  reg.bootstrap_xone();
  const int ref = reg.iy_reference();
  const auto s = state_of(reg, {ref});
  // An eigenstate of ZX = iY.
  const double r = 1 / std::sqrt(2.0);
  const double f = std::max(oracle::fidelity(s, vec(2, {r, {0, r}})), oracle::fidelity(s, vec(2, {r, {0, -r}})));
  REQUIRE(f >= 1 - 1e-9);
  for (int i = 0; i < 30; ++i) {
    const int c = reg.copy_iy(ref);
    REQUIRE(oracle::fidelity(state_of(reg, {c}), s) >= 1 - 1e-9);
    REQUIRE(reg.iy_consistent(ref, c));
    reg.discard(c);
  }
  // The designated eigenstate reads index 0; the other one reads 1.
  REQUIRE(reg.measure_XaZb(ref, 1, 1) == reg.measure_XaZb(ref, 1, 1));
}

TEST_CASE("coset mode with trivial N reproduces pure mode") {
  const CosetContext ctx = simple_perfect_quotient(a5());
  REQUIRE(ctx.N.size() == 1);
  for (int d : {2, 3}) {
    QuditRegister pure(a5(), 21, with_d(d));
    QuditRegister coset(ctx, 21, with_d(d));
    REQUIRE(coset.coset_mode());
    for (QuditRegister* r : {&pure, &coset}) {
      const int q1 = r->encode(1), q2 = r->encode(d - 1), q3 = r->encode(0);
      r->toffoli(q1, q2, q3);
      r->measure_Z(q3);
      r->discard(r->prepare_xzero());
    }
    REQUIRE(pure.system().transcript() == coset.system().transcript());
  }
}

TEST_CASE("coset Toffoli over SL(2,5) mod its center") {
  const CosetContext ctx = simple_perfect_quotient(sl25_group());
  REQUIRE(ctx.N.size() == 2);
  QuditRegister reg(ctx, 22, with_d(2));
  for (int l = 0; l < 2; ++l)
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) {
        const int q1 = reg.encode(l), q2 = reg.encode(m), q3 = reg.encode(n);
        reg.toffoli(q1, q2, q3);
        const int qs[3] = {q1, q2, q3};
        const auto sup = logical_support(reg, qs);
        REQUIRE(sup == std::vector<std::vector<int>>{{l, m, (l * m + n) % 2}});
        reg.discard(q1);
        reg.discard(q2);
        reg.discard(q3);
      }
}

TEST_CASE("extraction rejects leaked qudits") {
  QuditRegister reg(a5(), 23, with_d(2));
  const FiniteGroup& G = *a5();
  const int bad = reg.adopt(reg.system().create_flux_ancilla(G.index_of(parse_cycles("(1 2 3 4 5)", 5))));
  const int qs[1] = {bad};
  REQUIRE_THROWS_AS(extract_logical_state(reg, qs), OutOfSubspace);
  REQUIRE(computational_weight(reg, qs) == 0.0);
  const int good = reg.encode(1);
  const int gs[1] = {good};
  REQUIRE(computational_weight(reg, gs) == Approx(1.0));
}

TEST_CASE("circuit files") {
  const std::string src =
      "# toffoli then read out\n"
      "enc 0 1\n"
      "enc 1 1\n"
      "enc 2 0\n"
      "tof 0 1 2\n"
      "mz 2\n"
      "csum 0 2\n"
      "mz 2\n"
      "x 0\n"
      "mz 0\n";
  const auto ops = parse_circuit(src);
  REQUIRE(ops.size() == 9);
  REQUIRE(parse_circuit(format_circuit(ops)).size() == 9);
  QuditRegister reg(a5(), 24, with_d(2));
  const auto out = run_circuit(reg, ops);
  REQUIRE(out == std::vector<std::string>{"mz 2 1", "mz 2 0", "mz 0 0"});

  try {
    parse_circuit("enc 0 1\ntof 0 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 2);
  }
  REQUIRE_THROWS_AS(parse_circuit("rot 1\n"), ParseError);
  REQUIRE_THROWS_AS(run_circuit(reg, parse_circuit("x 7\n")), StructuralError);
}
