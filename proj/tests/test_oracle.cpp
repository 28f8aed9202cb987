#include <catch_amalgamated.hpp>

#include <cmath>

#include "fluxsim/errors.hpp"
#include "fluxsim/oracle.hpp"

using namespace fluxsim;
using namespace fluxsim::oracle;
using Catch::Approx;

namespace {

std::vector<Amplitude> matmul(int d, const std::vector<Amplitude>& x, const std::vector<Amplitude>& y) {
  std::vector<Amplitude> z(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) z[i * d + j] += x[i * d + k] * y[k * d + j];
  return z;
}

double max_diff(const std::vector<Amplitude>& x, const std::vector<Amplitude>& y) {
  double m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace

TEST_CASE("ZX and XZ differ by omega") {
  for (int d : {2, 3, 5}) {
    for (int i = 0; i < d; ++i) {
      const int digit[1] = {i};
      auto zx = DenseState::basis(d, digit);
      zx.apply_X(0);
      zx.apply_Z(0);
      auto xz = DenseState::basis(d, digit);
      xz.apply_Z(0);
      xz.apply_X(0);
      for (std::size_t k = 0; k < zx.size(); ++k) {
        REQUIRE(std::abs(zx[k] - xz[k] * omega(d)) < 1e-12);
      }
    }
  }
}

TEST_CASE("qubit Toffoli and X^d") {
  const int in[3] = {1, 1, 1};
  auto s = DenseState::basis(2, in);
  s.apply_toffoli(0, 1, 2);
  const int out[3] = {1, 1, 0};
  REQUIRE(std::abs(s[s.index_of(out)]) == Approx(1.0));

  for (int d : {2, 3, 5}) {
    const int digit[1] = {d - 1};
    auto x = DenseState::basis(d, digit);
    x.apply_X(0, d);
    REQUIRE(std::abs(x[d - 1]) == Approx(1.0));
    x.apply_X(0);
    REQUIRE(std::abs(x[0]) == Approx(1.0));
  }
}

TEST_CASE("qutrit Toffoli table") {
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n) {
        const int in[3] = {l, m, n};
        auto s = DenseState::basis(3, in);
        s.apply_toffoli(0, 1, 2);
        const int out[3] = {l, m, (l * m + n) % 3};
        REQUIRE(std::abs(s[s.index_of(out)]) == Approx(1.0));
      }
}

TEST_CASE("fidelity") {
  const int zero[1] = {0};
  const int one[1] = {1};
  const auto e0 = DenseState::basis(2, zero);
  const auto e1 = DenseState::basis(2, one);
  REQUIRE(fidelity(e0, e0) == Approx(1.0));
  REQUIRE(fidelity(e0, e1) == Approx(0.0).margin(1e-15));
  const double r = 1 / std::sqrt(2.0);
  const auto plus = DenseState::from_amplitudes(2, 1, {r, r});
  REQUIRE(fidelity(plus, e0) == Approx(0.5));
  REQUIRE_THROWS_AS(fidelity(e0, DenseState(3, 1)), DimensionMismatch);
}

TEST_CASE("X eigenstates and Z shifts them down") {
  for (int d : {2, 3}) {
    for (int i = 0; i < d; ++i) {
      auto s = DenseState::from_amplitudes(d, 1, x_eigenstate(d, i));
      auto x = s;
      x.apply_X(0);
      for (std::size_t k = 0; k < s.size(); ++k) REQUIRE(std::abs(x[k] - omega(d, i) * s[k]) < 1e-12);
      s.apply_Z(0);
      const auto below = DenseState::from_amplitudes(d, 1, x_eigenstate(d, (i + d - 1) % d));
      REQUIRE(fidelity(s, below) == Approx(1.0));
    }
  }
}

TEST_CASE("X^a Z^b powers") {
  // (X^a Z^b)^d = 1 for odd d.
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const auto u = xz_matrix(3, a, b);
      auto p = matmul(3, matmul(3, u, u), u);
      std::vector<Amplitude> id(9);
      for (int i = 0; i < 3; ++i) id[i * 3 + i] = 1;
      REQUIRE(max_diff(p, id) < 1e-12);
    }
  // For qubits (XZ)^2 = -1.
  const auto u = xz_matrix(2, 1, 1);
  const auto sq = matmul(2, u, u);
  REQUIRE(max_diff(sq, {-1.0, 0.0, 0.0, -1.0}) < 1e-12);
}

TEST_CASE("eigenpairs of X^a Z^b") {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == 0 && b == 0) continue;
      const auto u = xz_matrix(3, a, b);
      const auto pairs = xz_eigenpairs(3, a, b);
      REQUIRE(pairs.size() == 3);
      for (const auto& e : pairs) {
        for (int i = 0; i < 3; ++i) {
          Amplitude y = 0;
          for (int j = 0; j < 3; ++j) y += u[i * 3 + j] * e.vector[j];
          REQUIRE(std::abs(y - e.value * e.vector[i]) < 1e-10);
        }
      }
    }
}

TEST_CASE("phase estimation reads the eigenvalue index") {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == 0 && b == 0) continue;
      for (const auto& e : xz_eigenpairs(3, a, b)) {
        const auto dist = phase_estimation(3, e.vector, a, b);
        int j = -1;
        for (int k = 0; k < 3; ++k) {
          if (std::abs(e.value - omega(3, k)) < 1e-9) j = k;
        }
        REQUIRE(j >= 0);
        REQUIRE(dist[j] == Approx(1.0).margin(1e-9));
      }
    }
  // XZ with eigenvalue omega^2.
  for (const auto& e : xz_eigenpairs(3, 1, 1)) {
    if (std::abs(e.value - omega(3, 2)) > 1e-9) continue;
    REQUIRE(phase_estimation(3, e.vector, 1, 1)[2] == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("index errors") {
  DenseState s(2, 2);
  REQUIRE_THROWS_AS(s.apply_X(2), PositionOutOfRange);
  REQUIRE_THROWS_AS(DenseState(2, kMaxQudits + 1), DimensionMismatch);
}
