#include <cmath>
#include <numbers>

#include "fluxsim/errors.hpp"
#include "fluxsim/oracle.hpp"

namespace fluxsim::oracle {

namespace {

int mod(long long x, int d) { return static_cast<int>(((x % d) + d) % d); }

}  // namespace

Amplitude omega(int d, int power) { return std::polar(1.0, 2.0 * std::numbers::pi * mod(power, d) / d); }

DenseState::DenseState(int d, int k) : d_(d), k_(k) {
  if (d < 2) throw DimensionMismatch("qudit dimension must be at least 2");
  if (k < 1 || k > kMaxQudits) throw DimensionMismatch("between 1 and 6 qudits supported");
  std::size_t n = 1;
  for (int i = 0; i < k; ++i) n *= d;
  amps_.assign(n, 0.0);
  amps_[0] = 1.0;
}

DenseState DenseState::basis(int d, std::span<const int> digits) {
  DenseState s(d, static_cast<int>(digits.size()));
  s.amps_[0] = 0.0;
  s.amps_[s.index_of(digits)] = 1.0;
  return s;
}

DenseState DenseState::from_amplitudes(int d, int k, std::vector<Amplitude> amps) {
  DenseState s(d, k);
  if (amps.size() != s.amps_.size()) throw DimensionMismatch("amplitude vector has the wrong length");
  s.amps_ = std::move(amps);
  return s;
}

std::size_t DenseState::index_of(std::span<const int> digits) const {
  if (static_cast<int>(digits.size()) != k_) throw DimensionMismatch("one digit per qudit required");
  std::size_t idx = 0;
  for (int x : digits) {
    if (x < 0 || x >= d_) throw DigitOutOfRange("digit out of range");
    idx = idx * d_ + x;
  }
  return idx;
}

std::vector<int> DenseState::digits_of(std::size_t index) const {
  std::vector<int> out(k_);
  for (int q = k_ - 1; q >= 0; --q) {
    out[q] = static_cast<int>(index % d_);
    index /= d_;
  }
  return out;
}

double DenseState::norm() const {
  double s = 0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

void DenseState::check(int q) const {
  if (q < 0 || q >= k_) throw PositionOutOfRange("qudit index out of range");
}

std::size_t DenseState::stride(int q) const {
  std::size_t s = 1;
  for (int i = q + 1; i < k_; ++i) s *= d_;
  return s;
}

void DenseState::apply_matrix(int q, std::span<const Amplitude> m) {
  check(q);
  if (static_cast<int>(m.size()) != d_ * d_) throw DimensionMismatch("matrix must be d x d");
  const std::size_t s = stride(q);
  std::vector<Amplitude> col(d_);
  for (std::size_t base = 0; base < amps_.size(); ++base) {
    if ((base / s) % d_ != 0) continue;
    for (int n = 0; n < d_; ++n) col[n] = amps_[base + n * s];
    for (int r = 0; r < d_; ++r) {
      Amplitude v = 0;
      for (int n = 0; n < d_; ++n) v += m[r * d_ + n] * col[n];
      amps_[base + r * s] = v;
    }
  }
}

void DenseState::apply_X(int q, int power) { apply_XaZb(q, power, 0); }

void DenseState::apply_Z(int q, int power, int omega_power) { apply_XaZb(q, 0, power, omega_power); }

void DenseState::apply_XaZb(int q, int a, int b, int omega_power) {
  const auto m = xz_matrix(d_, a, b, omega_power);
  apply_matrix(q, m);
}

void DenseState::apply_toffoli(int q1, int q2, int q3) {
  check(q1);
  check(q2);
  check(q3);
  if (q1 == q2 || q1 == q3 || q2 == q3) throw StructuralError("Toffoli needs three distinct qudits");
  std::vector<Amplitude> out(amps_.size(), 0.0);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    auto dig = digits_of(i);
    dig[q3] = mod(static_cast<long long>(dig[q1]) * dig[q2] + dig[q3], d_);
    out[index_of(dig)] += amps_[i];
  }
  amps_ = std::move(out);
}

void DenseState::apply_csum(int qc, int qt, int power) {
  check(qc);
  check(qt);
  if (qc == qt) throw StructuralError("controlled-sum needs two distinct qudits");
  std::vector<Amplitude> out(amps_.size(), 0.0);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    auto dig = digits_of(i);
    dig[qt] = mod(static_cast<long long>(power) * dig[qc] + dig[qt], d_);
    out[index_of(dig)] += amps_[i];
  }
  amps_ = std::move(out);
}

double fidelity(const DenseState& a, const DenseState& b) {
  if (a.d() != b.d() || a.size() != b.size()) throw DimensionMismatch("states have different dimensions");
  Amplitude ip = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ip += std::conj(a[i]) * b[i];
  return std::norm(ip);
}

std::vector<Amplitude> x_eigenstate(int d, int i, int omega_power) {
  std::vector<Amplitude> v(d);
  for (int n = 0; n < d; ++n) v[n] = omega(d, -static_cast<long long>(i) * n * omega_power % d) / std::sqrt(double(d));
  return v;
}

std::vector<Amplitude> xz_matrix(int d, int a, int b, int omega_power) {
  // X^a Z^b |n> = omega^(b n) |n + a>.
  std::vector<Amplitude> m(static_cast<std::size_t>(d) * d, 0.0);
  for (int n = 0; n < d; ++n) m[mod(n + a, d) * d + n] = omega(d, static_cast<long long>(b) * n * omega_power % d);
  return m;
}

namespace {

std::vector<Amplitude> matvec(int d, const std::vector<Amplitude>& m, const std::vector<Amplitude>& v) {
  std::vector<Amplitude> out(d, 0.0);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) out[r] += m[r * d + c] * v[c];
  }
  return out;
}

}  // namespace

std::vector<Eigenpair> xz_eigenpairs(int d, int a, int b, int omega_power) {
  const auto U = xz_matrix(d, a, b, omega_power);
  // U^d is a scalar lambda; c = lambda^(-1/d) makes (cU)^d = 1.
  std::vector<Amplitude> e0(d, 0.0);
  e0[0] = 1.0;
  auto w = e0;
  for (int k = 0; k < d; ++k) w = matvec(d, U, w);
  const Amplitude c = std::pow(w[0], -1.0 / d);
  std::vector<Eigenpair> out;
  for (int start = 0; start < d && static_cast<int>(out.size()) < d; ++start) {
    for (int j = 0; j < d; ++j) {
      const Amplitude target = omega(d, j);
      // Projector onto the target eigenvalue of cU, applied to e_start.
      std::vector<Amplitude> v(d, 0.0), p(d, 0.0);
      v[start] = 1.0;
      Amplitude phase = 1.0;
      for (int k = 0; k < d; ++k) {
        for (int n = 0; n < d; ++n) p[n] += phase * v[n] / double(d);
        v = matvec(d, U, v);
        for (auto& x : v) x *= c;
        phase *= std::conj(target);
      }
      double nrm = 0;
      for (auto& x : p) nrm += std::norm(x);
      if (nrm < 1e-12) continue;
      for (auto& x : p) x /= std::sqrt(nrm);
      const Amplitude value = target / c;
      bool seen = false;
      for (const auto& e : out) seen = seen || std::abs(e.value - value) < 1e-9;
      if (!seen) out.push_back({value, p});
    }
  }
  return out;
}

std::vector<double> phase_estimation(int d, std::span<const Amplitude> psi, int a, int b, int omega_power) {
  if (static_cast<int>(psi.size()) != d) throw DimensionMismatch("state must have d amplitudes");
  DenseState s(d, 2);
  auto& amps = s.amplitudes();
  const auto x0 = x_eigenstate(d, 0, omega_power);
  for (int c = 0; c < d; ++c) {
    for (int n = 0; n < d; ++n) amps[c * d + n] = x0[c] * psi[n];
  }
  // Controlled-U: apply U^c to the target in control branch c.
  const auto U = xz_matrix(d, a, b, omega_power);
  for (int c = 0; c < d; ++c) {
    std::vector<Amplitude> v(amps.begin() + c * d, amps.begin() + (c + 1) * d);
    for (int k = 0; k < c; ++k) v = matvec(d, U, v);
    std::copy(v.begin(), v.end(), amps.begin() + c * d);
  }
  // Control after kickback is x~_(-j) for eigenvalue omega^j.
  std::vector<double> dist(d, 0.0);
  for (int i = 0; i < d; ++i) {
    const auto xi = x_eigenstate(d, i, omega_power);
    for (int n = 0; n < d; ++n) {
      Amplitude ip = 0;
      for (int c = 0; c < d; ++c) ip += std::conj(xi[c]) * amps[c * d + n];
      dist[mod(-i, d)] += std::norm(ip);
    }
  }
  return dist;
}

}  // namespace fluxsim::oracle
