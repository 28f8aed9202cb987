#pragma once

#include <complex>
#include <span>
#include <vector>

namespace fluxsim::oracle {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQudits = 6;

/// Dense vector over d^k basis states; qudit 0 is the most significant digit.
/// Gates use omega = exp(2 pi i * omega_power / d).
class DenseState {
 public:
  DenseState(int d, int k);
  static DenseState basis(int d, std::span<const int> digits);
  static DenseState from_amplitudes(int d, int k, std::vector<Amplitude> amps);

  int d() const { return d_; }
  int qudits() const { return k_; }
  std::size_t size() const { return amps_.size(); }
  const std::vector<Amplitude>& amplitudes() const { return amps_; }
  std::vector<Amplitude>& amplitudes() { return amps_; }
  Amplitude operator[](std::size_t i) const { return amps_[i]; }

  std::size_t index_of(std::span<const int> digits) const;
  std::vector<int> digits_of(std::size_t index) const;
  double norm() const;

  void apply_X(int q, int power = 1);
  void apply_Z(int q, int power = 1, int omega_power = 1);
  /// X^a Z^b on one qudit.
  void apply_XaZb(int q, int a, int b, int omega_power = 1);
  /// |l, m, n> -> |l, m, l m + n>.
  void apply_toffoli(int q1, int q2, int q3);
  /// |m, n> -> |m, m + n>.
  void apply_csum(int qc, int qt, int power = 1);
  /// Arbitrary d x d matrix (row-major) on one qudit.
  void apply_matrix(int q, std::span<const Amplitude> m);

 private:
  void check(int q) const;
  std::size_t stride(int q) const;

  int d_;
  int k_;
  std::vector<Amplitude> amps_;
};

Amplitude omega(int d, int power = 1);
double fidelity(const DenseState& a, const DenseState& b);

/// Single-qudit states x~_i = sum_n omega^(-i n) |n> / sqrt(d), with X x~_i = omega^i x~_i.
std::vector<Amplitude> x_eigenstate(int d, int i, int omega_power = 1);
/// Matrix of X^a Z^b, row-major.
std::vector<Amplitude> xz_matrix(int d, int a, int b, int omega_power = 1);
/// Eigenvectors of X^a Z^b found by projecting basis vectors with
/// sum_k (c U)^k; returned with their eigenvalues.
struct Eigenpair {
  Amplitude value;
  std::vector<Amplitude> vector;
};
std::vector<Eigenpair> xz_eigenpairs(int d, int a, int b, int omega_power = 1);

/// Outcome distribution of phase estimation: control x~_0, controlled-(X^a Z^b)
/// onto `psi`, then the control is measured in the x~ basis. Entry j is the
/// probability of reading index j, where the eigenvalue is omega^j.
std::vector<double> phase_estimation(int d, std::span<const Amplitude> psi, int a, int b, int omega_power = 1);

}  // namespace fluxsim::oracle
