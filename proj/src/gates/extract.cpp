#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "fluxsim/errors.hpp"
#include "fluxsim/gate.hpp"

namespace fluxsim {

namespace {

struct QuditColumns {
  std::vector<int> left;
  std::vector<int> right;
  std::vector<int> rest;
};

QuditColumns columns_of(const QuditRegister& reg, std::span<const int> qudits) {
  const AnyonSystem& sys = reg.system();
  QuditColumns qc;
  std::vector<char> used(sys.columns(), 0);
  for (int q : qudits) {
    const PairId p = reg.pair(q);
    if (sys.is_composite(p.left) || sys.is_composite(p.right)) throw OutOfSubspace("qudit anyon is a composite");
    qc.left.push_back(sys.column_of(p.left));
    qc.right.push_back(sys.column_of(p.right));
    used[qc.left.back()] = used[qc.right.back()] = 1;
  }
  for (int c = 0; c < sys.columns(); ++c) {
    if (!used[c]) qc.rest.push_back(c);
  }
  return qc;
}

// Digits of one row, or throws with the offending configuration.
std::vector<int> row_digits(const QuditRegister& reg, const Branch& b, const std::uint16_t* row,
                            const QuditColumns& qc) {
  const FiniteGroup& G = *reg.context().G;
  std::vector<int> digits;
  for (std::size_t i = 0; i < qc.left.size(); ++i) {
    const int g = row[qc.left[i]];
    const int h = row[qc.right[i]];
    const int n = reg.digit_of_flux(g);
    if (n < 0 || h != G.inv(g) || b.token_partner[qc.left[i]] != -1 || b.token_partner[qc.right[i]] != -1) {
      throw OutOfSubspace("qudit " + std::to_string(i) + " holds (" + G.format(g) + ", " + G.format(h) + ")");
    }
    digits.push_back(n);
  }
  return digits;
}

}  // namespace

oracle::DenseState extract_logical_state(const QuditRegister& reg, std::span<const int> qudits) {
  const int d = reg.d();
  const int k = static_cast<int>(qudits.size());
  if (k < 1 || k > oracle::kMaxQudits) throw DimensionMismatch("between 1 and 6 qudits can be extracted");
  const AnyonSystem& sys = reg.system();
  const FiniteGroup& G = *reg.context().G;
  const QuditColumns qc = columns_of(reg, qudits);
  const int stride = sys.columns();
  // Undo the digit so that every fiber element of a^n b a^-n maps back to a
  // fiber element of b; rows of one product state then share this key.
  std::vector<int> spow_inv(d, 0);
  {
    int s = 0;
    for (int n = 1; n < d; ++n) {
      s = G.mul(s, reg.context().section[reg.params().a]);
      spow_inv[n] = G.inv(s);
    }
  }
  oracle::DenseState probe(d, k);
  std::optional<oracle::DenseState> result;
  for (const Branch& b : sys.branches()) {
    std::map<std::vector<int>, std::vector<Amplitude>> rows;
    for (std::size_t t = 0; t < b.terms(); ++t) {
      const std::uint16_t* row = b.configs.data() + t * stride;
      const auto digits = row_digits(reg, b, row, qc);
      std::vector<int> key;
      for (int c : qc.rest) key.push_back(row[c]);
      for (int i = 0; i < k; ++i) key.push_back(G.conj(spow_inv[digits[i]], row[qc.left[i]]));
      auto& v = rows[key];
      if (v.empty()) v.assign(probe.size(), 0.0);
      v[probe.index_of(digits)] += b.amps[t];
    }
    // Rank one: every row parallel to the heaviest.
    const std::vector<Amplitude>* best = nullptr;
    double best_n = -1;
    for (const auto& [key, v] : rows) {
      double n = 0;
      for (auto a : v) n += std::norm(a);
      if (n > best_n) {
        best_n = n;
        best = &v;
      }
    }
    for (const auto& [key, v] : rows) {
      double n = 0;
      Amplitude ip = 0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        n += std::norm(v[i]);
        ip += std::conj((*best)[i]) * v[i];
      }
      if (n > 1e-20 && std::norm(ip) < best_n * n * (1 - 1e-9)) {
        throw StructuralError("qudits are entangled with the rest of the system");
      }
    }
    std::vector<Amplitude> amps = *best;
    const double s = 1.0 / std::sqrt(best_n);
    for (auto& a : amps) a *= s;
    auto state = oracle::DenseState::from_amplitudes(d, k, std::move(amps));
    if (!result) {
      result = std::move(state);
    } else if (oracle::fidelity(*result, state) < 1 - 1e-9) {
      throw StructuralError("qudits are in a mixed state");
    }
  }
  if (!result) throw StructuralError("empty ensemble");
  return *result;
}

std::vector<std::vector<int>> logical_support(const QuditRegister& reg, std::span<const int> qudits) {
  const AnyonSystem& sys = reg.system();
  const QuditColumns qc = columns_of(reg, qudits);
  const int stride = sys.columns();
  std::set<std::vector<int>> support;
  for (const Branch& b : sys.branches()) {
    if (b.weight <= 0) continue;
    for (std::size_t t = 0; t < b.terms(); ++t) {
      if (std::abs(b.amps[t]) < 1e-12) continue;
      support.insert(row_digits(reg, b, b.configs.data() + t * stride, qc));
    }
  }
  return {support.begin(), support.end()};
}

double computational_weight(const QuditRegister& reg, std::span<const int> qudits) {
  const AnyonSystem& sys = reg.system();
  const int stride = sys.columns();
  QuditColumns qc;
  try {
    qc = columns_of(reg, qudits);
  } catch (const OutOfSubspace&) {
    return 0.0;
  }
  double total = 0;
  for (const Branch& b : sys.branches()) {
    double in = 0;
    for (std::size_t t = 0; t < b.terms(); ++t) {
      try {
        row_digits(reg, b, b.configs.data() + t * stride, qc);
        in += std::norm(b.amps[t]);
      } catch (const OutOfSubspace&) {
      }
    }
    total += b.weight * in;
  }
  return total;
}

}  // namespace fluxsim
