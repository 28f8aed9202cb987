#include <algorithm>

#include "fluxsim/group.hpp"

namespace fluxsim {

namespace {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

// Smallest t > 0 with a^t b a^-t = b.
int conjugation_period(const FiniteGroup& Q, int a, int b) {
  int t = 1;
  for (int x = Q.conj(a, b); x != b; x = Q.conj(a, x)) ++t;
  return t;
}

}  // namespace

bool valid_qudit_params(const FiniteGroup& Q, const QuditParams& p) {
  if (p.a < 0 || p.b < 0 || p.a >= Q.order() || p.b >= Q.order()) return false;
  if (!is_prime(p.d) || Q.commute(p.a, p.b)) return false;
  return conjugation_period(Q, p.a, p.b) == p.d;
}

std::vector<int> basis_fluxes(const FiniteGroup& Q, const QuditParams& p) {
  std::vector<int> out;
  int x = p.b;
  for (int i = 0; i < p.d; ++i) {
    out.push_back(x);
    x = Q.conj(p.a, x);
  }
  return out;
}

QuditParams find_qudit_params(const FiniteGroup& Q, std::optional<int> prefer_d) {
  if (!is_simple(Q) || is_abelian(Q)) throw StructuralError("qudit parameters need a simple non-abelian group");

  std::vector<int> by_cycles;
  for (int g = 1; g < Q.order(); ++g) by_cycles.push_back(g);
  std::stable_sort(by_cycles.begin(), by_cycles.end(), [&](int x, int y) {
    return cycle_notation_less(Q.element(x), Q.element(y));
  });

  std::vector<int> primes;
  if (prefer_d) {
    if (!is_prime(*prefer_d)) throw NoSuchParameters("d must be prime");
    primes.push_back(*prefer_d);
  } else {
    int max_order = 1;
    for (int g = 0; g < Q.order(); ++g) max_order = std::max(max_order, Q.element_order(g));
    for (int p = 2; p <= max_order; ++p) {
      if (is_prime(p)) primes.push_back(p);
    }
  }

  for (int p : primes) {
    // Exact period first; then powers of elements whose period is a multiple of p.
    for (int pass = 0; pass < 2; ++pass) {
      for (int a : by_cycles) {
        for (int b = 1; b < Q.order(); ++b) {
          const int t = conjugation_period(Q, a, b);
          if (pass == 0 && t == p) return {a, b, p};
          if (pass == 1 && t % p == 0 && t != p) return {Q.pow(a, t / p), b, p};
        }
      }
    }
  }
  throw NoSuchParameters("no element pair with conjugation period " +
                         (prefer_d ? std::to_string(*prefer_d) : std::string("prime")));
}

}  // namespace fluxsim
