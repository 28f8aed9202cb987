#include <cmath>
#include <random>

#include "fluxsim/anyon.hpp"

namespace fluxsim {

Amplitude Representation::trace(int g) const {
  Amplitude t = 0;
  for (int i = 0; i < dim; ++i) t += entry(g, i, i);
  return t;
}

Representation Representation::trivial(const FiniteGroup& G) {
  Representation r;
  r.name = "trivial";
  r.dim = 1;
  r.matrices.assign(G.order(), std::vector<Amplitude>{1.0});
  return r;
}

Representation Representation::standard(const FiniteGroup& G) {
  const int k = G.degree();
  if (k < 2) return trivial(G);
  const int m = k - 1;
  // Orthonormal basis of the sum-zero vectors (Helmert columns).
  std::vector<double> V(static_cast<std::size_t>(k) * m, 0.0);
  for (int j = 0; j < m; ++j) {
    const double s = 1.0 / std::sqrt(static_cast<double>((j + 1) * (j + 2)));
    for (int x = 0; x <= j; ++x) V[x * m + j] = s;
    V[(j + 1) * m + j] = -(j + 1) * s;
  }
  Representation r;
  r.name = "standard";
  r.dim = m;
  r.matrices.resize(G.order());
  for (int g = 0; g < G.order(); ++g) {
    const Perm& p = G.element(g);
    std::vector<Amplitude> mat(static_cast<std::size_t>(m) * m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        double s = 0;
        for (int x = 0; x < k; ++x) s += V[p[x] * m + a] * V[x * m + b];
        mat[a * m + b] = std::abs(s) < 1e-15 ? 0.0 : s;
      }
    }
    r.matrices[g] = std::move(mat);
  }
  return r;
}

void Representation::validate(const FiniteGroup& G, double tol) const {
  if (static_cast<int>(matrices.size()) != G.order()) throw NotAHomomorphism("one matrix per element required");
  for (const auto& m : matrices) {
    if (static_cast<int>(m.size()) != dim * dim) throw NotAHomomorphism("matrix has the wrong size");
  }
  auto check_pair = [&](int g, int h) {
    const int gh = G.mul(g, h);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        Amplitude s = 0;
        for (int k = 0; k < dim; ++k) s += entry(g, i, k) * entry(h, k, j);
        if (std::abs(s - entry(gh, i, j)) > tol) throw NotAHomomorphism("R(g)R(h) differs from R(gh)");
      }
    }
  };
  for (int g = 0; g < G.order(); ++g) {
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        Amplitude s = 0;
        for (int k = 0; k < dim; ++k) s += entry(g, i, k) * std::conj(entry(g, j, k));
        if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol) throw NotAHomomorphism("matrix is not unitary");
      }
    }
  }
  const double work = static_cast<double>(G.order()) * G.order() * dim * dim * dim;
  if (work <= 1e8) {
    for (int g = 0; g < G.order(); ++g) {
      for (int h = 0; h < G.order(); ++h) check_pair(g, h);
    }
    return;
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<int> pick(0, G.order() - 1);
  for (int t = 0; t < 2000; ++t) check_pair(pick(rng), pick(rng));
}

}  // namespace fluxsim
