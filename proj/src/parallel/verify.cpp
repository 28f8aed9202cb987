#include <omp.h>

#include <algorithm>

#include "fluxsim/errors.hpp"
#include "fluxsim/parallel.hpp"

namespace fluxsim {

namespace {

void check_size(const FiniteGroup& G, const Program& p, std::span<const int> table) {
  std::size_t want = 1;
  for (int i = 0; i < p.arity(); ++i) want *= static_cast<std::size_t>(G.order());
  if (table.size() != want) throw ArityMismatch("table size does not match the program arity");
}

void decode(const FiniteGroup& G, std::int64_t index, std::vector<int>& env) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    *it = static_cast<int>(index % G.order());
    index /= G.order();
  }
}

}  // namespace

TableCheck verify_table_serial(const FiniteGroup& G, const Program& p, std::span<const int> table) {
  check_size(G, p, table);
  TableCheck r;
  std::vector<int> env(p.arity());
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(table.size()); ++i) {
    if (table[i] < 0) continue;
    decode(G, i, env);
    ++r.checked;
    if (p.evaluate(G, env) != table[i]) {
      if (r.first_mismatch < 0) r.first_mismatch = i;
      ++r.mismatches;
    }
  }
  return r;
}

TableCheck verify_table(const FiniteGroup& G, const Program& p, std::span<const int> table) {
  check_size(G, p, table);
  const auto n = static_cast<std::int64_t>(table.size());
  std::int64_t checked = 0, mismatches = 0, first = n;
#pragma omp parallel reduction(+ : checked, mismatches) reduction(min : first)
  {
    std::vector<int> env(p.arity());
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      if (table[i] < 0) continue;
      decode(G, i, env);
      ++checked;
      if (p.evaluate(G, env) != table[i]) {
        ++mismatches;
        first = std::min(first, i);
      }
    }
  }
  return {checked, mismatches, mismatches ? first : -1};
}

int worker_threads() { return omp_get_max_threads(); }

}  // namespace fluxsim
