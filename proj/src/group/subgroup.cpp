#include <algorithm>
#include <set>

#include "fluxsim/group.hpp"

namespace fluxsim {

Subgroup make_subgroup(const FiniteGroup& G, std::vector<int> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  Subgroup H;
  H.mask.assign(G.order(), 0);
  for (int m : members) H.mask[m] = 1;
  H.members = std::move(members);
  return H;
}

Subgroup whole_group(const FiniteGroup& G) {
  std::vector<int> all(G.order());
  for (int i = 0; i < G.order(); ++i) all[i] = i;
  return make_subgroup(G, std::move(all));
}

Subgroup trivial_subgroup(const FiniteGroup& G) { return make_subgroup(G, {0}); }

Subgroup generated_subgroup(const FiniteGroup& G, std::span<const int> gens) {
  std::vector<char> mask(G.order(), 0);
  std::vector<int> members{0};
  mask[0] = 1;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (int s : gens) {
      int y = G.mul(members[i], s);
      if (!mask[y]) {
        mask[y] = 1;
        members.push_back(y);
      }
    }
  }
  std::sort(members.begin(), members.end());
  Subgroup H;
  H.members = std::move(members);
  H.mask = std::move(mask);
  return H;
}

std::vector<int> generating_set(const FiniteGroup& G, const Subgroup& H) {
  std::vector<int> gens;
  Subgroup K = trivial_subgroup(G);
  for (int h : H.members) {
    if (K.contains(h)) continue;
    gens.push_back(h);
    K = generated_subgroup(G, gens);
    if (K.size() == H.size()) break;
  }
  return gens;
}

Subgroup normal_closure(const FiniteGroup& G, std::span<const int> elems, const Subgroup& within) {
  const std::vector<int> hgens = generating_set(G, within);
  std::vector<int> kgens;
  for (int e : elems) {
    if (e != 0) kgens.push_back(e);
  }
  Subgroup K = generated_subgroup(G, kgens);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < kgens.size(); ++i) {
      for (int h : hgens) {
        int y = G.conj(h, kgens[i]);
        if (!K.contains(y)) {
          kgens.push_back(y);
          K = generated_subgroup(G, kgens);
          changed = true;
        }
      }
    }
  }
  return K;
}

Subgroup commutator_subgroup(const FiniteGroup& G, const Subgroup& H) {
  const std::vector<int> gens = generating_set(G, H);
  std::vector<int> comms;
  for (int s : gens) {
    for (int t : gens) {
      int c = G.comm(s, t);
      if (c != 0) comms.push_back(c);
    }
  }
  return normal_closure(G, comms, H);
}

bool is_normal(const FiniteGroup& G, const Subgroup& N, const Subgroup& H) {
  for (int n : N.members) {
    if (!H.contains(n)) return false;
  }
  for (int h : generating_set(G, H)) {
    for (int n : N.members) {
      if (!N.contains(G.conj(h, n))) return false;
    }
  }
  return true;
}

const std::vector<std::vector<int>>& conjugacy_classes(const FiniteGroup& G) { return G.classes(); }

std::vector<std::vector<int>> conjugacy_classes_in(const FiniteGroup& G, const Subgroup& H) {
  const std::vector<int> gens = generating_set(G, H);
  std::vector<int> cls_of(G.order(), -1);
  std::vector<std::vector<int>> out;
  for (int g : H.members) {
    if (cls_of[g] >= 0) continue;
    std::vector<int> cls{g};
    cls_of[g] = static_cast<int>(out.size());
    for (std::size_t i = 0; i < cls.size(); ++i) {
      for (int s : gens) {
        int y = G.conj(s, cls[i]);
        if (cls_of[y] < 0) {
          cls_of[y] = cls_of[g];
          cls.push_back(y);
        }
      }
    }
    std::sort(cls.begin(), cls.end());
    out.push_back(std::move(cls));
  }
  return out;
}

std::vector<Subgroup> derived_series(const FiniteGroup& G) {
  std::vector<Subgroup> series{whole_group(G)};
  while (series.back().size() > 1) {
    Subgroup next = commutator_subgroup(G, series.back());
    const bool stable = next == series.back();
    series.push_back(std::move(next));
    if (stable) break;
  }
  return series;
}

bool is_abelian(const FiniteGroup& G) {
  const auto& gens = G.generators();
  for (int s : gens) {
    for (int t : gens) {
      if (!G.commute(s, t)) return false;
    }
  }
  return true;
}

bool is_perfect(const FiniteGroup& G) {
  return commutator_subgroup(G, whole_group(G)).size() == G.order();
}

bool is_solvable(const FiniteGroup& G) { return derived_series(G).back().size() == 1; }

bool is_simple_subgroup(const FiniteGroup& G, const Subgroup& H) {
  if (H.size() < 2) return false;
  for (const auto& cls : conjugacy_classes_in(G, H)) {
    if (cls.front() == 0) continue;
    const int rep = cls.front();
    if (normal_closure(G, std::span<const int>(&rep, 1), H).size() != H.size()) return false;
  }
  return true;
}

bool is_simple(const FiniteGroup& G) {
  if (G.order() < 2) return false;
  const Subgroup all = whole_group(G);
  for (const auto& cls : G.classes()) {
    if (cls.front() == 0) continue;
    const int rep = cls.front();
    if (normal_closure(G, std::span<const int>(&rep, 1), all).size() != G.order()) return false;
  }
  return true;
}

std::vector<Subgroup> normal_subgroups(const FiniteGroup& G, const Subgroup& H) {
  std::vector<Subgroup> found;
  std::set<std::vector<int>> keys;
  auto add = [&](Subgroup S) {
    if (keys.insert(S.members).second) found.push_back(std::move(S));
  };
  add(trivial_subgroup(G));
  for (const auto& cls : conjugacy_classes_in(G, H)) {
    if (cls.front() == 0) continue;
    const int rep = cls.front();
    add(normal_closure(G, std::span<const int>(&rep, 1), H));
  }
  std::vector<std::vector<int>> gens;
  for (const auto& S : found) gens.push_back(generating_set(G, S));
  for (std::size_t i = 0; i < found.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      std::vector<int> u = gens[i];
      u.insert(u.end(), gens[j].begin(), gens[j].end());
      Subgroup J = generated_subgroup(G, u);
      if (keys.insert(J.members).second) {
        found.push_back(std::move(J));
        gens.push_back(generating_set(G, found.back()));
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const Subgroup& x, const Subgroup& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x.members < y.members;
  });
  return found;
}

}  // namespace fluxsim
