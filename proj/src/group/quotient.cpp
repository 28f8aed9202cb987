#include <algorithm>
#include <set>

#include "fluxsim/group.hpp"

namespace fluxsim {

namespace {

// Left cosets x*H of H inside P, numbered by first appearance in P's order.
std::vector<int> coset_ids(const FiniteGroup& G, const Subgroup& P, const Subgroup& H, int& count) {
  std::vector<int> id(G.order(), -1);
  count = 0;
  for (int p : P.members) {
    if (id[p] >= 0) continue;
    for (int h : H.members) id[G.mul(p, h)] = count;
    ++count;
  }
  return id;
}

// Permutation of the cosets of H induced by left multiplication with x.
Perm coset_action(const FiniteGroup& G, const std::vector<int>& id, const std::vector<int>& reps, int x) {
  std::vector<std::uint8_t> im(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) im[i] = static_cast<std::uint8_t>(id[G.mul(x, reps[i])]);
  return Perm(std::move(im));
}

// Kernel of the action of P on the left cosets of H.
Subgroup action_kernel(const FiniteGroup& G, const Subgroup& P, const std::vector<int>& id,
                       const std::vector<int>& reps) {
  std::vector<int> ker;
  for (int p : P.members) {
    bool fixes = true;
    for (std::size_t i = 0; i < reps.size() && fixes; ++i) {
      fixes = id[G.mul(p, reps[i])] == static_cast<int>(i);
    }
    if (fixes) ker.push_back(p);
  }
  return make_subgroup(G, std::move(ker));
}

// Smallest-index subgroup N <= H < P whose coset action has kernel exactly N.
Subgroup faithful_point_stabilizer(const FiniteGroup& G, const Subgroup& P, const Subgroup& N) {
  int count = 0;
  const std::vector<int> nid = coset_ids(G, P, N, count);
  std::vector<int> reps;
  {
    std::vector<char> done(count, 0);
    for (int p : P.members) {
      if (!done[nid[p]]) {
        done[nid[p]] = 1;
        reps.push_back(p);
      }
    }
  }
  const std::vector<int> ngens = generating_set(G, N);
  std::set<std::vector<int>> tried;
  std::vector<Subgroup> candidates;
  auto consider = [&](std::vector<int> extra) {
    std::vector<int> gens = ngens;
    gens.insert(gens.end(), extra.begin(), extra.end());
    Subgroup H = generated_subgroup(G, gens);
    const int index = P.size() / H.size();
    if (index <= 1 || index > kMaxDegree) return;
    if (tried.insert(H.members).second) candidates.push_back(std::move(H));
  };
  for (std::size_t i = 1; i < reps.size(); ++i) consider({reps[i]});
  for (std::size_t i = 1; i < reps.size(); ++i) {
    for (std::size_t j = i + 1; j < reps.size(); ++j) consider({reps[i], reps[j]});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Subgroup& x, const Subgroup& y) { return x.size() > y.size(); });
  for (const auto& H : candidates) {
    int hc = 0;
    const std::vector<int> hid = coset_ids(G, P, H, hc);
    std::vector<int> hreps(hc, -1);
    for (int p : P.members) {
      if (hreps[hid[p]] < 0) hreps[hid[p]] = p;
    }
    if (action_kernel(G, P, hid, hreps) == N) return H;
  }
  throw StructuralError("no faithful coset action of P/N on at most 32 points");
}

}  // namespace

CosetContext simple_perfect_quotient(const GroupPtr& Gp) {
  const FiniteGroup& G = *Gp;
  auto series = derived_series(G);
  Subgroup P = series.back();
  if (P.size() == 1) throw SolvableGroup("derived series reaches the trivial group");

  auto normals = normal_subgroups(G, P);
  Subgroup N = trivial_subgroup(G);
  for (const auto& S : normals) {
    if (S.size() < P.size() && S.size() > N.size()) N = S;
  }

  // Represent P/N by its action on the cosets of a subgroup H with core N.
  Subgroup H = N;
  if (P.size() / N.size() > kMaxDegree) H = faithful_point_stabilizer(G, P, N);
  int count = 0;
  const std::vector<int> id = coset_ids(G, P, H, count);
  std::vector<int> reps(count, -1);
  for (int p : P.members) {
    if (reps[id[p]] < 0) reps[id[p]] = p;
  }

  std::vector<Perm> qgens;
  for (int x : generating_set(G, P)) qgens.push_back(coset_action(G, id, reps, x));
  GroupPtr Q = FiniteGroup::generate(qgens, count);
  if (Q->order() * N.size() != P.size()) throw StructuralError("quotient order mismatch");

  CosetContext ctx;
  ctx.G = Gp;
  ctx.epi.assign(G.order(), -1);
  for (int p : P.members) ctx.epi[p] = Q->index_of(coset_action(G, id, reps, p));
  ctx.section.assign(Q->order(), -1);
  for (int p : P.members) {
    int q = ctx.epi[p];
    if (ctx.section[q] < 0) ctx.section[q] = p;
  }
  for (int q : ctx.section) {
    if (q < 0) throw StructuralError("epimorphism is not surjective");
  }
  if (!is_perfect(*Q) || !is_simple(*Q)) throw StructuralError("quotient is not perfect and simple");

  ctx.P = std::move(P);
  ctx.N = std::move(N);
  ctx.quotient = std::move(Q);
  return ctx;
}

CosetContext trivial_coset_context(const GroupPtr& Gp) {
  CosetContext ctx;
  ctx.G = Gp;
  ctx.P = whole_group(*Gp);
  ctx.N = trivial_subgroup(*Gp);
  ctx.quotient = Gp;
  ctx.epi.resize(Gp->order());
  for (int i = 0; i < Gp->order(); ++i) ctx.epi[i] = i;
  ctx.section = ctx.epi;
  return ctx;
}

}  // namespace fluxsim
