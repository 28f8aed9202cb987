#include <algorithm>
#include <map>

#include "fluxsim/anyon.hpp"

namespace fluxsim {

namespace {

RepresentationPtr default_rep(const FiniteGroup& G, RepresentationPtr rep) {
  if (rep) return rep;
  return std::make_shared<const Representation>(Representation::standard(G));
}

}  // namespace

bool product_is_trivial(AnyonSystem& sys, std::span<const ParticleId> anyons, int reps, RepresentationPtr rep) {
  rep = default_rep(sys.group(), std::move(rep));
  for (int r = 0; r < reps; ++r) {
    const int probe = sys.create_charge_probe(rep);
    sys.lasso(probe, anyons);
    if (!sys.fuse_probe(probe)) return false;
  }
  return true;
}

bool compare_fluxes(AnyonSystem& sys, PairId pair1, PairId pair2, int reps, RepresentationPtr rep) {
  if (reps < 1) throw StructuralError("reps must be at least 1");
  rep = default_rep(sys.group(), std::move(rep));
  const int p1 = sys.position_of(pair1.left);
  const int p2 = sys.position_of(pair2.left);
  sys.move_pair(pair2, p2 < p1 ? p1 - 2 : p1);
  const ParticleId ring[2] = {pair2.right, pair1.left};
  for (int r = 0; r < reps; ++r) {
    const int probe = sys.create_charge_probe(rep);
    sys.encircle_with_probe(probe, ring);
    if (!sys.fuse_probe(probe)) return false;
  }
  return true;
}

namespace {

// Small generating set: one element if the subgroup is cyclic, else the
// first generating pair.
std::vector<int> small_generators(const FiniteGroup& G, const Subgroup& T) {
  for (int x : T.members) {
    if (G.element_order(x) == T.size()) return {x};
  }
  for (std::size_t i = 1; i < T.members.size(); ++i) {
    for (std::size_t j = i + 1; j < T.members.size(); ++j) {
      const int pair[2] = {T.members[i], T.members[j]};
      if (generated_subgroup(G, pair).size() == T.size()) return {pair[0], pair[1]};
    }
  }
  return generating_set(G, T);
}

std::vector<int> prime_divisors(int n) {
  std::vector<int> ps;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) ps.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) ps.push_back(n);
  return ps;
}

class Labeler {
 public:
  Labeler(AnyonSystem& sys, const DistillOptions& opt, RepresentationPtr rep, DistillResult& res,
          const Subgroup& T, std::vector<int> gens)
      : sys_(sys), G_(sys.group()), reps_(opt.reps), rep_(std::move(rep)), res_(res), T_(T), gens_(std::move(gens)) {
    // Shortest positive words over the generators, in BFS order.
    words_.emplace(0, std::vector<int>{});
    order_.push_back(0);
    for (std::size_t i = 0; i < order_.size(); ++i) {
      for (std::size_t k = 0; k < gens_.size(); ++k) {
        const int y = G_.mul(order_[i], gens_[k]);
        if (words_.count(y)) continue;
        auto w = words_[order_[i]];
        w.push_back(static_cast<int>(k));
        words_.emplace(y, std::move(w));
        order_.push_back(y);
      }
    }
  }

  bool run(std::size_t max_candidates) {
    const std::size_t k = gens_.size();
    std::vector<std::vector<int>> cand(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t b = 0; b < res_.bins.size(); ++b) {
        if (has_order(anyon(b), G_.element_order(gens_[i]))) cand[i].push_back(static_cast<int>(b));
      }
      if (cand[i].empty()) return false;
    }
    std::vector<std::size_t> digit(k, 0);
    std::size_t tried = 0;
    for (;;) {
      std::vector<int> choice(k);
      for (std::size_t i = 0; i < k; ++i) choice[i] = cand[i][digit[i]];
      if (++tried > max_candidates) return false;
      if (try_candidate(choice)) return true;
      std::size_t i = 0;
      while (i < k && ++digit[i] == cand[i].size()) digit[i++] = 0;
      if (i == k) return false;
    }
  }

 private:
  ParticleId anyon(std::size_t bin) const { return res_.bins[bin].pairs[0].left; }
  ParticleId anti(std::size_t bin) const { return res_.bins[bin].pairs[0].right; }

  bool trivial(const std::vector<ParticleId>& loop) { return product_is_trivial(sys_, loop, reps_, rep_); }

  bool has_order(ParticleId a, int o) {
    if (!trivial(std::vector<ParticleId>(o, a))) return false;
    for (int p : prime_divisors(o)) {
      if (trivial(std::vector<ParticleId>(o / p, a))) return false;
    }
    return true;
  }

  std::vector<ParticleId> word_loop(const std::vector<int>& word, const std::vector<int>& choice) const {
    std::vector<ParticleId> loop;
    for (int g : word) loop.push_back(anyon(choice[g]));
    return loop;
  }

  bool try_candidate(const std::vector<int>& choice) {
    // Orders of pairwise products must agree with the abstract generators.
    for (std::size_t i = 0; i < choice.size(); ++i) {
      for (std::size_t j = i + 1; j < choice.size(); ++j) {
        if (choice[i] == choice[j]) return false;
        const int o = G_.element_order(G_.mul(gens_[i], gens_[j]));
        std::vector<ParticleId> loop;
        for (int r = 0; r < o; ++r) {
          loop.push_back(anyon(choice[i]));
          loop.push_back(anyon(choice[j]));
        }
        if (!trivial(loop)) return false;
      }
    }
    std::vector<int> label(res_.bins.size(), -1);
    std::map<int, int> bin_of;
    for (int x : order_) {
      if (x == 0) continue;
      const auto base = word_loop(words_[x], choice);
      for (std::size_t b = 0; b < res_.bins.size(); ++b) {
        std::vector<ParticleId> loop{anti(b)};
        loop.insert(loop.end(), base.begin(), base.end());
        if (!trivial(loop)) continue;
        if (label[b] >= 0) return false;
        label[b] = x;
        bin_of[x] = static_cast<int>(b);
        break;
      }
    }
    for (std::size_t b = 0; b < label.size(); ++b) {
      if (label[b] < 0) return false;
    }
    // Every Cayley edge between labelled bins must hold.
    for (auto [x, b] : bin_of) {
      for (std::size_t i = 0; i < gens_.size(); ++i) {
        const int y = G_.mul(x, gens_[i]);
        std::vector<ParticleId> loop{anyon(b), anyon(choice[i])};
        if (y != 0) {
          auto it = bin_of.find(y);
          if (it == bin_of.end()) continue;
          loop.push_back(anti(it->second));
        }
        if (!trivial(loop)) return false;
      }
    }
    for (std::size_t b = 0; b < label.size(); ++b) res_.bins[b].label = label[b];
    res_.generator_bins = choice;
    res_.partial = static_cast<int>(bin_of.size()) + 1 < T_.size();
    return true;
  }

  AnyonSystem& sys_;
  const FiniteGroup& G_;
  int reps_;
  RepresentationPtr rep_;
  DistillResult& res_;
  const Subgroup& T_;
  std::vector<int> gens_;
  std::map<int, std::vector<int>> words_;
  std::vector<int> order_;
};

}  // namespace

DistillResult distill_flux_bins(AnyonSystem& sys, const DistillOptions& options) {
  const FiniteGroup& G = sys.group();
  if (options.budget < 0 || options.reps < 1 || options.keep_per_bin < 1) {
    throw StructuralError("invalid distillation options");
  }
  const RepresentationPtr rep = default_rep(G, options.rep);
  DistillResult res;
  if (options.budget == 0) return res;

  const Subgroup T = options.subgroup_generators.empty() ? whole_group(G)
                                                         : generated_subgroup(G, options.subgroup_generators);
  std::vector<int> nontrivial(T.members.begin() + 1, T.members.end());
  SectorModel model = options.sectors;
  if (model.class_weights.empty()) model = SectorModel::uniform_magnetic(G);
  model.validate(G);

  for (int n = 0; n < options.budget; ++n) {
    // Sector and flux are drawn up front: every later step is diagonal in the
    // flux basis, so this unravelling leaves all outcome statistics unchanged.
    PairId p;
    if (!options.subgroup_generators.empty()) {
      const int g = nontrivial[sys.rng().below(nontrivial.size())];
      sys.log("vacpair flux=" + G.format(g));
      p = sys.create_flux_ancilla(g);
    } else {
      const double u = sys.rng().uniform();
      double acc = 0;
      int cls = -1;
      for (std::size_t c = 0; c < model.class_weights.size(); ++c) {
        acc += model.class_weights[c];
        if (u < acc) {
          cls = static_cast<int>(c);
          break;
        }
      }
      if (cls < 0) {
        sys.log("vacpair charged");
        p = sys.create_charged_pair();
      } else {
        const auto& members = G.classes()[cls];
        const int g = members[sys.rng().below(members.size())];
        sys.log("vacpair flux=" + G.format(g));
        p = sys.create_flux_ancilla(g);
      }
    }
    const ParticleId both[2] = {p.left, p.right};
    const ParticleId one[1] = {p.left};
    if (product_is_trivial(sys, one, options.reps, rep)) {
      sys.discard(both);
      ++res.trivial_discarded;
      continue;
    }
    bool placed = false;
    for (FluxBin& bin : res.bins) {
      if (!compare_fluxes(sys, bin.pairs[0], p, options.reps, rep)) continue;
      ++bin.drawn;
      if (static_cast<int>(bin.pairs.size()) < options.keep_per_bin) {
        bin.pairs.push_back(p);
      } else {
        sys.discard(both);
      }
      placed = true;
      break;
    }
    if (!placed) res.bins.push_back({{p}, 1, -1});
  }

  if (res.bins.empty()) {
    res.partial = true;
    return res;
  }
  auto gens = small_generators(G, T);
  Labeler labeler(sys, options, rep, res, T, std::move(gens));
  res.labeled = labeler.run(20000);
  if (!res.labeled) {
    res.partial = static_cast<int>(res.bins.size()) + 1 < T.size();
    for (FluxBin& bin : res.bins) bin.label = -1;
  }
  return res;
}

}  // namespace fluxsim
