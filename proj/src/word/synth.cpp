#include "fluxsim/synth.hpp"

#include <algorithm>
#include <deque>

namespace fluxsim {

Synthesizer::Synthesizer(GroupPtr G) : G_(std::move(G)) {
  if (!is_simple(*G_) || is_abelian(*G_)) {
    throw SynthesisUnsupported("product-form synthesis needs a simple non-abelian group");
  }
}

Synthesizer::Tree& Synthesizer::tree(int c) {
  auto it = trees_.find(c);
  if (it != trees_.end()) return it->second;
  const FiniteGroup& G = *G_;
  const int n = G.order();
  Tree t;
  std::vector<int> conj_by(n, -1);
  for (int x = 0; x < n; ++x) {
    int y = G.conj(x, c);
    if (conj_by[y] < 0) conj_by[y] = x;
  }
  std::vector<int> cls;
  for (int y = 0; y < n; ++y) {
    if (conj_by[y] >= 0) cls.push_back(y);
  }
  t.parent.assign(n, -2);
  t.via.assign(n, -1);
  t.parent[0] = -1;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int y : cls) {
      int w = G.mul(v, y);
      if (t.parent[w] != -2) continue;
      t.parent[w] = v;
      t.via[w] = conj_by[y];
      queue.push_back(w);
    }
  }
  return trees_.emplace(c, std::move(t)).first->second;
}

const std::vector<int>& Synthesizer::conjugators(int c, int target) {
  if (c == 0 && target != 0) throw SynthesisUnsupported("identity has no nontrivial conjugate products");
  Tree& t = tree(c);
  auto it = t.paths.find(target);
  if (it != t.paths.end()) return it->second;
  if (t.parent[target] == -2) throw StructuralError("target not reachable from conjugates");
  std::vector<int> xs;
  for (int v = target; v != 0; v = t.parent[v]) xs.push_back(t.via[v]);
  std::reverse(xs.begin(), xs.end());
  return t.paths.emplace(target, std::move(xs)).first->second;
}

int Synthesizer::shift(Program& prog, int node, int from, int to) {
  if (node == kEmpty || to == 0) return kEmpty;
  if (from == to) return node;
  const FiniteGroup& G = *G_;
  int acc = kEmpty;
  for (int x : conjugators(from, to)) {
    int term = prog.concat(prog.concat(prog.constant(x), node), prog.constant(G.inv(x)));
    acc = prog.concat(acc, term);
  }
  return acc;
}

namespace {

int apply_conjugators(const FiniteGroup& G, const std::vector<int>& xs, int v) {
  int acc = 0;
  for (int x : xs) acc = G.mul(acc, G.conj(x, v));
  return acc;
}

int first_noncommuting(const FiniteGroup& G, int v) {
  for (int d = 0; d < G.order(); ++d) {
    if (!G.commute(d, v)) return d;
  }
  throw StructuralError("element is central");
}

struct Valued {
  int node;
  int value;
};

// Builds delta skeletons and nested commutators inside one program so that
// shared pieces are emitted once.
class DeltaBuilder {
 public:
  DeltaBuilder(Synthesizer& syn, Program& prog) : syn_(syn), prog_(prog), G_(syn.group()) {}

  // Node equal to some v != 1 at b and to 1 on domain \ {b}.
  Valued skeleton(int slot, int b, std::span<const int> domain) {
    std::vector<int> key{slot, b};
    key.insert(key.end(), domain.begin(), domain.end());
    if (auto it = skeletons_.find(key); it != skeletons_.end()) return it->second;

    int x1 = -1;
    for (int g : domain) {
      if (g != b) {
        x1 = g;
        break;
      }
    }
    Valued out{};
    if (x1 < 0) {
      out = {prog_.constant(1), 1};
    } else {
      int node = prog_.concat(prog_.input(slot), prog_.constant(G_.inv(x1)));
      std::vector<int> val(domain.size());
      std::size_t bi = 0;
      for (std::size_t i = 0; i < domain.size(); ++i) {
        val[i] = G_.mul(domain[i], G_.inv(x1));
        if (domain[i] == b) bi = i;
      }
      for (;;) {
        std::size_t xi = domain.size();
        for (std::size_t i = 0; i < domain.size(); ++i) {
          if (domain[i] != b && val[i] != 0) {
            xi = i;
            break;
          }
        }
        if (xi == domain.size()) break;
        const int x = domain[xi];
        const int bx = G_.mul(b, G_.inv(x));
        const int d = first_noncommuting(G_, bx);
        const int vb = val[bi];
        std::vector<int> xs;
        if (vb != d) xs = syn_.conjugators(vb, d);
        const int q = syn_.shift(prog_, node, vb, d);
        const int r = prog_.concat(prog_.input(slot), prog_.constant(G_.inv(x)));
        node = prog_.commutator(q, r);
        for (std::size_t i = 0; i < domain.size(); ++i) {
          const int qv = vb == d ? val[i] : apply_conjugators(G_, xs, val[i]);
          val[i] = G_.comm(qv, G_.mul(domain[i], G_.inv(x)));
        }
      }
      out = {node, val[bi]};
    }
    skeletons_.emplace(std::move(key), out);
    return out;
  }

  // Node equal to some v != 1 on the tuple and 1 elsewhere in the domain product.
  Valued nested(std::span<const int> points, const std::vector<std::vector<int>>& domains) {
    std::vector<int> key(points.begin(), points.end());
    if (auto it = prefixes_.find(key); it != prefixes_.end()) return it->second;
    const int i = static_cast<int>(points.size()) - 1;
    Valued s = skeleton(i, points[i], domains[i]);
    Valued out{};
    if (i == 0) {
      out = s;
    } else {
      Valued r = nested(points.first(i), domains);
      if (G_.commute(r.value, s.value)) {
        const int d = first_noncommuting(G_, r.value);
        s = {syn_.shift(prog_, s.node, s.value, d), d};
      }
      out = {prog_.commutator(r.node, s.node), G_.comm(r.value, s.value)};
    }
    prefixes_.emplace(std::move(key), out);
    return out;
  }

  int delta(std::span<const int> points, int c, const std::vector<std::vector<int>>& domains) {
    if (c == 0) return kEmpty;
    Valued r = nested(points, domains);
    return syn_.shift(prog_, r.node, r.value, c);
  }

 private:
  Synthesizer& syn_;
  Program& prog_;
  const FiniteGroup& G_;
  std::map<std::vector<int>, Valued> skeletons_;
  std::map<std::vector<int>, Valued> prefixes_;
};

std::vector<int> all_elements(const FiniteGroup& G) {
  std::vector<int> v(G.order());
  for (int i = 0; i < G.order(); ++i) v[i] = i;
  return v;
}

}  // namespace

Program conjugate_product_expression(Synthesizer& syn, int c, int target) {
  if (c == 0) throw SynthesisUnsupported("c must not be the identity");
  Program p(1);
  p.set_root(syn.shift(p, p.input(0), c, target));
  p.compact();
  return p;
}

Program point_delta_on(Synthesizer& syn, int b, int c, std::span<const int> domain) {
  std::vector<std::vector<int>> domains{std::vector<int>(domain.begin(), domain.end())};
  const int pts[1] = {b};
  return multi_point_delta(syn, pts, c, &domains);
}

Program point_delta(Synthesizer& syn, int b, int c) {
  const auto all = all_elements(syn.group());
  return point_delta_on(syn, b, c, all);
}

Program multi_point_delta(Synthesizer& syn, std::span<const int> points, int c,
                          const std::vector<std::vector<int>>* domains) {
  const int n = static_cast<int>(points.size());
  if (n < 1) throw ArityMismatch("multi_point_delta needs at least one point");
  std::vector<std::vector<int>> full;
  if (!domains) {
    full.assign(n, all_elements(syn.group()));
    domains = &full;
  }
  if (static_cast<int>(domains->size()) != n) throw ArityMismatch("one domain per point");
  Program p(n);
  DeltaBuilder builder(syn, p);
  p.set_root(builder.delta(points, c, *domains));
  p.compact();
  return p;
}

Program synthesize_on(Synthesizer& syn, const std::vector<std::vector<int>>& domains,
                      const std::function<int(std::span<const int>)>& f) {
  const int n = static_cast<int>(domains.size());
  Program p(n);
  DeltaBuilder builder(syn, p);
  std::vector<std::size_t> digit(n, 0);
  std::vector<int> tuple(n);
  int acc = kEmpty;
  for (const auto& d : domains) {
    if (d.empty()) {
      p.set_root(kEmpty);
      return p;
    }
  }
  for (;;) {
    for (int i = 0; i < n; ++i) tuple[i] = domains[i][digit[i]];
    const int value = f(tuple);
    if (value < 0) throw MissingEntry("table has no value for a tuple");
    if (value != 0) acc = p.concat(acc, builder.delta(tuple, value, domains));
    int i = n - 1;
    while (i >= 0 && ++digit[i] == domains[i].size()) digit[i--] = 0;
    if (i < 0) break;
  }
  p.set_root(acc);
  p.compact();
  return p;
}

Program synthesize(Synthesizer& syn, int n, std::span<const int> table) {
  const FiniteGroup& G = syn.group();
  double expected = 1;
  for (int i = 0; i < n; ++i) expected *= G.order();
  if (static_cast<double>(table.size()) != expected) {
    throw MissingEntry("table has " + std::to_string(table.size()) + " entries, expected " +
                       std::to_string(static_cast<long long>(expected)));
  }
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (table[k] < 0 || table[k] >= G.order()) throw MissingEntry("missing entry at tuple " + std::to_string(k));
  }
  std::vector<std::vector<int>> domains(n, all_elements(G));
  return synthesize_on(syn, domains, [&](std::span<const int> t) {
    std::size_t k = 0;
    for (int x : t) k = k * G.order() + x;
    return table[k];
  });
}

Program toffoli_program(Synthesizer& syn, const QuditParams& q) {
  const FiniteGroup& G = syn.group();
  if (!valid_qudit_params(G, q)) throw NoSuchParameters("invalid qudit parameters");
  const auto basis = basis_fluxes(G, q);
  if (q.d != 2) {
    std::vector<std::vector<int>> domains{basis, basis};
    return synthesize_on(syn, domains, [&](std::span<const int> t) {
      const long i = std::find(basis.begin(), basis.end(), t[0]) - basis.begin();
      const long j = std::find(basis.begin(), basis.end(), t[1]) - basis.begin();
      return G.pow(q.a, (i * j) % q.d);
    });
  }
  // Commutator as logical AND: f = h2([g1 b^-1, h1(g2 b^-1)]).
  const int c = G.mul(basis[1], G.inv(q.b));
  int best_d = -1;
  std::size_t best_cost = 0;
  for (int d = 1; d < G.order(); ++d) {
    if (G.commute(c, d)) continue;
    const int e = G.comm(c, d);
    const std::size_t cost = syn.conjugators(c, d).size() + syn.conjugators(e, q.a).size();
    if (best_d < 0 || cost < best_cost) {
      best_d = d;
      best_cost = cost;
    }
  }
  const int e = G.comm(c, best_d);
  Program p(2);
  const int binv = p.constant(G.inv(q.b));
  const int u1 = p.concat(p.input(0), binv);
  const int u2 = p.concat(p.input(1), binv);
  const int h1 = syn.shift(p, u2, c, best_d);
  p.set_root(syn.shift(p, p.commutator(u1, h1), e, q.a));
  p.compact();
  return p;
}

Program xzero_program(Synthesizer& syn, const QuditParams& q) {
  const FiniteGroup& G = syn.group();
  if (!valid_qudit_params(G, q)) throw NoSuchParameters("invalid qudit parameters");
  const auto basis = basis_fluxes(G, q);
  const auto all = all_elements(G);
  std::vector<std::vector<int>> domains{all};
  return synthesize_on(syn, domains, [&](std::span<const int> t) {
    const auto it = std::find(basis.begin(), basis.end(), t[0]);
    if (it == basis.end()) return 0;
    return G.pow(q.a, it - basis.begin());
  });
}

}  // namespace fluxsim
