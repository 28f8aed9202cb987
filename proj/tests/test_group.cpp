#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "fluxsim/group.hpp"

using namespace fluxsim;

namespace {

// Brute-force reference: conjugacy class sizes by direct composition of perms.
std::multiset<int> brute_class_sizes(const FiniteGroup& G) {
  std::multiset<int> sizes;
  std::set<Perm> done;
  for (const Perm& g : G.elements()) {
    if (done.count(g)) continue;
    std::set<Perm> cls;
    for (const Perm& x : G.elements()) cls.insert(compose(compose(x, g), x.inverse()));
    done.insert(cls.begin(), cls.end());
    sizes.insert(static_cast<int>(cls.size()));
  }
  return sizes;
}

// Brute-force reference: every normal subgroup as a union of classes closed under products.
int brute_normal_subgroup_count(const FiniteGroup& G) {
  const auto& classes = G.classes();
  const int k = static_cast<int>(classes.size());
  int count = 0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    if (!(mask & 1u)) continue;
    std::vector<char> in(G.order(), 0);
    for (int c = 0; c < k; ++c) {
      if (mask & (1u << c)) {
        for (int g : classes[c]) in[g] = 1;
      }
    }
    bool closed = true;
    for (int a = 0; a < G.order() && closed; ++a) {
      if (!in[a]) continue;
      for (int b = 0; b < G.order() && closed; ++b) {
        if (in[b] && !in[G.mul(a, b)]) closed = false;
      }
    }
    count += closed;
  }
  return count;
}

}  // namespace

TEST_CASE("composition follows g(h(x))") {
  Perm c = parse_cycles("(3 4 5)", 5);
  REQUIRE(format_cycles(compose(c, c)) == "(3 5 4)");
  Perm id = Perm::identity(5);
  REQUIRE(compose(id, c) == c);
  Perm a = parse_cycles("(1 2)(3 4)", 5);
  REQUIRE(format_cycles(compose(compose(a, c), a.inverse())) == "(3 5 4)");
  REQUIRE(parse_cycles("(4 3 5)", 5) == parse_cycles("(3 5 4)", 5));
  REQUIRE_THROWS_AS(compose(Perm::identity(4), c), StructuralError);
}

TEST_CASE("cycle parser reports positions") {
  try {
    parse_group_spec("(1 2);(1 x)");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 1);
    REQUIRE(e.column() == 10);
  }
  REQUIRE_THROWS_AS(parse_group_spec("(1 2)\n(3 3)"), ParseError);
}

TEST_CASE("group laws on sampled elements") {
  std::mt19937_64 rng(7);
  for (auto G : {alternating_group(5), symmetric_group(4), sl25_group(), direct_product(*alternating_group(5), *alternating_group(5))}) {
    std::uniform_int_distribution<int> pick(0, G->order() - 1);
    REQUIRE(G->element(0).is_identity());
    for (int t = 0; t < 1000; ++t) {
      int a = pick(rng), b = pick(rng), c = pick(rng);
      REQUIRE(G->mul(G->mul(a, b), c) == G->mul(a, G->mul(b, c)));
      REQUIRE(G->mul(a, G->inv(a)) == 0);
      REQUIRE(G->element(G->mul(a, b)) == compose(G->element(a), G->element(b)));
    }
  }
}

TEST_CASE("conjugacy classes") {
  auto Z3 = parse_group_spec("(1 2 3)");
  REQUIRE(Z3->classes().size() == 3);
  auto A5 = alternating_group(5);
  std::multiset<int> sizes;
  for (const auto& c : A5->classes()) sizes.insert(static_cast<int>(c.size()));
  REQUIRE(sizes == std::multiset<int>{1, 12, 12, 15, 20});
  REQUIRE(sizes == brute_class_sizes(*A5));
  int b = A5->index_of(parse_cycles("(3 4 5)", 5));
  REQUIRE(A5->class_elements_of(b).size() == 20);
  for (auto G : {symmetric_group(4), sl25_group(), symmetric_group(5)}) {
    int total = 0;
    for (const auto& c : G->classes()) {
      REQUIRE(G->order() % static_cast<int>(c.size()) == 0);
      total += static_cast<int>(c.size());
    }
    REQUIRE(total == G->order());
    REQUIRE(brute_class_sizes(*G).size() == G->classes().size());
  }
}

TEST_CASE("derived series") {
  auto S4 = symmetric_group(4);
  auto s = derived_series(*S4);
  std::vector<int> orders;
  for (const auto& H : s) orders.push_back(H.size());
  REQUIRE(orders == std::vector<int>{24, 12, 4, 1});
  for (std::size_t i = 1; i < s.size(); ++i) {
    REQUIRE(is_normal(*S4, s[i], s[i - 1]));
    REQUIRE(is_normal(*S4, s[i], s[0]));
  }
  auto A5 = alternating_group(5);
  auto sa = derived_series(*A5);
  REQUIRE(sa.size() == 2);
  REQUIRE(sa[0].size() == 60);
  REQUIRE(sa[1].size() == 60);
  auto Z6 = cyclic_group(6);
  auto sz = derived_series(*Z6);
  REQUIRE(sz.size() == 2);
  REQUIRE(sz[1].size() == 1);
  REQUIRE(is_solvable(*S4));
  REQUIRE_FALSE(is_solvable(*A5));
  REQUIRE(is_perfect(*A5));
}

TEST_CASE("simplicity") {
  REQUIRE(is_simple(*alternating_group(5)));
  REQUIRE_FALSE(is_simple(*symmetric_group(5)));
  REQUIRE_FALSE(is_simple(*cyclic_group(1)));
  REQUIRE(is_simple(*cyclic_group(5)));
  for (auto G : {alternating_group(4), symmetric_group(4), alternating_group(5), cyclic_group(6), sl25_group(),
                 symmetric_group(5), parse_group_spec("(1 2 3 4 5 6 7)"), parse_group_spec("(1 2)(3 4);(1 3)")}) {
    const int brute = brute_normal_subgroup_count(*G);
    const bool brute_simple = G->order() > 1 && brute == 2;
    REQUIRE(is_simple(*G) == brute_simple);
    REQUIRE(static_cast<int>(normal_subgroups(*G, whole_group(*G)).size()) == brute);
  }
}

TEST_CASE("simple perfect quotient") {
  auto check = [](const GroupPtr& G, int p_order, int n_order) {
    CosetContext ctx = simple_perfect_quotient(G);
    REQUIRE(ctx.P.size() == p_order);
    REQUIRE(ctx.N.size() == n_order);
    REQUIRE(ctx.quotient->order() == 60);
    REQUIRE(ctx.quotient->degree() <= 32);
    REQUIRE(is_perfect(*ctx.quotient));
    REQUIRE(is_simple(*ctx.quotient));
    REQUIRE(is_normal(*G, ctx.P, whole_group(*G)));
    REQUIRE(is_normal(*G, ctx.N, ctx.P));
    for (int p : ctx.P.members) {
      REQUIRE((ctx.epi[p] == 0) == ctx.N.contains(p));
    }
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(0, ctx.P.size() - 1);
    const bool exhaustive = ctx.P.size() <= 400;
    const int trials = exhaustive ? ctx.P.size() * ctx.P.size() : 20000;
    for (int t = 0; t < trials; ++t) {
      int x = exhaustive ? ctx.P.members[t / ctx.P.size()] : ctx.P.members[pick(rng)];
      int y = exhaustive ? ctx.P.members[t % ctx.P.size()] : ctx.P.members[pick(rng)];
      REQUIRE(ctx.epi[G->mul(x, y)] == ctx.quotient->mul(ctx.epi[x], ctx.epi[y]));
    }
  };
  check(symmetric_group(5), 60, 1);
  check(direct_product(*alternating_group(5), *alternating_group(5)), 3600, 60);
  check(sl25_group(), 120, 2);
  REQUIRE_THROWS_AS(simple_perfect_quotient(symmetric_group(4)), SolvableGroup);
}

TEST_CASE("qudit parameters") {
  auto A5 = alternating_group(5);
  auto q2 = find_qudit_params(*A5, 2);
  REQUIRE(A5->format(q2.a) == "(1 2)(3 4)");
  REQUIRE(A5->format(q2.b) == "(3 4 5)");
  REQUIRE(find_qudit_params(*A5).a == q2.a);
  auto q3 = find_qudit_params(*A5, 3);
  REQUIRE(A5->format(q3.a) == "(1 2 3)");
  REQUIRE(A5->format(q3.b) == "(3 4 5)");
  std::set<std::string> basis;
  for (int x : basis_fluxes(*A5, q3)) basis.insert(A5->format(x));
  REQUIRE(basis == std::set<std::string>{"(3 4 5)", "(1 4 5)", "(2 4 5)"});
  REQUIRE_THROWS_AS(find_qudit_params(*A5, 7), NoSuchParameters);
}

TEST_CASE("named groups") {
  REQUIRE(resolve_group("A5")->order() == 60);
  REQUIRE(resolve_group("S4")->order() == 24);
  REQUIRE(resolve_group("A5xA5")->order() == 3600);
  REQUIRE(resolve_group("SL25")->order() == 120);
  REQUIRE(resolve_group("(1 2 3 4 5);(1 2 3)")->order() == 60);
  REQUIRE_THROWS_AS(alternating_group(8), GroupTooLarge);
}
