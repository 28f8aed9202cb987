#include <catch_amalgamated.hpp>

#include <random>

#include "fluxsim/synth.hpp"

using namespace fluxsim;

namespace {

struct A5Fixture {
  GroupPtr G = alternating_group(5);
  int el(const char* cycles) const { return G->index_of(parse_cycles(cycles, 5)); }
};

Program random_program(std::mt19937_64& rng, int arity, int order, int size) {
  Program p(arity);
  std::vector<int> ids;
  std::uniform_int_distribution<int> kind(0, 5);
  for (int i = 0; i < size; ++i) {
    int k = ids.size() < 2 ? kind(rng) % 3 : kind(rng);
    auto pick = [&] { return ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)]; };
    int node = kEmpty;
    switch (k) {
      case 0: node = p.constant(std::uniform_int_distribution<int>(1, order - 1)(rng)); break;
      case 1: node = p.input(std::uniform_int_distribution<int>(0, arity - 1)(rng)); break;
      case 2: node = p.input_inverse(std::uniform_int_distribution<int>(0, arity - 1)(rng)); break;
      case 3: node = p.concat(pick(), pick()); break;
      case 4: node = p.inverse(pick()); break;
      default: node = p.commutator(pick(), pick()); break;
    }
    if (node != kEmpty) ids.push_back(node);
  }
  p.set_root(ids.back());
  return p;
}

}  // namespace

TEST_CASE_METHOD(A5Fixture, "evaluation of small words") {
  Program k(1);
  k.set_root(k.constant(el("(1 2 3)")));
  int env1[1] = {el("(3 4 5)")};
  REQUIRE(k.evaluate(*G, env1) == el("(1 2 3)"));

  Program w(2);
  w.set_root(w.commutator(w.input(0), w.input(1)));
  Perm x = parse_cycles("(3 4 5)", 5), y = parse_cycles("(2 3 4)", 5);
  Perm expect = compose(compose(x, y), compose(x.inverse(), y.inverse()));
  int env2[2] = {el("(3 4 5)"), el("(2 3 4)")};
  REQUIRE(G->element(w.evaluate(*G, env2)) == expect);
  REQUIRE_THROWS_AS(w.evaluate(*G, env1), ArityMismatch);
}

TEST_CASE_METHOD(A5Fixture, "dag and flattened evaluation agree") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    Program p = random_program(rng, 2, G->order(), 12);
    Program q = random_program(rng, 2, G->order(), 12);
    auto word = p.flatten(*G);
    Program joined(2);
    int l = joined.graft(p);
    int r = joined.graft(q);
    joined.set_root(joined.concat(l, r));
    for (int s = 0; s < 20; ++s) {
      int env[2] = {std::uniform_int_distribution<int>(0, 59)(rng), std::uniform_int_distribution<int>(0, 59)(rng)};
      REQUIRE(evaluate_word(*G, word, env) == p.evaluate(*G, env));
      REQUIRE(joined.evaluate(*G, env) == G->mul(p.evaluate(*G, env), q.evaluate(*G, env)));
    }
  }
}

TEST_CASE_METHOD(A5Fixture, "text formats round trip") {
  std::mt19937_64 rng(5);
  Program p = random_program(rng, 2, G->order(), 15);
  Program back = parse_dag(*G, format_dag(*G, p), 2);
  auto word = parse_word(*G, format_word(*G, p.flatten(*G)), 2);
  for (int a = 0; a < 60; a += 7) {
    for (int b = 0; b < 60; b += 5) {
      int env[2] = {a, b};
      REQUIRE(back.evaluate(*G, env) == p.evaluate(*G, env));
      REQUIRE(evaluate_word(*G, word, env) == p.evaluate(*G, env));
    }
  }
  try {
    parse_word(*G, "in 0\nconst (1 2)\n", 1);
    FAIL("odd permutation accepted");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 2);
  }
  REQUIRE_THROWS_AS(parse_word(*G, "in 3\n", 2), ParseError);
  REQUIRE(format_dag(*G, Program(1)) == "root empty\n");
}

TEST_CASE_METHOD(A5Fixture, "conjugate product expressions") {
  Synthesizer syn(G);
  int c = el("(3 4 5)");
  Program id = conjugate_product_expression(syn, c, 0);
  REQUIRE(id.empty());
  int e = el("(2 5)(3 4)"), a = el("(1 2)(3 4)");
  Program one = conjugate_product_expression(syn, e, a);
  REQUIRE(one.flatten(*G).size() == 3);
  for (int target = 0; target < 60; ++target) {
    Program h = conjugate_product_expression(syn, c, target);
    int env[1] = {c};
    int unit[1] = {0};
    REQUIRE(h.evaluate(*G, env) == target);
    REQUIRE(h.evaluate(*G, unit) == 0);
  }
  Program two = conjugate_product_expression(syn, c, a);
  int atoms = 0;
  for (const Atom& at : two.flatten(*G)) atoms += at.kind == AtomKind::Input;
  REQUIRE(atoms >= 2);
  REQUIRE_THROWS_AS(Synthesizer(symmetric_group(5)), SynthesisUnsupported);
}

TEST_CASE_METHOD(A5Fixture, "point deltas") {
  Synthesizer syn(G);
  int b = el("(3 4 5)"), c = el("(1 2)(3 4)");
  Program trivial = point_delta(syn, b, 0);
  REQUIRE(trivial.empty());
  Program d = point_delta(syn, b, c);
  for (int g = 0; g < 60; ++g) {
    int env[1] = {g};
    REQUIRE(d.evaluate(*G, env) == (g == b ? c : 0));
  }
  REQUIRE(d.flattened_length() > 1e6);
  for (int target = 1; target < 60; target += 9) {
    Program s = point_delta(syn, 0, target);
    for (int g = 0; g < 60; ++g) {
      int env[1] = {g};
      REQUIRE(s.evaluate(*G, env) == (g == 0 ? target : 0));
    }
  }
}

TEST_CASE_METHOD(A5Fixture, "multi point deltas") {
  Synthesizer syn(G);
  int pts[2] = {el("(3 4 5)"), el("(3 5 4)")};
  int c = el("(1 2)(3 4)");
  Program d = multi_point_delta(syn, pts, c);
  for (int g = 0; g < 60; ++g) {
    for (int h = 0; h < 60; ++h) {
      int env[2] = {g, h};
      REQUIRE(d.evaluate(*G, env) == (g == pts[0] && h == pts[1] ? c : 0));
    }
  }
  Program single = multi_point_delta(syn, std::span<const int>(pts, 1), c);
  for (int g = 0; g < 60; ++g) {
    int env[1] = {g};
    REQUIRE(single.evaluate(*G, env) == (g == pts[0] ? c : 0));
  }
}

TEST_CASE_METHOD(A5Fixture, "synthesis from tables") {
  Synthesizer syn(G);
  std::vector<int> ones(60, 0);
  REQUIRE(synthesize(syn, 1, ones).empty());
  std::mt19937_64 rng(99);
  std::vector<int> table(60);
  for (auto& v : table) v = std::uniform_int_distribution<int>(0, 59)(rng);
  Program p = synthesize(syn, 1, table);
  for (int g = 0; g < 60; ++g) {
    int env[1] = {g};
    REQUIRE(p.evaluate(*G, env) == table[g]);
  }
  table[17] = -1;
  REQUIRE_THROWS_AS(synthesize(syn, 1, table), MissingEntry);
  REQUIRE_THROWS_AS(synthesize(syn, 2, ones), MissingEntry);
}

TEST_CASE_METHOD(A5Fixture, "qubit toffoli word") {
  Synthesizer syn(G);
  QuditParams q = find_qudit_params(*G, 2);
  Program f = toffoli_program(syn, q);
  auto word = f.flatten(*G);
  REQUIRE(word.size() == 9);
  auto basis = basis_fluxes(*G, q);
  REQUIRE(G->format(basis[1]) == "(3 5 4)");
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      int env[2] = {basis[i], basis[j]};
      REQUIRE(f.evaluate(*G, env) == (i == 1 && j == 1 ? q.a : 0));
    }
  }
  // The intermediate values required by the construction.
  int c = G->mul(basis[1], G->inv(q.b));
  REQUIRE(c != 0);
  Program table_f = synthesize_on(syn, {basis, basis}, [&](std::span<const int> t) {
    return t[0] == basis[1] && t[1] == basis[1] ? q.a : 0;
  });
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      int env[2] = {basis[i], basis[j]};
      REQUIRE(table_f.evaluate(*G, env) == f.evaluate(*G, env));
    }
  }
}

TEST_CASE_METHOD(A5Fixture, "qutrit toffoli and xzero functions") {
  Synthesizer syn(G);
  QuditParams q = find_qudit_params(*G, 3);
  Program f = toffoli_program(syn, q);
  auto basis = basis_fluxes(*G, q);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      int env[2] = {basis[i], basis[j]};
      REQUIRE(f.evaluate(*G, env) == G->pow(q.a, (i * j) % 3));
    }
  }
  Program x = xzero_program(syn, q);
  for (int g = 0; g < 60; ++g) {
    int env[1] = {g};
    auto it = std::find(basis.begin(), basis.end(), g);
    int expect = it == basis.end() ? 0 : G->pow(q.a, it - basis.begin());
    REQUIRE(x.evaluate(*G, env) == expect);
  }
}

TEST_CASE_METHOD(A5Fixture, "table files") {
  const auto t = parse_table(*G,
                             "# delta at (1 2 3)\n"
                             "arity 1\n"
                             "default ()\n"
                             "(1 2 3) -> (1 2)(3 4)\n");
  REQUIRE(t.arity == 1);
  REQUIRE(t.values.size() == 60);
  for (int g = 0; g < 60; ++g) REQUIRE(t.values[g] == (g == el("(1 2 3)") ? el("(1 2)(3 4)") : 0));
  REQUIRE(parse_table(*G, format_table(*G, t)).values == t.values);

  std::mt19937_64 rng(3);
  FunctionTable two{2, std::vector<int>(3600)};
  for (int& v : two.values) v = static_cast<int>(rng() % 60);
  const auto back = parse_table(*G, format_table(*G, two));
  REQUIRE(back.arity == 2);
  REQUIRE(back.values == two.values);

  const auto pair = parse_table(*G, "arity 2\ndefault (1 2 3)\n() ; (3 4 5) -> ()\n");
  REQUIRE(pair.values[el("(3 4 5)")] == 0);
  REQUIRE(pair.values[el("(3 4 5)") * 60] == el("(1 2 3)"));
}

TEST_CASE_METHOD(A5Fixture, "table file errors") {
  REQUIRE_THROWS_AS(parse_table(*G, "arity 1\n(1 2 3) -> ()\n"), MissingEntry);
  try {
    parse_table(*G, "arity 1\n(1 2 3) -> ()\n");
  } catch (const MissingEntry& e) {
    REQUIRE(std::string(e.what()).find("59 tuples") != std::string::npos);
    REQUIRE(std::string(e.what()).find("first missing: ()") != std::string::npos);
  }
  auto parse_error_at = [&](const char* text, int line, int column) {
    try {
      parse_table(*G, text);
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      CHECK(e.column() == column);
    }
  };
  parse_error_at("arity 1\ndefault ()\n(1 2 3) -> ()\n(1 2 3) -> (1 2 3)\n", 4, 1);
  parse_error_at("arity 2\ndefault ()\n(1 2 3) -> ()\n", 3, 9);
  parse_error_at("arity 1\ndefault ()\n() ; () -> ()\n", 3, 4);
  parse_error_at("arity 1\ndefault ()\n(1 2) -> ()\n", 3, 1);
  parse_error_at("arity 1\ndefault ()\n(1 2 3)\n", 3, 8);
  parse_error_at("arty 1\n", 1, 1);
  parse_error_at("arity 0\n", 1, 7);
}
