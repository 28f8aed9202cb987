#include <sstream>
#include <unordered_map>

#include "fluxsim/program.hpp"
#include "fluxsim/text.hpp"

namespace fluxsim {

namespace {

using namespace text;

int parse_slot(std::string_view tok, int arity, int line, int column) {
  int slot = parse_int(tok, line, column);
  if (slot < 0 || slot >= arity) throw ParseError("input slot exceeds arity", line, column);
  return slot;
}

}  // namespace

std::string format_word(const FiniteGroup& G, std::span<const Atom> word) {
  std::ostringstream out;
  for (const Atom& a : word) {
    switch (a.kind) {
      case AtomKind::Constant: out << "const " << G.format(a.value) << '\n'; break;
      case AtomKind::Input: out << "in " << a.value << '\n'; break;
      case AtomKind::InputInverse: out << "inv " << a.value << '\n'; break;
    }
  }
  return out.str();
}

std::vector<Atom> parse_word(const FiniteGroup& G, std::string_view text, int arity) {
  std::vector<Atom> word;
  for (const Line& l : content_lines(text)) {
    std::size_t pos = 0;
    int col = 0;
    std::string_view op = next_token(l.text, pos, col);
    if (op == "const") {
      int rest_col = static_cast<int>(pos) + 1;
      word.push_back({AtomKind::Constant, parse_element(G, l.text.substr(pos), l.number, rest_col)});
      continue;
    }
    if (op != "in" && op != "inv") throw ParseError("unknown atom '" + std::string(op) + "'", l.number, col);
    std::string_view tok = next_token(l.text, pos, col);
    int slot = parse_slot(tok, arity, l.number, col);
    if (!next_token(l.text, pos, col).empty()) throw ParseError("trailing input", l.number, col);
    word.push_back({op == "in" ? AtomKind::Input : AtomKind::InputInverse, slot});
  }
  return word;
}

std::string format_dag(const FiniteGroup& G, const Program& p) {
  Program c = p;
  c.compact();
  std::ostringstream out;
  const auto& nodes = c.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    out << "let n" << i << " = ";
    switch (n.kind) {
      case NodeKind::Constant: out << "const " << G.format(n.lhs); break;
      case NodeKind::Input: out << "in " << n.lhs; break;
      case NodeKind::InputInverse: out << "inv " << n.lhs; break;
      case NodeKind::Concat: out << "concat n" << n.lhs << " n" << n.rhs; break;
      case NodeKind::Inverse: out << "inverse n" << n.lhs; break;
      case NodeKind::Commutator: out << "comm n" << n.lhs << " n" << n.rhs; break;
    }
    out << '\n';
  }
  if (c.root() == kEmpty) {
    out << "root empty\n";
  } else {
    out << "root n" << c.root() << '\n';
  }
  return out.str();
}

Program parse_dag(const FiniteGroup& G, std::string_view text, int arity) {
  Program p(arity);
  std::unordered_map<std::string, int> names;
  bool rooted = false;
  auto ref = [&](std::string_view tok, int line, int col) {
    if (tok == "empty") return kEmpty;
    auto it = names.find(std::string(tok));
    if (it == names.end()) throw ParseError("undefined node '" + std::string(tok) + "'", line, col);
    return it->second;
  };
  for (const Line& l : content_lines(text)) {
    if (rooted) throw ParseError("content after root", l.number, 1);
    std::size_t pos = 0;
    int col = 0;
    std::string_view kw = next_token(l.text, pos, col);
    if (kw == "root") {
      std::string_view tok = next_token(l.text, pos, col);
      p.set_root(ref(tok, l.number, col));
      rooted = true;
      continue;
    }
    if (kw != "let") throw ParseError("expected 'let' or 'root'", l.number, col);
    std::string_view name = next_token(l.text, pos, col);
    if (name.empty()) throw ParseError("missing node name", l.number, col);
    const int name_col = col;
    if (next_token(l.text, pos, col) != "=") throw ParseError("expected '='", l.number, col);
    std::string_view op = next_token(l.text, pos, col);
    int node = kEmpty;
    if (op == "const") {
      node = p.constant(parse_element(G, l.text.substr(pos), l.number, static_cast<int>(pos) + 1));
      pos = l.text.size();
    } else if (op == "in" || op == "inv") {
      std::string_view tok = next_token(l.text, pos, col);
      int slot = parse_slot(tok, arity, l.number, col);
      node = op == "in" ? p.input(slot) : p.input_inverse(slot);
    } else if (op == "concat" || op == "comm") {
      std::string_view a = next_token(l.text, pos, col);
      int x = ref(a, l.number, col);
      std::string_view b = next_token(l.text, pos, col);
      int y = ref(b, l.number, col);
      node = op == "concat" ? p.concat(x, y) : p.commutator(x, y);
    } else if (op == "inverse") {
      std::string_view a = next_token(l.text, pos, col);
      node = p.inverse(ref(a, l.number, col));
    } else {
      throw ParseError("unknown node kind '" + std::string(op) + "'", l.number, col);
    }
    if (!next_token(l.text, pos, col).empty()) throw ParseError("trailing input", l.number, col);
    if (!names.emplace(std::string(name), node).second) throw ParseError("node redefined", l.number, name_col);
  }
  if (!rooted) throw ParseError("missing root line", static_cast<int>(content_lines(text).size()) + 1, 1);
  p.compact();
  return p;
}

}  // namespace fluxsim

namespace fluxsim {

namespace {

using namespace text;

// Element written in cycle notation somewhere inside `line`.
int element_at(const FiniteGroup& G, const Line& l, std::size_t begin, std::size_t end) {
  std::string_view piece = l.text.substr(begin, end - begin);
  std::size_t lead = 0;
  while (lead < piece.size() && std::isspace(static_cast<unsigned char>(piece[lead]))) ++lead;
  const int column = static_cast<int>(begin + lead) + 1;
  if (lead == piece.size()) throw ParseError("missing element", l.number, column);
  return parse_element(G, piece.substr(lead), l.number, column);
}

}  // namespace

FunctionTable parse_table(const FiniteGroup& G, std::string_view text) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw ParseError("empty table", 1, 1);
  std::size_t pos = 0;
  int col = 0;
  const Line& head = lines.front();
  if (next_token(head.text, pos, col) != "arity") throw ParseError("expected 'arity'", head.number, col);
  const std::string_view tok = next_token(head.text, pos, col);
  FunctionTable t;
  t.arity = parse_int(tok, head.number, col);
  if (t.arity < 1) throw ParseError("arity must be positive", head.number, col);
  if (!next_token(head.text, pos, col).empty()) throw ParseError("trailing input", head.number, col);
  double size = 1;
  for (int i = 0; i < t.arity; ++i) size *= G.order();
  if (size > 1e7) throw ParseError("table would have more than 10^7 entries", head.number, col);

  int fallback = -1;
  t.values.assign(static_cast<std::size_t>(size), -1);
  std::vector<int> defined_at(t.values.size(), 0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& l = lines[i];
    pos = 0;
    const std::string_view first = next_token(l.text, pos, col);
    if (first == "default") {
      if (fallback >= 0) throw ParseError("second default line", l.number, col);
      fallback = element_at(G, l, pos, l.text.size());
      continue;
    }
    const std::size_t arrow = l.text.find("->");
    if (arrow == std::string_view::npos) throw ParseError("expected '->'", l.number, static_cast<int>(l.text.size()) + 1);
    std::size_t key = 0;
    std::size_t begin = 0;
    for (int slot = 0; slot < t.arity; ++slot) {
      std::size_t end = slot + 1 < t.arity ? l.text.find(';', begin) : arrow;
      if (end == std::string_view::npos || end > arrow) {
        throw ParseError("expected " + std::to_string(t.arity) + " inputs", l.number, static_cast<int>(arrow) + 1);
      }
      key = key * G.order() + element_at(G, l, begin, end);
      begin = end + 1;
    }
    if (l.text.substr(0, arrow).find(';', begin) != std::string_view::npos) {
      throw ParseError("expected " + std::to_string(t.arity) + " inputs", l.number, static_cast<int>(begin) + 1);
    }
    if (defined_at[key]) {
      throw ParseError("tuple already given on line " + std::to_string(defined_at[key]), l.number, 1);
    }
    t.values[key] = element_at(G, l, arrow + 2, l.text.size());
    defined_at[key] = l.number;
  }

  std::size_t missing = 0;
  std::size_t first_missing = 0;
  for (std::size_t k = 0; k < t.values.size(); ++k) {
    if (t.values[k] >= 0) continue;
    if (fallback >= 0) {
      t.values[k] = fallback;
    } else if (missing++ == 0) {
      first_missing = k;
    }
  }
  if (missing > 0) {
    std::string tuple;
    for (int slot = t.arity - 1; slot >= 0; --slot) {
      const int x = static_cast<int>(first_missing % G.order());
      first_missing /= G.order();
      tuple = G.format(x) + (tuple.empty() ? "" : " ; ") + tuple;
    }
    throw MissingEntry(std::to_string(missing) + " tuples have no line and the table has no default line (lines " +
                       std::to_string(head.number) + "-" + std::to_string(lines.back().number) +
                       "); first missing: " + tuple);
  }
  return t;
}

std::string format_table(const FiniteGroup& G, const FunctionTable& t) {
  std::ostringstream out;
  out << "arity " << t.arity << "\ndefault ()\n";
  std::vector<int> digits(t.arity);
  for (std::size_t k = 0; k < t.values.size(); ++k) {
    if (t.values[k] == G.identity()) continue;
    std::size_t r = k;
    for (int slot = t.arity - 1; slot >= 0; --slot) {
      digits[slot] = static_cast<int>(r % G.order());
      r /= G.order();
    }
    for (int slot = 0; slot < t.arity; ++slot) out << (slot ? " ; " : "") << G.format(digits[slot]);
    out << " -> " << G.format(t.values[k]) << '\n';
  }
  return out.str();
}

}  // namespace fluxsim
