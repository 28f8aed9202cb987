#include <algorithm>
#include <cctype>
#include <string>

#include "fluxsim/group.hpp"

namespace fluxsim {

namespace {

Perm from_images(std::vector<int> im) {
  std::vector<std::uint8_t> v(im.begin(), im.end());
  return Perm(std::move(v));
}

Perm cycle_perm(int degree, const std::vector<int>& points) {
  std::vector<int> im(degree);
  for (int i = 0; i < degree; ++i) im[i] = i;
  for (std::size_t i = 0; i < points.size(); ++i) im[points[i]] = points[(i + 1) % points.size()];
  return from_images(std::move(im));
}

void check_n(int n, int max_n, const char* what) {
  if (n < 1 || n > max_n) throw StructuralError(std::string(what) + ": n out of range");
}

}  // namespace

GroupPtr cyclic_group(int n) {
  check_n(n, kMaxDegree, "cyclic");
  std::vector<int> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = i;
  return FiniteGroup::generate({cycle_perm(n, pts)}, n);
}

GroupPtr symmetric_group(int n) {
  check_n(n, 8, "symmetric");
  if (n == 1) return FiniteGroup::generate({}, 1);
  std::vector<int> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = i;
  return FiniteGroup::generate({cycle_perm(n, {0, 1}), cycle_perm(n, pts)}, n);
}

GroupPtr alternating_group(int n) {
  check_n(n, 8, "alternating");
  std::vector<Perm> gens;
  for (int k = 2; k < n; ++k) gens.push_back(cycle_perm(n, {0, 1, k}));
  return FiniteGroup::generate(gens, n);
}

GroupPtr direct_product(const FiniteGroup& G, const FiniteGroup& H) {
  const int k = G.degree() + H.degree();
  if (k > kMaxDegree) throw StructuralError("direct product degree exceeds 32");
  std::vector<Perm> gens;
  for (int s : G.generators()) {
    std::vector<int> im(k);
    for (int i = 0; i < k; ++i) im[i] = i < G.degree() ? G.element(s)[i] : i;
    gens.push_back(from_images(std::move(im)));
  }
  for (int s : H.generators()) {
    std::vector<int> im(k);
    for (int i = 0; i < k; ++i) im[i] = i < G.degree() ? i : G.degree() + H.element(s)[i - G.degree()];
    gens.push_back(from_images(std::move(im)));
  }
  return FiniteGroup::generate(gens, k);
}

GroupPtr sl25_group() {
  // Nonzero vectors (x, y) of F5^2 in lexicographic order.
  std::vector<std::pair<int, int>> vecs;
  for (int x = 0; x < 5; ++x) {
    for (int y = 0; y < 5; ++y) {
      if (x || y) vecs.emplace_back(x, y);
    }
  }
  auto index = [&](int x, int y) {
    return static_cast<int>(std::find(vecs.begin(), vecs.end(), std::make_pair(x, y)) - vecs.begin());
  };
  auto matrix_perm = [&](int a, int b, int c, int d) {
    std::vector<int> im(vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      auto [x, y] = vecs[i];
      im[i] = index((a * x + b * y) % 5, (c * x + d * y) % 5);
    }
    return from_images(std::move(im));
  };
  return FiniteGroup::generate({matrix_perm(1, 1, 0, 1), matrix_perm(0, 4, 1, 0)}, 24);
}

GroupPtr parse_group_spec(std::string_view text) {
  struct Piece {
    std::string_view text;
    int line;
    int column;
  };
  std::vector<Piece> pieces;
  int line = 1;
  int col = 1;
  std::size_t start = 0;
  int start_line = 1;
  int start_col = 1;
  int degree = 1;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const char ch = i < text.size() ? text[i] : ';';
    if (ch == ';' || ch == '\n') {
      pieces.push_back({text.substr(start, i - start), start_line, start_col});
      start = i + 1;
      if (ch == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      start_line = line;
      start_col = col;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      long v = 0;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])) && v <= 1000) {
        v = v * 10 + (text[j] - '0');
        ++j;
      }
      if (v > kMaxDegree) throw ParseError("point exceeds 32", line, col);
      degree = std::max<int>(degree, static_cast<int>(v));
      col += static_cast<int>(j - i);
      i = j - 1;
      continue;
    }
    if (ch != '(' && ch != ')' && ch != ',' && !std::isspace(static_cast<unsigned char>(ch))) {
      throw ParseError(std::string("unexpected character '") + ch + "'", line, col);
    }
    ++col;
  }
  std::vector<Perm> gens;
  for (const auto& p : pieces) {
    bool blank = std::all_of(p.text.begin(), p.text.end(),
                             [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (blank) continue;
    try {
      gens.push_back(parse_cycles(p.text, degree));
    } catch (const ParseError& e) {
      throw ParseError("malformed generator", p.line, p.column + e.column() - 1);
    }
  }
  return FiniteGroup::generate(gens, degree);
}

GroupPtr resolve_group(std::string_view text) {
  auto trimmed = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trimmed(text);
  if (text.find('(') != std::string_view::npos && text != "SL(2,5)") return parse_group_spec(text);

  std::string name(text);
  std::vector<GroupPtr> factors;
  std::size_t pos = 0;
  while (pos <= name.size()) {
    std::size_t x = name.find('x', pos);
    std::string part = name.substr(pos, x == std::string::npos ? std::string::npos : x - pos);
    if (part == "SL25" || part == "SL(2,5)") {
      factors.push_back(sl25_group());
    } else if (part.size() >= 2 && std::all_of(part.begin() + 1, part.end(), ::isdigit)) {
      const int n = std::stoi(part.substr(1));
      switch (part[0]) {
        case 'A': factors.push_back(alternating_group(n)); break;
        case 'S': factors.push_back(symmetric_group(n)); break;
        case 'Z':
        case 'C': factors.push_back(cyclic_group(n)); break;
        default: throw ParseError("unknown group name '" + part + "'", 1, static_cast<int>(pos) + 1);
      }
    } else {
      throw ParseError("unknown group name '" + part + "'", 1, static_cast<int>(pos) + 1);
    }
    if (x == std::string::npos) break;
    pos = x + 1;
  }
  GroupPtr G = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) G = direct_product(*G, *factors[i]);
  return G;
}

}  // namespace fluxsim
