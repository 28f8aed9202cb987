#include <algorithm>
#include <cctype>
#include <sstream>

#include "fluxsim/group.hpp"

namespace fluxsim {

Perm::Perm(std::vector<std::uint8_t> images) : images_(std::move(images)) {
  const int k = degree();
  if (k < 1 || k > kMaxDegree) {
    throw StructuralError("permutation degree must lie in [1, 32]");
  }
  std::vector<char> seen(k, 0);
  for (auto x : images_) {
    if (x >= k || seen[x]) throw StructuralError("image tuple is not a bijection");
    seen[x] = 1;
  }
}

Perm Perm::identity(int degree) {
  std::vector<std::uint8_t> im(degree);
  for (int i = 0; i < degree; ++i) im[i] = static_cast<std::uint8_t>(i);
  return Perm(std::move(im));
}

Perm Perm::inverse() const {
  std::vector<std::uint8_t> im(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) im[images_[i]] = static_cast<std::uint8_t>(i);
  Perm p;
  p.images_ = std::move(im);
  return p;
}

bool Perm::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

Perm compose(const Perm& g, const Perm& h) {
  if (g.degree() != h.degree()) throw StructuralError("degree mismatch in compose");
  std::vector<std::uint8_t> im(g.degree());
  for (int x = 0; x < g.degree(); ++x) im[x] = static_cast<std::uint8_t>(g[h[x]]);
  return Perm(std::move(im));
}

namespace {

std::vector<std::vector<int>> cycles_of(const Perm& p) {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(p.degree(), 0);
  for (int start = 0; start < p.degree(); ++start) {
    if (seen[start] || p[start] == start) continue;
    std::vector<int> cyc;
    for (int x = start; !seen[x]; x = p[x]) {
      seen[x] = 1;
      cyc.push_back(x);
    }
    out.push_back(std::move(cyc));
  }
  return out;
}

}  // namespace

Perm parse_cycles(std::string_view text, int degree) {
  std::vector<std::uint8_t> im(degree);
  for (int i = 0; i < degree; ++i) im[i] = static_cast<std::uint8_t>(i);
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg) { throw ParseError(msg, 1, static_cast<int>(pos) + 1); };
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  while (pos < text.size()) {
    if (text[pos] != '(') fail("expected '('");
    ++pos;
    std::vector<int> cyc;
    for (;;) {
      skip_ws();
      if (pos >= text.size()) fail("unterminated cycle");
      if (text[pos] == ')') {
        ++pos;
        break;
      }
      if (text[pos] == ',') {
        ++pos;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(text[pos]))) fail("expected point number");
      std::size_t start = pos;
      long v = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        v = v * 10 + (text[pos] - '0');
        if (v > 1000) break;
        ++pos;
      }
      if (v < 1 || v > degree) {
        pos = start;
        fail("point out of range");
      }
      cyc.push_back(static_cast<int>(v - 1));
    }
    std::vector<char> in_cycle(degree, 0);
    for (int x : cyc) {
      if (in_cycle[x]) fail("repeated point in cycle");
      in_cycle[x] = 1;
    }
    // Cycles compose right to left, like the product notation they denote.
    std::vector<std::uint8_t> c(degree);
    for (int i = 0; i < degree; ++i) c[i] = static_cast<std::uint8_t>(i);
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      c[cyc[i]] = static_cast<std::uint8_t>(cyc[(i + 1) % cyc.size()]);
    }
    std::vector<std::uint8_t> next(degree);
    for (int x = 0; x < degree; ++x) next[x] = im[c[x]];
    im = std::move(next);
    skip_ws();
  }
  return Perm(std::move(im));
}

std::string format_cycles(const Perm& p) {
  auto cycles = cycles_of(p);
  if (cycles.empty()) return "()";
  std::ostringstream out;
  for (const auto& cyc : cycles) {
    out << '(';
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      if (i) out << ' ';
      out << cyc[i] + 1;
    }
    out << ')';
  }
  return out.str();
}

bool cycle_notation_less(const Perm& a, const Perm& b) {
  return cycles_of(a) < cycles_of(b);
}

}  // namespace fluxsim
