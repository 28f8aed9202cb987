#pragma once

// Line-oriented tokenizing shared by the text formats.

#include <cctype>
#include <charconv>
#include <string_view>
#include <vector>

#include "fluxsim/group.hpp"

namespace fluxsim::text {

struct Line {
  std::string_view text;
  int number;
};

inline std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++number;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    std::size_t lead = 0;
    while (lead < line.size() && std::isspace(static_cast<unsigned char>(line[lead]))) ++lead;
    if (lead < line.size()) out.push_back({line, number});
    pos = end + 1;
  }
  return out;
}

// Splits off the next whitespace-delimited token, recording its column.
inline std::string_view next_token(std::string_view line, std::size_t& pos, int& column) {
  while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  std::size_t start = pos;
  while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  column = static_cast<int>(start) + 1;
  return line.substr(start, pos - start);
}

inline int parse_int(std::string_view tok, int line, int column) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ParseError("expected integer", line, column);
  return v;
}

inline int parse_element(const FiniteGroup& G, std::string_view rest, int line, int column) {
  int g = -1;
  try {
    g = G.index_of(parse_cycles(rest, G.degree()));
  } catch (const ParseError& e) {
    throw ParseError("malformed cycles", line, column + e.column() - 1);
  }
  if (g < 0) throw ParseError("element is not in the group", line, column);
  return g;
}

}  // namespace fluxsim::text
