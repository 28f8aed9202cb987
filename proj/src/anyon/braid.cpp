#include "fluxsim/braid.hpp"

#include <sstream>

#include "fluxsim/text.hpp"

namespace fluxsim {

using namespace text;

std::vector<BraidOp> parse_braid(const FiniteGroup& G, std::string_view src) {
  std::vector<BraidOp> ops;
  for (const Line& l : content_lines(src)) {
    std::size_t pos = 0;
    int col = 1;
    const std::string_view op = next_token(l.text, pos, col);
    BraidOp o{};
    o.line = l.number;
    auto need = [&](const char* what) {
      int c = 1;
      std::string_view tok = next_token(l.text, pos, c);
      if (tok.empty()) throw ParseError(std::string("missing ") + what, l.number, c);
      return std::pair{tok, c};
    };
    auto rest_element = [&] {
      while (pos < l.text.size() && std::isspace(static_cast<unsigned char>(l.text[pos]))) ++pos;
      const int c = static_cast<int>(pos) + 1;
      return parse_element(G, l.text.substr(pos), l.number, c);
    };
    if (op == "vacpair" || op == "ancilla") {
      o.kind = op == "vacpair" ? BraidOpKind::VacPair : BraidOpKind::Ancilla;
      o.a = rest_element();
      pos = l.text.size();
    } else if (op == "xchg") {
      o.kind = BraidOpKind::Exchange;
      auto [p, pc] = need("position");
      o.a = parse_int(p, l.number, pc);
      auto [d, dc] = need("direction");
      if (d != "cw" && d != "ccw") throw ParseError("direction must be cw or ccw", l.number, dc);
      o.c = d == "ccw";
    } else if (op == "conjpair") {
      o.kind = BraidOpKind::ConjPair;
      auto [x, xc] = need("actor pair");
      o.a = parse_int(x, l.number, xc);
      auto [y, yc] = need("target pair");
      o.b = parse_int(y, l.number, yc);
      auto [p, pc] = need("power");
      if (p != "+1" && p != "-1" && p != "1") throw ParseError("power must be +1 or -1", l.number, pc);
      o.c = p == "-1" ? -1 : 1;
    } else if (op == "fuse") {
      o.kind = BraidOpKind::Fuse;
      auto [x, xc] = need("anyon");
      o.a = parse_int(x, l.number, xc);
      auto [y, yc] = need("anyon");
      o.b = parse_int(y, l.number, yc);
    } else if (op == "probe-new") {
      o.kind = BraidOpKind::ProbeNew;
      auto [n, nc] = need("representation");
      if (n != "standard" && n != "trivial") throw ParseError("unknown representation", l.number, nc);
      o.name = std::string(n);
    } else if (op == "probe-loop") {
      o.kind = BraidOpKind::ProbeLoop;
      auto [r, rc] = need("range");
      const auto dots = r.find("..");
      if (dots == std::string_view::npos) {
        o.a = o.b = parse_int(r, l.number, rc);
      } else {
        o.a = parse_int(r.substr(0, dots), l.number, rc);
        o.b = parse_int(r.substr(dots + 2), l.number, rc + static_cast<int>(dots) + 2);
      }
      if (o.b < o.a) throw ParseError("empty range", l.number, rc);
    } else if (op == "probe-fuse") {
      o.kind = BraidOpKind::ProbeFuse;
    } else {
      throw ParseError("unknown operation '" + std::string(op) + "'", l.number, col);
    }
    int c = 1;
    if (!next_token(l.text, pos, c).empty()) throw ParseError("trailing input", l.number, c);
    ops.push_back(std::move(o));
  }
  return ops;
}

std::string format_braid(const FiniteGroup& G, const std::vector<BraidOp>& ops) {
  std::ostringstream out;
  for (const BraidOp& o : ops) {
    switch (o.kind) {
      case BraidOpKind::VacPair: out << "vacpair " << G.format(o.a); break;
      case BraidOpKind::Ancilla: out << "ancilla " << G.format(o.a); break;
      case BraidOpKind::Exchange: out << "xchg " << o.a << (o.c ? " ccw" : " cw"); break;
      case BraidOpKind::ConjPair: out << "conjpair " << o.a << ' ' << o.b << (o.c < 0 ? " -1" : " +1"); break;
      case BraidOpKind::Fuse: out << "fuse " << o.a << ' ' << o.b; break;
      case BraidOpKind::ProbeNew: out << "probe-new " << o.name; break;
      case BraidOpKind::ProbeLoop: out << "probe-loop " << o.a << ".." << o.b; break;
      case BraidOpKind::ProbeFuse: out << "probe-fuse"; break;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string at_line(const BraidOp& o, const std::exception& e) {
  const std::string what = e.what();
  const std::string prefix = "line " + std::to_string(o.line) + ": ";
  return what.rfind("line ", 0) == 0 ? what : prefix + what;
}

}  // namespace

std::vector<PairId> run_braid(AnyonSystem& sys, const std::vector<BraidOp>& ops, double charged_weight) {
  const FiniteGroup& G = sys.group();
  std::vector<PairId> pairs;
  std::vector<int> probes;
  RepresentationPtr standard;
  auto pair_at = [&](int k, int line) {
    if (k < 0 || k >= static_cast<int>(pairs.size())) {
      throw StructuralError("line " + std::to_string(line) + ": no pair " + std::to_string(k));
    }
    return pairs[k];
  };
  auto current_probe = [&](int line) {
    if (probes.empty()) throw StructuralError("line " + std::to_string(line) + ": no open probe");
    return probes.back();
  };
  auto run = [&](const BraidOp& o) {
    switch (o.kind) {
      case BraidOpKind::VacPair:
        pairs.push_back(sys.create_vacuum_pair(SectorModel::concentrated(G, o.a, charged_weight)));
        break;
      case BraidOpKind::Ancilla: pairs.push_back(sys.create_flux_ancilla(o.a)); break;
      case BraidOpKind::Exchange: sys.exchange(o.a, o.c ? Direction::Ccw : Direction::Cw); break;
      case BraidOpKind::ConjPair: sys.conjugate_pair(pair_at(o.a, o.line), pair_at(o.b, o.line), o.c); break;
      case BraidOpKind::Fuse: sys.fuse(o.a, o.b); break;
      case BraidOpKind::ProbeNew: {
        RepresentationPtr rep;
        if (o.name == "standard") {
          if (!standard) standard = std::make_shared<const Representation>(Representation::standard(G));
          rep = standard;
        } else {
          rep = std::make_shared<const Representation>(Representation::trivial(G));
        }
        probes.push_back(sys.create_charge_probe(rep));
        break;
      }
      case BraidOpKind::ProbeLoop: {
        if (o.b >= static_cast<int>(sys.line().size())) throw PositionOutOfRange("probe loop beyond the line");
        std::vector<ParticleId> ring(sys.line().begin() + o.a, sys.line().begin() + o.b + 1);
        sys.encircle_with_probe(current_probe(o.line), ring);
        break;
      }
      case BraidOpKind::ProbeFuse:
        sys.fuse_probe(current_probe(o.line));
        probes.pop_back();
        break;
    }
  };
  // Runtime refusals carry the line of the offending operation.
  for (const BraidOp& o : ops) {
    try {
      run(o);
    } catch (const NontrivialFlux& e) {
      throw NontrivialFlux(at_line(o, e));
    } catch (const PositionOutOfRange& e) {
      throw PositionOutOfRange(at_line(o, e));
    } catch (const StructuralError& e) {
      throw StructuralError(at_line(o, e));
    }
  }
  return pairs;
}

}  // namespace fluxsim
