#include <map>
#include <sstream>

#include "fluxsim/errors.hpp"
#include "fluxsim/gate.hpp"
#include "fluxsim/text.hpp"

namespace fluxsim {

using namespace text;

namespace {

struct OpSpec {
  const char* name;
  CircuitOpKind kind;
  int args;
};

constexpr OpSpec kOps[] = {
    {"enc", CircuitOpKind::Encode, 2}, {"tof", CircuitOpKind::Toffoli, 3},  {"csum", CircuitOpKind::Csum, 2},
    {"x", CircuitOpKind::X, 1},        {"z", CircuitOpKind::Z, 1},          {"mz", CircuitOpKind::MeasureZ, 1},
    {"mx", CircuitOpKind::MeasureX, 1}, {"mxz", CircuitOpKind::MeasureXZ, 3},
};

const OpSpec& spec_of(CircuitOpKind k) {
  for (const OpSpec& s : kOps) {
    if (s.kind == k) return s;
  }
  throw StructuralError("unknown circuit op");
}

}  // namespace

std::vector<CircuitOp> parse_circuit(std::string_view src) {
  std::vector<CircuitOp> ops;
  for (const Line& l : content_lines(src)) {
    std::size_t pos = 0;
    int col = 1;
    const std::string_view name = next_token(l.text, pos, col);
    const OpSpec* spec = nullptr;
    for (const OpSpec& s : kOps) {
      if (name == s.name) spec = &s;
    }
    if (!spec) throw ParseError("unknown operation '" + std::string(name) + "'", l.number, col);
    CircuitOp op{spec->kind, {}, l.number};
    for (int i = 0; i < spec->args; ++i) {
      int c = 1;
      const std::string_view tok = next_token(l.text, pos, c);
      if (tok.empty()) throw ParseError("missing argument", l.number, c);
      op.args.push_back(parse_int(tok, l.number, c));
    }
    int c = 1;
    if (!next_token(l.text, pos, c).empty()) throw ParseError("trailing input", l.number, c);
    ops.push_back(std::move(op));
  }
  return ops;
}

std::string format_circuit(const std::vector<CircuitOp>& ops) {
  std::ostringstream os;
  for (const CircuitOp& op : ops) {
    os << spec_of(op.kind).name;
    for (int a : op.args) os << ' ' << a;
    os << '\n';
  }
  return os.str();
}

std::vector<std::string> run_circuit(QuditRegister& reg, const std::vector<CircuitOp>& ops) {
  std::map<int, int> qid;
  std::vector<std::string> out;
  auto q = [&](const CircuitOp& op, int i) {
    auto it = qid.find(op.args[i]);
    if (it == qid.end()) {
      throw StructuralError("line " + std::to_string(op.line) + ": qudit " + std::to_string(op.args[i]) +
                            " was never encoded");
    }
    return it->second;
  };
  for (const CircuitOp& op : ops) {
    const auto& a = op.args;
    switch (op.kind) {
      case CircuitOpKind::Encode:
        if (qid.count(a[0])) throw StructuralError("line " + std::to_string(op.line) + ": qudit already encoded");
        qid[a[0]] = reg.encode(a[1]);
        break;
      case CircuitOpKind::Toffoli: reg.toffoli(q(op, 0), q(op, 1), q(op, 2)); break;
      case CircuitOpKind::Csum: reg.controlled_sum(q(op, 0), q(op, 1)); break;
      case CircuitOpKind::X: reg.gate_X(q(op, 0)); break;
      case CircuitOpKind::Z:
        if (!reg.bootstrapped()) reg.bootstrap_xone();
        reg.gate_Z(q(op, 0));
        break;
      case CircuitOpKind::MeasureZ:
        out.push_back("mz " + std::to_string(a[0]) + " " + std::to_string(reg.measure_Z(q(op, 0)).digit));
        break;
      case CircuitOpKind::MeasureX:
        if (!reg.bootstrapped()) reg.bootstrap_xone();
        out.push_back("mx " + std::to_string(a[0]) + " " + std::to_string(reg.measure_X(q(op, 0)).digit));
        break;
      case CircuitOpKind::MeasureXZ:
        if (!reg.bootstrapped()) reg.bootstrap_xone();
        out.push_back("mxz " + std::to_string(a[0]) + " " + std::to_string(a[1]) + " " + std::to_string(a[2]) + " " +
                      std::to_string(reg.measure_XaZb(q(op, 0), a[1], a[2])));
        break;
    }
  }
  return out;
}

}  // namespace fluxsim
