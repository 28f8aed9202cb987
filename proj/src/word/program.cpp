#include "fluxsim/program.hpp"

#include <algorithm>

namespace fluxsim {

int Program::push(Node n) {
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

void Program::check_node(int x) const {
  if (x < kEmpty || x >= size()) throw StructuralError("node id out of range");
}

int Program::constant(int g) {
  if (g == 0) return kEmpty;
  return push({NodeKind::Constant, g, 0});
}

int Program::input(int slot) {
  if (slot < 0 || slot >= arity_) throw ArityMismatch("input slot exceeds arity");
  return push({NodeKind::Input, slot, 0});
}

int Program::input_inverse(int slot) {
  if (slot < 0 || slot >= arity_) throw ArityMismatch("input slot exceeds arity");
  return push({NodeKind::InputInverse, slot, 0});
}

int Program::concat(int x, int y) {
  check_node(x);
  check_node(y);
  if (x == kEmpty) return y;
  if (y == kEmpty) return x;
  return push({NodeKind::Concat, x, y});
}

int Program::inverse(int x) {
  check_node(x);
  if (x == kEmpty) return kEmpty;
  return push({NodeKind::Inverse, x, 0});
}

int Program::commutator(int x, int y) {
  check_node(x);
  check_node(y);
  if (x == kEmpty || y == kEmpty) return kEmpty;
  return push({NodeKind::Commutator, x, y});
}

int Program::graft(const Program& other) {
  if (other.arity_ > arity_) throw ArityMismatch("grafted program has larger arity");
  if (other.root_ == kEmpty) return kEmpty;
  std::vector<char> live(other.nodes_.size(), 0);
  live[other.root_] = 1;
  for (int i = other.root_; i >= 0; --i) {
    if (!live[i]) continue;
    const Node& n = other.nodes_[i];
    if (n.kind == NodeKind::Concat || n.kind == NodeKind::Commutator) {
      live[n.lhs] = live[n.rhs] = 1;
    } else if (n.kind == NodeKind::Inverse) {
      live[n.lhs] = 1;
    }
  }
  std::vector<int> map(other.nodes_.size(), kEmpty);
  for (int i = 0; i <= other.root_; ++i) {
    if (!live[i]) continue;
    Node n = other.nodes_[i];
    if (n.kind == NodeKind::Concat || n.kind == NodeKind::Commutator) {
      n.lhs = map[n.lhs];
      n.rhs = map[n.rhs];
    } else if (n.kind == NodeKind::Inverse) {
      n.lhs = map[n.lhs];
    }
    map[i] = push(n);
  }
  return map[other.root_];
}

void Program::evaluate_nodes(const FiniteGroup& G, std::span<const int> env, std::vector<int>& out) const {
  if (static_cast<int>(env.size()) != arity_) throw ArityMismatch("environment size differs from arity");
  out.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Constant: out[i] = n.lhs; break;
      case NodeKind::Input: out[i] = env[n.lhs]; break;
      case NodeKind::InputInverse: out[i] = G.inv(env[n.lhs]); break;
      case NodeKind::Concat: out[i] = G.mul(out[n.lhs], out[n.rhs]); break;
      case NodeKind::Inverse: out[i] = G.inv(out[n.lhs]); break;
      case NodeKind::Commutator: out[i] = G.comm(out[n.lhs], out[n.rhs]); break;
    }
  }
}

int Program::evaluate(const FiniteGroup& G, std::span<const int> env) const {
  if (static_cast<int>(env.size()) != arity_) throw ArityMismatch("environment size differs from arity");
  if (root_ == kEmpty) return 0;
  thread_local std::vector<int> values;
  values.resize(root_ + 1);
  for (int i = 0; i <= root_; ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Constant: values[i] = n.lhs; break;
      case NodeKind::Input: values[i] = env[n.lhs]; break;
      case NodeKind::InputInverse: values[i] = G.inv(env[n.lhs]); break;
      case NodeKind::Concat: values[i] = G.mul(values[n.lhs], values[n.rhs]); break;
      case NodeKind::Inverse: values[i] = G.inv(values[n.lhs]); break;
      case NodeKind::Commutator: values[i] = G.comm(values[n.lhs], values[n.rhs]); break;
    }
  }
  return values[root_];
}

double Program::flattened_length() const {
  if (root_ == kEmpty) return 0.0;
  std::vector<double> len(root_ + 1);
  for (int i = 0; i <= root_; ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Constant:
      case NodeKind::Input:
      case NodeKind::InputInverse: len[i] = 1; break;
      case NodeKind::Concat: len[i] = len[n.lhs] + len[n.rhs]; break;
      case NodeKind::Inverse: len[i] = len[n.lhs]; break;
      case NodeKind::Commutator: len[i] = 2 * (len[n.lhs] + len[n.rhs]); break;
    }
  }
  return len[root_];
}

namespace {

struct Flattener {
  const FiniteGroup& G;
  const std::vector<Node>& nodes;
  std::vector<Atom> out;

  void push_atom(Atom a) {
    if (a.kind == AtomKind::Constant) {
      if (!out.empty() && out.back().kind == AtomKind::Constant) {
        int merged = G.mul(out.back().value, a.value);
        out.pop_back();
        if (merged != 0) out.push_back({AtomKind::Constant, merged});
        return;
      }
      if (a.value == 0) return;
    }
    out.push_back(a);
  }

  void emit(int x, bool inv) {
    const Node& n = nodes[x];
    switch (n.kind) {
      case NodeKind::Constant: push_atom({AtomKind::Constant, inv ? G.inv(n.lhs) : n.lhs}); break;
      case NodeKind::Input: push_atom({inv ? AtomKind::InputInverse : AtomKind::Input, n.lhs}); break;
      case NodeKind::InputInverse: push_atom({inv ? AtomKind::Input : AtomKind::InputInverse, n.lhs}); break;
      case NodeKind::Concat:
        if (inv) {
          emit(n.rhs, true);
          emit(n.lhs, true);
        } else {
          emit(n.lhs, false);
          emit(n.rhs, false);
        }
        break;
      case NodeKind::Inverse: emit(n.lhs, !inv); break;
      case NodeKind::Commutator:
        if (inv) {
          emit(n.rhs, false);
          emit(n.lhs, false);
          emit(n.rhs, true);
          emit(n.lhs, true);
        } else {
          emit(n.lhs, false);
          emit(n.rhs, false);
          emit(n.lhs, true);
          emit(n.rhs, true);
        }
        break;
    }
  }
};

}  // namespace

std::vector<Atom> Program::flatten(const FiniteGroup& G, double max_atoms) const {
  if (root_ == kEmpty) return {};
  if (flattened_length() > max_atoms) throw Error("flattened word exceeds the atom limit");
  Flattener f{G, nodes_, {}};
  f.emit(root_, false);
  return std::move(f.out);
}

void Program::compact() {
  if (root_ == kEmpty) {
    nodes_.clear();
    return;
  }
  Program fresh(arity_);
  fresh.root_ = fresh.graft(*this);
  *this = std::move(fresh);
}

Program program_from_word(int arity, std::span<const Atom> word) {
  Program p(arity);
  int acc = kEmpty;
  for (const Atom& a : word) {
    int node = kEmpty;
    switch (a.kind) {
      case AtomKind::Constant: node = p.constant(a.value); break;
      case AtomKind::Input: node = p.input(a.value); break;
      case AtomKind::InputInverse: node = p.input_inverse(a.value); break;
    }
    acc = p.concat(acc, node);
  }
  p.set_root(acc);
  return p;
}

int evaluate_word(const FiniteGroup& G, std::span<const Atom> word, std::span<const int> env) {
  int acc = 0;
  for (const Atom& a : word) {
    switch (a.kind) {
      case AtomKind::Constant: acc = G.mul(acc, a.value); break;
      case AtomKind::Input: acc = G.mul(acc, env[a.value]); break;
      case AtomKind::InputInverse: acc = G.mul(acc, G.inv(env[a.value])); break;
    }
  }
  return acc;
}

}  // namespace fluxsim
