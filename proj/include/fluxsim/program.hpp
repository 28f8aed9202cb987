#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fluxsim/group.hpp"

namespace fluxsim {

enum class AtomKind : std::uint8_t { Constant, Input, InputInverse };

struct Atom {
  AtomKind kind;
  int value;  // element index for constants, slot otherwise

  bool operator==(const Atom&) const = default;
};

enum class NodeKind : std::uint8_t { Constant, Input, InputInverse, Concat, Inverse, Commutator };

struct Node {
  NodeKind kind;
  int lhs;  // element, slot, or child node
  int rhs;  // second child for Concat and Commutator
};

inline constexpr int kEmpty = -1;

// Straight-line program over one group. Children always precede parents.
// The node id kEmpty stands for the empty product.
class Program {
 public:
  explicit Program(int arity = 0) : arity_(arity) {}

  int arity() const { return arity_; }
  int root() const { return root_; }
  void set_root(int node) { root_ = node; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  bool empty() const { return root_ == kEmpty; }

  int constant(int g);
  int input(int slot);
  int input_inverse(int slot);
  int concat(int x, int y);
  int inverse(int x);
  int commutator(int x, int y);
  // Copies another program's reachable nodes in; returns the copy of its root.
  int graft(const Program& other);

  int evaluate(const FiniteGroup& G, std::span<const int> env) const;
  // Values of every node, indexed by node id.
  void evaluate_nodes(const FiniteGroup& G, std::span<const int> env, std::vector<int>& out) const;

  // Word obtained by expanding the DAG; adjacent constants are merged and
  // identity constants dropped. Throws if longer than max_atoms.
  std::vector<Atom> flatten(const FiniteGroup& G, double max_atoms = 1e7) const;
  // Length of the unmerged expansion (may be astronomically large).
  double flattened_length() const;

  // Drops nodes unreachable from the root.
  void compact();

 private:
  int push(Node n);
  void check_node(int x) const;

  int arity_;
  int root_ = kEmpty;
  std::vector<Node> nodes_;
};

Program program_from_word(int arity, std::span<const Atom> word);
int evaluate_word(const FiniteGroup& G, std::span<const Atom> word, std::span<const int> env);

std::string format_word(const FiniteGroup& G, std::span<const Atom> word);
// One atom per line: "const <cycles>", "in <i>", "inv <i>". '#' starts a comment.
std::vector<Atom> parse_word(const FiniteGroup& G, std::string_view text, int arity);

// Function table G^n -> G in mixed radix, slot 0 most significant.
// Text: "arity <n>", an optional "default <cycles>", then one line
// "<in 0> ; ... ; <in n-1> -> <out>" per tuple. Later tuples may not repeat
// earlier ones. Tuples without a line take the default; with no default
// they raise MissingEntry.
struct FunctionTable {
  int arity = 0;
  std::vector<int> values;
};

FunctionTable parse_table(const FiniteGroup& G, std::string_view text);
// Writes every tuple whose value differs from the identity after "default ()".
std::string format_table(const FiniteGroup& G, const FunctionTable& t);

std::string format_dag(const FiniteGroup& G, const Program& p);
Program parse_dag(const FiniteGroup& G, std::string_view text, int arity);

}  // namespace fluxsim
