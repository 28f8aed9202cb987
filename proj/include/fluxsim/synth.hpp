#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "fluxsim/group.hpp"
#include "fluxsim/program.hpp"

namespace fluxsim {

// Synthesis of product-form programs over a simple non-abelian group.
// Caches breadth-first conjugate-product trees; not thread-safe.
class Synthesizer {
 public:
  explicit Synthesizer(GroupPtr G);

  const FiniteGroup& group() const { return *G_; }
  const GroupPtr& group_ptr() const { return G_; }

  // Conjugators x_1..x_m with target = prod x_i c x_i^-1, m minimal.
  const std::vector<int>& conjugators(int c, int target);

  // Node computing h(node) where h maps `from` to `to` and 1 to 1.
  int shift(Program& prog, int node, int from, int to);

 private:
  struct Tree {
    std::vector<int> parent;
    std::vector<int> via;
    std::map<int, std::vector<int>> paths;
  };
  Tree& tree(int c);

  GroupPtr G_;
  std::vector<int> first_conjugator_;
  std::map<int, Tree> trees_;
};

Program conjugate_product_expression(Synthesizer& syn, int c, int target);

// Full-domain delta: b -> c, everything else -> 1.
Program point_delta(Synthesizer& syn, int b, int c);
Program point_delta_on(Synthesizer& syn, int b, int c, std::span<const int> domain);

// Arity n: c on (b_1..b_n), 1 elsewhere. Restricted to the product of
// `domains` when given.
Program multi_point_delta(Synthesizer& syn, std::span<const int> points, int c,
                          const std::vector<std::vector<int>>* domains = nullptr);

// Table indexed by the tuple in mixed radix, slot 0 most significant; -1 marks a hole.
Program synthesize(Synthesizer& syn, int n, std::span<const int> table);
// Correct on the product of `domains` only.
Program synthesize_on(Synthesizer& syn, const std::vector<std::vector<int>>& domains,
                      const std::function<int(std::span<const int>)>& f);

// f(g1, g2) with f(a^i b a^-i, a^j b a^-j) = a^(ij mod d).
Program toffoli_program(Synthesizer& syn, const QuditParams& q);
// f(a^i b a^-i) = a^i for i < d, f = 1 elsewhere on the whole group.
Program xzero_program(Synthesizer& syn, const QuditParams& q);

}  // namespace fluxsim
