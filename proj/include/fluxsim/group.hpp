#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fluxsim/errors.hpp"

namespace fluxsim {

inline constexpr int kMaxDegree = 32;
inline constexpr int kMaxOrder = 20000;

/// A permutation of {0, ..., k-1} stored by its image tuple.
class Perm {
 public:
  Perm() = default;
  explicit Perm(std::vector<std::uint8_t> images);

  static Perm identity(int degree);

  int degree() const { return static_cast<int>(images_.size()); }
  int operator[](int x) const { return images_[x]; }
  const std::vector<std::uint8_t>& images() const { return images_; }

  Perm inverse() const;
  bool is_identity() const;

  auto operator<=>(const Perm&) const = default;
  bool operator==(const Perm&) const = default;

 private:
  std::vector<std::uint8_t> images_;
};

/// (g*h)(x) = g(h(x)): h acts first.
Perm compose(const Perm& g, const Perm& h);

/// Parses 1-based cycle notation such as "(1 2)(3 4)". "()" is the identity.
Perm parse_cycles(std::string_view text, int degree);
std::string format_cycles(const Perm& p);

/// Order on permutations by their 1-based cycle notation, cycle by cycle.
bool cycle_notation_less(const Perm& a, const Perm& b);

class FiniteGroup;
using GroupPtr = std::shared_ptr<const FiniteGroup>;

/// Fully enumerated permutation group. Element 0 is the identity; indices
/// follow the lexicographic order of image tuples.
class FiniteGroup {
 public:
  static GroupPtr generate(const std::vector<Perm>& generators, int degree);

  int order() const { return static_cast<int>(elements_.size()); }
  int degree() const { return degree_; }
  int identity() const { return 0; }

  const Perm& element(int i) const { return elements_[i]; }
  const std::vector<Perm>& elements() const { return elements_; }
  int index_of(const Perm& p) const;

  int mul(int a, int b) const {
    if (!table_.empty()) {
      return table_[static_cast<std::size_t>(a) * elements_.size() + b];
    }
    return mul_slow(a, b);
  }
  int inv(int a) const { return inverse_[a]; }
  int conj(int x, int g) const { return mul(mul(x, g), inverse_[x]); }
  int comm(int a, int b) const { return mul(mul(a, b), mul(inverse_[a], inverse_[b])); }
  int pow(int a, long n) const;
  int element_order(int a) const;
  bool commute(int a, int b) const { return mul(a, b) == mul(b, a); }

  const std::vector<int>& generators() const { return generators_; }
  const std::vector<std::vector<int>>& classes() const { return classes_; }
  int class_of(int g) const { return class_of_[g]; }
  const std::vector<int>& class_elements_of(int g) const { return classes_[class_of_[g]]; }

  std::string format(int g) const { return format_cycles(elements_[g]); }

 private:
  FiniteGroup() = default;
  int mul_slow(int a, int b) const;

  int degree_ = 0;
  std::vector<Perm> elements_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> inverse_;
  std::vector<std::uint16_t> table_;
  std::vector<int> generators_;
  std::vector<std::vector<int>> classes_;
  std::vector<int> class_of_;
};

struct Subgroup {
  std::vector<int> members;  // sorted element indices
  std::vector<char> mask;    // indexed by element

  int size() const { return static_cast<int>(members.size()); }
  bool contains(int g) const { return mask[g] != 0; }
  bool operator==(const Subgroup& o) const { return members == o.members; }
};

Subgroup whole_group(const FiniteGroup& G);
Subgroup trivial_subgroup(const FiniteGroup& G);
Subgroup make_subgroup(const FiniteGroup& G, std::vector<int> members);
Subgroup generated_subgroup(const FiniteGroup& G, std::span<const int> gens);
std::vector<int> generating_set(const FiniteGroup& G, const Subgroup& H);
Subgroup normal_closure(const FiniteGroup& G, std::span<const int> elems, const Subgroup& within);
Subgroup commutator_subgroup(const FiniteGroup& G, const Subgroup& H);
bool is_normal(const FiniteGroup& G, const Subgroup& N, const Subgroup& H);

/// Conjugacy classes of G, ordered by smallest member.
const std::vector<std::vector<int>>& conjugacy_classes(const FiniteGroup& G);
/// Classes of H under conjugation by H.
std::vector<std::vector<int>> conjugacy_classes_in(const FiniteGroup& G, const Subgroup& H);

/// Derived series ending at its stable term. A nontrivial stable term is
/// listed twice so that perfection is visible: A5 gives [A5, A5].
std::vector<Subgroup> derived_series(const FiniteGroup& G);

bool is_abelian(const FiniteGroup& G);
bool is_perfect(const FiniteGroup& G);
bool is_solvable(const FiniteGroup& G);
/// The trivial group is not simple.
bool is_simple(const FiniteGroup& G);
bool is_simple_subgroup(const FiniteGroup& G, const Subgroup& H);

/// All normal subgroups of H, as joins of normal closures of class
/// representatives; sorted by size.
std::vector<Subgroup> normal_subgroups(const FiniteGroup& G, const Subgroup& H);

struct CosetContext {
  GroupPtr G;
  Subgroup P;
  Subgroup N;
  GroupPtr quotient;
  std::vector<int> epi;      // element of G -> element of quotient, -1 outside P
  std::vector<int> section;  // element of quotient -> smallest preimage in P

  int image(int g) const { return epi[g]; }
  bool in_P(int g) const { return epi[g] >= 0; }
};

CosetContext simple_perfect_quotient(const GroupPtr& G);
/// P = G, N = {1}, quotient = G with the identity epimorphism.
CosetContext trivial_coset_context(const GroupPtr& G);

struct QuditParams {
  int a = 0;
  int b = 0;
  int d = 0;
};

/// Smallest admissible prime d (or the preferred one), then a smallest in
/// cycle notation, then b smallest by index.
QuditParams find_qudit_params(const FiniteGroup& Q, std::optional<int> prefer_d = std::nullopt);
bool valid_qudit_params(const FiniteGroup& Q, const QuditParams& p);
/// Basis fluxes a^i b a^-i for i < d.
std::vector<int> basis_fluxes(const FiniteGroup& Q, const QuditParams& p);

GroupPtr cyclic_group(int n);
GroupPtr symmetric_group(int n);
GroupPtr alternating_group(int n);
GroupPtr direct_product(const FiniteGroup& G, const FiniteGroup& H);
GroupPtr sl25_group();

/// Semicolon-separated generators in 1-based cycle notation; newlines act as
/// separators too. Degree is the largest point mentioned.
GroupPtr parse_group_spec(std::string_view text);
/// Accepts either a generator spec or a name: A<n>, S<n>, Z<n>, SL25,
/// and products joined by 'x' (A5xA5).
GroupPtr resolve_group(std::string_view text);

}  // namespace fluxsim
