#include <algorithm>
#include <deque>

#include "fluxsim/group.hpp"

namespace fluxsim {

namespace {

constexpr int kTableLimit = 4096;

std::string key_of(const Perm& p) {
  const auto& im = p.images();
  return std::string(reinterpret_cast<const char*>(im.data()), im.size());
}

}  // namespace

GroupPtr FiniteGroup::generate(const std::vector<Perm>& generators, int degree) {
  if (degree < 1 || degree > kMaxDegree) throw StructuralError("degree must lie in [1, 32]");
  for (const auto& g : generators) {
    if (g.degree() != degree) throw StructuralError("generator degree mismatch");
  }

  std::vector<Perm> elems{Perm::identity(degree)};
  std::unordered_map<std::string, int> seen{{key_of(elems[0]), 0}};
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (const auto& s : generators) {
      Perm next = compose(elems[i], s);
      auto [it, fresh] = seen.emplace(key_of(next), static_cast<int>(elems.size()));
      if (!fresh) continue;
      elems.push_back(std::move(next));
      if (static_cast<int>(elems.size()) > kMaxOrder) {
        throw GroupTooLarge("group order exceeds " + std::to_string(kMaxOrder));
      }
    }
  }
  std::sort(elems.begin(), elems.end());

  auto G = std::shared_ptr<FiniteGroup>(new FiniteGroup());
  G->degree_ = degree;
  G->elements_ = std::move(elems);
  const int n = G->order();
  G->index_.reserve(n * 2);
  for (int i = 0; i < n; ++i) G->index_.emplace(key_of(G->elements_[i]), i);

  if (n <= kTableLimit) {
    G->table_.resize(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        G->table_[static_cast<std::size_t>(a) * n + b] =
            static_cast<std::uint16_t>(G->index_of(compose(G->elements_[a], G->elements_[b])));
      }
    }
  }
  G->inverse_.resize(n);
  for (int a = 0; a < n; ++a) G->inverse_[a] = G->index_of(G->elements_[a].inverse());

  for (const auto& s : generators) {
    int idx = G->index_of(s);
    if (idx != 0 && std::find(G->generators_.begin(), G->generators_.end(), idx) == G->generators_.end()) {
      G->generators_.push_back(idx);
    }
  }

  G->class_of_.assign(n, -1);
  for (int g = 0; g < n; ++g) {
    if (G->class_of_[g] >= 0) continue;
    const int cid = static_cast<int>(G->classes_.size());
    std::vector<int> cls{g};
    G->class_of_[g] = cid;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      for (int s : G->generators_) {
        int y = G->conj(s, cls[i]);
        if (G->class_of_[y] < 0) {
          G->class_of_[y] = cid;
          cls.push_back(y);
        }
      }
    }
    std::sort(cls.begin(), cls.end());
    G->classes_.push_back(std::move(cls));
  }
  return G;
}

int FiniteGroup::index_of(const Perm& p) const {
  if (p.degree() != degree_) return -1;
  auto it = index_.find(key_of(p));
  return it == index_.end() ? -1 : it->second;
}

int FiniteGroup::mul_slow(int a, int b) const {
  return index_of(compose(elements_[a], elements_[b]));
}

int FiniteGroup::pow(int a, long n) const {
  const long ord = element_order(a);
  long e = ((n % ord) + ord) % ord;
  int r = 0;
  for (long i = 0; i < e; ++i) r = mul(r, a);
  return r;
}

int FiniteGroup::element_order(int a) const {
  int k = 1;
  for (int x = a; x != 0; x = mul(x, a)) ++k;
  return k;
}

}  // namespace fluxsim
