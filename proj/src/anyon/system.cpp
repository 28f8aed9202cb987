#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "fluxsim/anyon.hpp"

namespace fluxsim {

namespace {

constexpr double kPruneAmp = 1e-14;

std::string fmt_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", p);
  return buf;
}

std::string row_key(const std::uint16_t* row, std::span<const int> cols) {
  std::string k(cols.size() * 2, '\0');
  for (std::size_t i = 0; i < cols.size(); ++i) {
    k[2 * i] = static_cast<char>(row[cols[i]] & 0xff);
    k[2 * i + 1] = static_cast<char>(row[cols[i]] >> 8);
  }
  return k;
}

double norm2(std::span<const Amplitude> v) {
  double s = 0;
  for (const auto& a : v) s += std::norm(a);
  return s;
}

}  // namespace

SectorModel SectorModel::uniform_magnetic(const FiniteGroup& G, double charged_weight) {
  SectorModel m;
  const int k = static_cast<int>(G.classes().size());
  m.class_weights.assign(k, 0.0);
  m.charged_weight = charged_weight;
  if (k > 1) {
    for (int c = 1; c < k; ++c) m.class_weights[c] = (1.0 - charged_weight) / (k - 1);
  } else {
    m.class_weights[0] = 1.0 - charged_weight;
  }
  return m;
}

SectorModel SectorModel::concentrated(const FiniteGroup& G, int element, double charged_weight) {
  SectorModel m;
  m.class_weights.assign(G.classes().size(), 0.0);
  m.class_weights[G.class_of(element)] = 1.0 - charged_weight;
  m.charged_weight = charged_weight;
  return m;
}

void SectorModel::validate(const FiniteGroup& G) const {
  if (class_weights.size() != G.classes().size()) throw InvalidSectorModel("one weight per conjugacy class required");
  double s = charged_weight;
  if (!(charged_weight >= 0.0)) throw InvalidSectorModel("negative charged weight");
  for (double w : class_weights) {
    if (!(w >= 0.0)) throw InvalidSectorModel("negative class weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9) throw InvalidSectorModel("sector weights must sum to 1");
}

AnyonSystem::AnyonSystem(GroupPtr G, std::uint64_t seed) : G_(std::move(G)), rng_(seed) {
  Branch b;
  b.amps = {1.0};
  branches_.push_back(std::move(b));
}

int AnyonSystem::add_register() {
  const int reg = static_cast<int>(col_of_reg_.size());
  col_of_reg_.push_back(static_cast<int>(reg_of_col_.size()));
  reg_of_col_.push_back(reg);
  return reg;
}

ParticleId AnyonSystem::add_particle(std::vector<int> regs) {
  particles_.push_back({std::move(regs), true});
  return static_cast<ParticleId>(particles_.size()) - 1;
}

bool AnyonSystem::alive(ParticleId p) const {
  return p >= 0 && p < static_cast<int>(particles_.size()) && particles_[p].alive;
}

bool AnyonSystem::is_composite(ParticleId p) const { return particles_.at(p).regs.size() > 1; }

int AnyonSystem::position_of(ParticleId p) const {
  auto it = std::find(line_.begin(), line_.end(), p);
  if (it == line_.end()) throw PositionOutOfRange("particle is not on the line");
  return static_cast<int>(it - line_.begin());
}

int AnyonSystem::column_of(ParticleId p) const {
  if (!alive(p)) throw StructuralError("particle does not exist");
  if (particles_[p].regs.size() != 1) throw StructuralError("composite particle has several registers");
  return col_of_reg_[particles_[p].regs[0]];
}

int AnyonSystem::probe_columns(int probe, int which) const {
  const Probe& pr = probes_.at(probe);
  return col_of_reg_[which == 0 ? pr.left_reg : pr.right_reg];
}

int AnyonSystem::flux_in_row(const std::uint16_t* row, ParticleId p) const {
  int f = 0;
  for (int r : particles_[p].regs) f = G_->mul(f, row[col_of_reg_[r]]);
  return f;
}

void AnyonSystem::add_columns(
    int count, const std::function<void(Branch&, std::vector<std::uint16_t>&, std::vector<Amplitude>&)>& fill) {
  for (int i = 0; i < count; ++i) add_register();
  for (Branch& b : branches_) {
    std::vector<std::uint16_t> cfg;
    std::vector<Amplitude> amps;
    fill(b, cfg, amps);
    b.configs = std::move(cfg);
    b.amps = std::move(amps);
    b.token_partner.resize(columns(), -1);
  }
}

namespace {

// Appends the options (values for the new columns, amplitude) to every row.
void extend_rows(const Branch& b, int old_stride, const std::vector<std::vector<std::uint16_t>>& vals,
                 const std::vector<Amplitude>& amps, std::vector<std::uint16_t>& cfg, std::vector<Amplitude>& out) {
  const int add = vals.empty() ? 0 : static_cast<int>(vals[0].size());
  cfg.reserve(b.terms() * vals.size() * (old_stride + add));
  for (std::size_t t = 0; t < b.terms(); ++t) {
    const std::uint16_t* row = b.configs.data() + t * old_stride;
    for (std::size_t o = 0; o < vals.size(); ++o) {
      cfg.insert(cfg.end(), row, row + old_stride);
      cfg.insert(cfg.end(), vals[o].begin(), vals[o].end());
      out.push_back(b.amps[t] * amps[o]);
    }
  }
}

}  // namespace

PairId AnyonSystem::create_flux_ancilla(int g) {
  if (g < 0 || g >= G_->order()) throw StructuralError("flux is not a group element");
  const int stride = columns();
  const std::vector<std::vector<std::uint16_t>> vals{
      {static_cast<std::uint16_t>(g), static_cast<std::uint16_t>(G_->inv(g))}};
  const std::vector<Amplitude> amps{1.0};
  add_columns(2, [&](Branch& b, auto& cfg, auto& out) { extend_rows(b, stride, vals, amps, cfg, out); });
  const int r = static_cast<int>(col_of_reg_.size());
  PairId id{add_particle({r - 2}), add_particle({r - 1})};
  line_.push_back(id.left);
  line_.push_back(id.right);
  return id;
}

PairId AnyonSystem::create_pair_superposition(std::span<const int> fluxes, std::span<const Amplitude> amps) {
  if (fluxes.size() != amps.size() || fluxes.empty()) throw StructuralError("one amplitude per flux required");
  const int stride = columns();
  std::vector<std::vector<std::uint16_t>> vals;
  std::vector<Amplitude> a;
  for (std::size_t i = 0; i < fluxes.size(); ++i) {
    if (std::abs(amps[i]) < kPruneAmp) continue;
    vals.push_back({static_cast<std::uint16_t>(fluxes[i]), static_cast<std::uint16_t>(G_->inv(fluxes[i]))});
    a.push_back(amps[i]);
  }
  add_columns(2, [&](Branch& b, auto& cfg, auto& out) { extend_rows(b, stride, vals, a, cfg, out); });
  const int r = static_cast<int>(col_of_reg_.size());
  PairId id{add_particle({r - 2}), add_particle({r - 1})};
  line_.push_back(id.left);
  line_.push_back(id.right);
  return id;
}

PairId AnyonSystem::create_pair_mixture(const std::vector<double>& weights,
                                        const std::vector<std::vector<int>>& fluxes,
                                        const std::vector<std::vector<Amplitude>>& amps) {
  if (weights.size() != fluxes.size() || weights.size() != amps.size() || weights.empty()) {
    throw StructuralError("mixture components are inconsistent");
  }
  const int stride = columns();
  for (int i = 0; i < 2; ++i) add_register();
  std::vector<Branch> next;
  for (const Branch& b : branches_) {
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (weights[k] <= 0) continue;
      std::vector<std::vector<std::uint16_t>> vals;
      std::vector<Amplitude> a;
      for (std::size_t i = 0; i < fluxes[k].size(); ++i) {
        vals.push_back({static_cast<std::uint16_t>(fluxes[k][i]), static_cast<std::uint16_t>(G_->inv(fluxes[k][i]))});
        a.push_back(amps[k][i]);
      }
      Branch nb;
      nb.weight = b.weight * weights[k];
      extend_rows(b, stride, vals, a, nb.configs, nb.amps);
      nb.token_partner = b.token_partner;
      nb.token_partner.resize(columns(), -1);
      next.push_back(std::move(nb));
    }
  }
  branches_ = std::move(next);
  const int r = static_cast<int>(col_of_reg_.size());
  PairId id{add_particle({r - 2}), add_particle({r - 1})};
  line_.push_back(id.left);
  line_.push_back(id.right);
  return id;
}

PairId AnyonSystem::create_vacuum_pair(const SectorModel& model) {
  model.validate(*G_);
  const int stride = columns();
  for (int i = 0; i < 2; ++i) add_register();
  const int cl = columns() - 2;
  std::vector<Branch> next;
  for (const Branch& b : branches_) {
    for (std::size_t c = 0; c < model.class_weights.size(); ++c) {
      if (model.class_weights[c] <= 0) continue;
      const auto& cls = G_->classes()[c];
      std::vector<std::vector<std::uint16_t>> vals;
      std::vector<Amplitude> a(cls.size(), 1.0 / std::sqrt(static_cast<double>(cls.size())));
      for (int g : cls) vals.push_back({static_cast<std::uint16_t>(g), static_cast<std::uint16_t>(G_->inv(g))});
      Branch nb;
      nb.weight = b.weight * model.class_weights[c];
      extend_rows(b, stride, vals, a, nb.configs, nb.amps);
      nb.token_partner = b.token_partner;
      nb.token_partner.resize(columns(), -1);
      next.push_back(std::move(nb));
    }
    if (model.charged_weight > 0) {
      Branch nb;
      nb.weight = b.weight * model.charged_weight;
      extend_rows(b, stride, {{0, 0}}, {1.0}, nb.configs, nb.amps);
      nb.token_partner = b.token_partner;
      nb.token_partner.resize(columns(), -1);
      nb.token_partner[cl] = cl + 1;
      nb.token_partner[cl + 1] = cl;
      next.push_back(std::move(nb));
    }
  }
  branches_ = std::move(next);
  const int r = static_cast<int>(col_of_reg_.size());
  PairId id{add_particle({r - 2}), add_particle({r - 1})};
  line_.push_back(id.left);
  line_.push_back(id.right);
  return id;
}

PairId AnyonSystem::create_charged_pair() {
  const int stride = columns();
  const std::vector<std::vector<std::uint16_t>> vals{{0, 0}};
  const std::vector<Amplitude> amps{1.0};
  add_columns(2, [&](Branch& b, auto& cfg, auto& out) { extend_rows(b, stride, vals, amps, cfg, out); });
  const int cl = columns() - 2;
  for (Branch& b : branches_) {
    b.token_partner[cl] = cl + 1;
    b.token_partner[cl + 1] = cl;
  }
  const int r = static_cast<int>(col_of_reg_.size());
  PairId id{add_particle({r - 2}), add_particle({r - 1})};
  line_.push_back(id.left);
  line_.push_back(id.right);
  return id;
}

void AnyonSystem::exchange(int position, Direction dir) {
  if (position < 0 || position + 1 >= static_cast<int>(line_.size())) {
    throw PositionOutOfRange("exchange position out of range");
  }
  const Particle& L = particles_[line_[position]];
  const Particle& R = particles_[line_[position + 1]];
  std::vector<int> lc, rc;
  for (int r : L.regs) lc.push_back(col_of_reg_[r]);
  for (int r : R.regs) rc.push_back(col_of_reg_[r]);
  const int stride = columns();
  const FiniteGroup& G = *G_;
  for (Branch& b : branches_) {
    for (std::size_t t = 0; t < b.terms(); ++t) {
      std::uint16_t* row = b.configs.data() + t * stride;
      if (dir == Direction::Ccw) {
        // (h, g) -> (h g h^-1, h): the right anyon passes over and is conjugated.
        int h = 0;
        for (int c : lc) h = G.mul(h, row[c]);
        if (h == 0) continue;
        for (int c : rc) row[c] = static_cast<std::uint16_t>(G.conj(h, row[c]));
      } else {
        // (h, g) -> (g, g^-1 h g).
        int g = 0;
        for (int c : rc) g = G.mul(g, row[c]);
        if (g == 0) continue;
        const int gi = G.inv(g);
        for (int c : lc) row[c] = static_cast<std::uint16_t>(G.conj(gi, row[c]));
      }
    }
  }
  std::swap(line_[position], line_[position + 1]);
}

bool AnyonSystem::pair_is_neutral(PairId pair) const {
  const int stride = columns();
  for (const Branch& b : branches_) {
    for (std::size_t t = 0; t < b.terms(); ++t) {
      const std::uint16_t* row = b.configs.data() + t * stride;
      if (G_->mul(flux_in_row(row, pair.left), flux_in_row(row, pair.right)) != 0) return false;
    }
  }
  return true;
}

void AnyonSystem::move_pair(PairId pair, int position) {
  const int pl = position_of(pair.left);
  if (position_of(pair.right) != pl + 1) throw StructuralError("pair members are not adjacent");
  if (!pair_is_neutral(pair)) throw NontrivialFlux("only pairs of trivial net flux move freely");
  line_.erase(line_.begin() + pl, line_.begin() + pl + 2);
  position = std::clamp(position, 0, static_cast<int>(line_.size()));
  line_.insert(line_.begin() + position, {pair.left, pair.right});
}

void AnyonSystem::conjugate_pair(PairId actor, PairId target, int power) {
  if (power != 1 && power != -1) throw StructuralError("power must be +1 or -1");
  const int al = position_of(actor.left);
  const int tl = position_of(target.left);
  if (position_of(actor.right) != al + 1 || position_of(target.right) != tl + 1) {
    throw StructuralError("pair members are not adjacent");
  }
  if (!pair_is_neutral(actor)) throw NontrivialFlux("actor pair carries net flux");
  if (!pair_is_neutral(target)) throw NontrivialFlux("target pair carries net flux");
  const std::vector<ParticleId> saved = line_;
  line_.erase(line_.begin() + tl, line_.begin() + tl + 2);
  const int p = position_of(actor.left);
  line_.insert(line_.begin() + p + 2, {target.left, target.right});
  const Direction dir = power == 1 ? Direction::Cw : Direction::Ccw;
  exchange(p + 1, dir);
  exchange(p + 2, dir);
  exchange(p + 2, dir);
  exchange(p + 1, dir);
  line_ = saved;
}

namespace {

struct Grouping {
  std::vector<int> group_of_term;
  std::vector<std::size_t> first_term;
};

// Groups terms by the values in `cols`, in order of first appearance.
Grouping group_terms(const Branch& b, int stride, std::span<const int> cols) {
  Grouping g;
  g.group_of_term.resize(b.terms());
  std::unordered_map<std::string, int> index;
  for (std::size_t t = 0; t < b.terms(); ++t) {
    auto [it, fresh] = index.emplace(row_key(b.configs.data() + t * stride, cols), static_cast<int>(g.first_term.size()));
    if (fresh) g.first_term.push_back(t);
    g.group_of_term[t] = it->second;
  }
  return g;
}

std::vector<int> other_columns(int stride, std::span<const int> drop) {
  std::vector<int> keep;
  for (int c = 0; c < stride; ++c) {
    if (std::find(drop.begin(), drop.end(), c) == drop.end()) keep.push_back(c);
  }
  return keep;
}

}  // namespace

void AnyonSystem::remove_registers(std::span<const int> regs) {
  std::vector<int> drop;
  for (int r : regs) drop.push_back(col_of_reg_[r]);
  const int stride = columns();
  const std::vector<int> keep = other_columns(stride, drop);
  std::vector<int> new_col(stride, -1);
  for (std::size_t i = 0; i < keep.size(); ++i) new_col[keep[i]] = static_cast<int>(i);
  for (Branch& b : branches_) {
    // Rows are expected to be distinct on the kept columns already.
    std::vector<std::uint16_t> cfg;
    cfg.reserve(b.terms() * keep.size());
    for (std::size_t t = 0; t < b.terms(); ++t) {
      const std::uint16_t* row = b.configs.data() + t * stride;
      for (int c : keep) cfg.push_back(row[c]);
    }
    b.configs = std::move(cfg);
    std::vector<int> tokens;
    for (int c : keep) {
      int partner = b.token_partner[c];
      if (partner >= 0) partner = new_col[partner] >= 0 ? new_col[partner] : -2;
      tokens.push_back(partner);
    }
    b.token_partner = std::move(tokens);
  }
  for (int r : regs) col_of_reg_[r] = -1;
  std::vector<int> live(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    live[i] = reg_of_col_[keep[i]];
    col_of_reg_[live[i]] = static_cast<int>(i);
  }
  reg_of_col_ = std::move(live);
}

void AnyonSystem::normalize_branches() {
  double total = 0;
  std::vector<Branch> kept;
  for (Branch& b : branches_) {
    std::size_t w = 0;
    const int stride = columns();
    for (std::size_t t = 0; t < b.terms(); ++t) {
      if (std::abs(b.amps[t]) < kPruneAmp) continue;
      if (w != t) {
        std::copy_n(b.configs.begin() + t * stride, stride, b.configs.begin() + w * stride);
        b.amps[w] = b.amps[t];
      }
      ++w;
    }
    b.amps.resize(w);
    b.configs.resize(w * stride);
    const double n = norm2(b.amps);
    if (n <= 0 || b.weight <= 0) continue;
    const double s = 1.0 / std::sqrt(n);
    for (auto& a : b.amps) a *= s;
    total += b.weight;
    kept.push_back(std::move(b));
  }
  if (kept.empty()) throw StructuralError("ensemble lost all weight");
  for (auto& b : kept) b.weight /= total;
  branches_ = std::move(kept);
}

void AnyonSystem::merge_branches() {
  if (branches_.size() < 2) return;
  const int stride = columns();
  auto sorted_rows = [&](const Branch& b) {
    std::vector<std::size_t> idx(b.terms());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
      return std::lexicographical_compare(b.configs.begin() + x * stride, b.configs.begin() + (x + 1) * stride,
                                          b.configs.begin() + y * stride, b.configs.begin() + (y + 1) * stride);
    });
    return idx;
  };
  std::vector<std::vector<std::size_t>> orders;
  for (const Branch& b : branches_) orders.push_back(sorted_rows(b));
  std::vector<Branch> out;
  std::vector<std::size_t> out_src;
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    const Branch& b = branches_[i];
    bool merged = false;
    for (std::size_t k = 0; k < out.size() && !merged; ++k) {
      const Branch& o = branches_[out_src[k]];
      if (o.terms() != b.terms() || o.token_partner != b.token_partner) continue;
      const auto& oi = orders[out_src[k]];
      const auto& bi = orders[i];
      bool same = true;
      // Equal up to a global phase fixed by the first row.
      Amplitude phase = 1.0;
      for (std::size_t t = 0; t < b.terms() && same; ++t) {
        same = std::equal(o.configs.begin() + oi[t] * stride, o.configs.begin() + (oi[t] + 1) * stride,
                          b.configs.begin() + bi[t] * stride);
        if (!same) break;
        if (t == 0) {
          phase = b.amps[bi[0]] / o.amps[oi[0]];
          phase /= std::abs(phase);
        }
        same = std::abs(o.amps[oi[t]] * phase - b.amps[bi[t]]) < 1e-10;
      }
      if (same) {
        out[k].weight += b.weight;
        merged = true;
      }
    }
    if (!merged) {
      out.push_back(b);
      out_src.push_back(i);
    }
  }
  branches_ = std::move(out);
}

FusionOutcome AnyonSystem::fuse(ParticleId i, ParticleId j) {
  if (i == j) throw StructuralError("cannot fuse an anyon with itself");
  if (!alive(i) || !alive(j)) throw StructuralError("particle does not exist");
  if (is_composite(i) || is_composite(j)) throw StructuralError("fusion of composite particles is not supported");
  ParticleId left = position_of(i) < position_of(j) ? i : j;
  ParticleId right = left == i ? j : i;
  // Bring the right anyon next to the left one; it passes over the others,
  // which leaves their fluxes alone.
  while (position_of(right) > position_of(left) + 1) exchange(position_of(right) - 1, Direction::Ccw);

  const FiniteGroup& G = *G_;
  const int stride = columns();
  const int cl = column_of(left);
  const int cr = column_of(right);
  const std::array<int, 2> pair_cols{cl, cr};
  const std::vector<int> rest = other_columns(stride, pair_cols);

  struct Work {
    Grouping groups;
    std::vector<Amplitude> alpha;  // per (rest, class) group
    std::vector<int> alpha_class;
    std::vector<int> alpha_rest;
    double p = 0;
    bool blocked = false;
  };
  std::vector<Work> work(branches_.size());
  double p_total = 0;
  for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
    Branch& b = branches_[bi];
    Work& w = work[bi];
    const int tl = b.token_partner[cl];
    const int tr = b.token_partner[cr];
    if ((tl != -1 || tr != -1) && !(tl == cr && tr == cl)) {
      w.blocked = true;
      continue;
    }
    w.groups = group_terms(b, stride, rest);
    std::unordered_map<long long, int> slot;
    for (std::size_t t = 0; t < b.terms(); ++t) {
      const std::uint16_t* row = b.configs.data() + t * stride;
      if (row[cr] != G.inv(row[cl])) continue;
      const int c = G.class_of(row[cl]);
      const long long key = static_cast<long long>(w.groups.group_of_term[t]) * 100003 + c;
      auto [it, fresh] = slot.emplace(key, static_cast<int>(w.alpha.size()));
      if (fresh) {
        w.alpha.push_back(0.0);
        w.alpha_class.push_back(c);
        w.alpha_rest.push_back(w.groups.group_of_term[t]);
      }
      w.alpha[it->second] += b.amps[t] / std::sqrt(static_cast<double>(G.classes()[c].size()));
    }
    w.p = std::min(1.0, norm2(w.alpha));
    p_total += b.weight * w.p;
  }
  p_total = std::clamp(p_total, 0.0, 1.0);
  const bool vacuum = rng_.uniform() < p_total;
  log("fuse " + std::to_string(i) + " " + std::to_string(j) + " p_vacuum=" + fmt_prob(p_total) + " -> " +
      (vacuum ? "vacuum" : "residual"));

  std::vector<Branch> next;
  for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
    Branch& b = branches_[bi];
    Work& w = work[bi];
    const double pb = w.blocked ? 0.0 : w.p;
    if (vacuum) {
      if (pb <= 0) continue;
      // Rest state: sum of overlaps per rest configuration.
      Branch nb;
      nb.weight = b.weight * pb / p_total;
      nb.token_partner = b.token_partner;
      std::vector<Amplitude> acc(w.groups.first_term.size(), 0.0);
      for (std::size_t k = 0; k < w.alpha.size(); ++k) acc[w.alpha_rest[k]] += w.alpha[k];
      for (std::size_t r = 0; r < acc.size(); ++r) {
        if (std::abs(acc[r]) < kPruneAmp) continue;
        const std::uint16_t* row = b.configs.data() + w.groups.first_term[r] * stride;
        nb.configs.insert(nb.configs.end(), row, row + stride);
        nb.amps.push_back(acc[r]);
      }
      next.push_back(std::move(nb));
    } else {
      if (pb >= 1.0 - 1e-15) continue;
      Branch nb = b;
      nb.weight = b.weight * (1.0 - pb) / (1.0 - p_total);
      if (!w.blocked && !w.alpha.empty()) {
        std::unordered_map<std::string, std::size_t> index;
        const std::vector<int> all = other_columns(stride, {});
        for (std::size_t t = 0; t < nb.terms(); ++t) index.emplace(row_key(nb.configs.data() + t * stride, all), t);
        std::vector<std::uint16_t> row(stride);
        for (std::size_t k = 0; k < w.alpha.size(); ++k) {
          const auto& cls = G.classes()[w.alpha_class[k]];
          const Amplitude sub = w.alpha[k] / std::sqrt(static_cast<double>(cls.size()));
          const std::uint16_t* base = b.configs.data() + w.groups.first_term[w.alpha_rest[k]] * stride;
          std::copy_n(base, stride, row.begin());
          for (int g : cls) {
            row[cl] = static_cast<std::uint16_t>(g);
            row[cr] = static_cast<std::uint16_t>(G.inv(g));
            auto [it, fresh] = index.emplace(row_key(row.data(), all), nb.terms());
            if (fresh) {
              nb.configs.insert(nb.configs.end(), row.begin(), row.end());
              nb.amps.push_back(0.0);
            }
            nb.amps[it->second] -= sub;
          }
        }
      }
      next.push_back(std::move(nb));
    }
  }
  branches_ = std::move(next);

  if (vacuum) {
    const std::vector<int> regs{particles_[left].regs[0], particles_[right].regs[0]};
    // Rows already hold the rest configuration; dropping columns keeps them distinct.
    remove_registers(regs);
    particles_[left].alive = particles_[right].alive = false;
    line_.erase(std::find(line_.begin(), line_.end(), left));
    line_.erase(std::find(line_.begin(), line_.end(), right));
  } else {
    particles_[left].regs.push_back(particles_[right].regs[0]);
    particles_[right].alive = false;
    line_.erase(std::find(line_.begin(), line_.end(), right));
  }
  normalize_branches();
  merge_branches();
  return {vacuum ? FusionResult::Vacuum : FusionResult::Residual, p_total};
}

std::vector<double> AnyonSystem::flux_distribution(ParticleId p) const {
  std::vector<double> dist(G_->order(), 0.0);
  const int stride = columns();
  for (const Branch& b : branches_) {
    for (std::size_t t = 0; t < b.terms(); ++t) {
      dist[flux_in_row(b.configs.data() + t * stride, p)] += b.weight * std::norm(b.amps[t]);
    }
  }
  return dist;
}

bool AnyonSystem::flux_is_trivial_destructive(ParticleId p) {
  if (!alive(p)) throw StructuralError("particle does not exist");
  const std::vector<double> dist = flux_distribution(p);
  const double u = rng_.uniform();
  double acc = 0;
  int g = 0;
  for (int x = 0; x < G_->order(); ++x) {
    if (dist[x] <= 0) continue;
    g = x;
    acc += dist[x];
    if (u < acc) break;
  }
  log("flux " + std::to_string(p) + " p=" + fmt_prob(dist[g]) + " -> " + (g == 0 ? "trivial" : "nontrivial"));
  const int stride = columns();
  for (Branch& b : branches_) {
    double kept = 0;
    for (std::size_t t = 0; t < b.terms(); ++t) {
      if (flux_in_row(b.configs.data() + t * stride, p) != g) {
        b.amps[t] = 0.0;
      } else {
        kept += std::norm(b.amps[t]);
      }
    }
    b.weight *= kept;
  }
  normalize_branches();
  remove_registers(particles_[p].regs);
  particles_[p].alive = false;
  line_.erase(std::find(line_.begin(), line_.end(), p));
  merge_branches();
  return g == 0;
}

int AnyonSystem::create_charge_probe(RepresentationPtr rep) {
  if (!rep || static_cast<int>(rep->matrices.size()) != G_->order()) throw NotAHomomorphism("representation does not match group");
  const int m = rep->dim;
  const int stride = columns();
  std::vector<std::vector<std::uint16_t>> vals;
  std::vector<Amplitude> amps;
  for (int n = 0; n < m; ++n) {
    vals.push_back({static_cast<std::uint16_t>(n), static_cast<std::uint16_t>(n)});
    amps.push_back(1.0 / std::sqrt(static_cast<double>(m)));
  }
  add_columns(2, [&](Branch& b, auto& cfg, auto& out) { extend_rows(b, stride, vals, amps, cfg, out); });
  const int r = static_cast<int>(col_of_reg_.size());
  probes_.push_back({std::move(rep), r - 2, r - 1, true});
  return static_cast<int>(probes_.size()) - 1;
}

void AnyonSystem::apply_probe_rep(int probe, const std::function<int(const std::uint16_t*)>& flux_of_row) {
  const Probe& pr = probes_.at(probe);
  if (!pr.alive) throw StructuralError("probe was already fused");
  const Representation& R = *pr.rep;
  const int m = R.dim;
  const int stride = columns();
  const int pc = col_of_reg_[pr.left_reg];
  const std::vector<int> all = other_columns(stride, {});
  for (Branch& b : branches_) {
    std::vector<std::uint16_t> cfg;
    std::vector<Amplitude> amps;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::uint16_t> row(stride);
    for (std::size_t t = 0; t < b.terms(); ++t) {
      const std::uint16_t* src = b.configs.data() + t * stride;
      const int g = flux_of_row(src);
      const int n = src[pc];
      std::copy_n(src, stride, row.begin());
      for (int k = 0; k < m; ++k) {
        const Amplitude coef = R.entry(g, k, n);
        if (std::abs(coef) < 1e-15) continue;
        row[pc] = static_cast<std::uint16_t>(k);
        auto [it, fresh] = index.emplace(row_key(row.data(), all), amps.size());
        if (fresh) {
          cfg.insert(cfg.end(), row.begin(), row.end());
          amps.push_back(0.0);
        }
        amps[it->second] += b.amps[t] * coef;
      }
    }
    b.configs = std::move(cfg);
    b.amps = std::move(amps);
  }
  normalize_branches();
}

void AnyonSystem::encircle_with_probe(int probe, std::span<const ParticleId> anyons) {
  if (anyons.empty()) return;
  std::vector<int> pos;
  for (ParticleId a : anyons) pos.push_back(position_of(a));
  std::sort(pos.begin(), pos.end());
  for (std::size_t k = 1; k < pos.size(); ++k) {
    if (pos[k] != pos[k - 1] + 1) throw StructuralError("encircled anyons must be contiguous");
  }
  std::vector<ParticleId> ordered;
  for (int p : pos) ordered.push_back(line_[p]);
  lasso(probe, ordered);
}

void AnyonSystem::lasso(int probe, std::span<const ParticleId> anyons) {
  std::vector<ParticleId> list(anyons.begin(), anyons.end());
  for (ParticleId a : list) {
    if (!alive(a)) throw StructuralError("particle does not exist");
  }
  apply_probe_rep(probe, [&](const std::uint16_t* row) {
    int g = 0;
    for (ParticleId a : list) g = G_->mul(g, flux_in_row(row, a));
    return g;
  });
}

bool AnyonSystem::fuse_probe(int probe) {
  Probe& pr = probes_.at(probe);
  if (!pr.alive) throw StructuralError("probe was already fused");
  const int m = pr.rep->dim;
  const int stride = columns();
  const int c1 = col_of_reg_[pr.left_reg];
  const int c2 = col_of_reg_[pr.right_reg];
  const std::array<int, 2> pcols{c1, c2};
  const std::vector<int> rest = other_columns(stride, pcols);
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));

  std::vector<Grouping> groups(branches_.size());
  std::vector<std::vector<Amplitude>> alpha(branches_.size());
  std::vector<double> pb(branches_.size(), 0.0);
  double p_total = 0;
  for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
    const Branch& b = branches_[bi];
    groups[bi] = group_terms(b, stride, rest);
    alpha[bi].assign(groups[bi].first_term.size(), 0.0);
    for (std::size_t t = 0; t < b.terms(); ++t) {
      const std::uint16_t* row = b.configs.data() + t * stride;
      if (row[c1] == row[c2]) alpha[bi][groups[bi].group_of_term[t]] += b.amps[t] * inv_sqrt_m;
    }
    pb[bi] = std::min(1.0, norm2(alpha[bi]));
    p_total += b.weight * pb[bi];
  }
  p_total = std::clamp(p_total, 0.0, 1.0);
  const bool vacuum = rng_.uniform() < p_total;
  log("probe-fuse " + std::to_string(probe) + " p_vacuum=" + fmt_prob(p_total) + " -> " +
      (vacuum ? "vacuum" : "residual"));

  std::vector<Branch> next;
  for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
    const Branch& b = branches_[bi];
    if (vacuum) {
      if (pb[bi] <= 0) continue;
      Branch nb;
      nb.weight = b.weight * pb[bi] / p_total;
      nb.token_partner = b.token_partner;
      for (std::size_t r = 0; r < alpha[bi].size(); ++r) {
        if (std::abs(alpha[bi][r]) < kPruneAmp) continue;
        const std::uint16_t* row = b.configs.data() + groups[bi].first_term[r] * stride;
        nb.configs.insert(nb.configs.end(), row, row + stride);
        nb.amps.push_back(alpha[bi][r]);
      }
      next.push_back(std::move(nb));
    } else {
      if (pb[bi] >= 1.0 - 1e-15) continue;
      Branch nb;
      nb.weight = b.weight * (1.0 - pb[bi]) / (1.0 - p_total);
      nb.token_partner = b.token_partner;
      // Subtract the vacuum component, adding any missing diagonal rows.
      std::unordered_map<std::string, std::size_t> index;
      const std::vector<int> all = other_columns(stride, {});
      nb.configs = b.configs;
      nb.amps = b.amps;
      for (std::size_t t = 0; t < nb.terms(); ++t) index.emplace(row_key(nb.configs.data() + t * stride, all), t);
      std::vector<std::uint16_t> row(stride);
      for (std::size_t r = 0; r < alpha[bi].size(); ++r) {
        if (std::abs(alpha[bi][r]) < kPruneAmp) continue;
        std::copy_n(b.configs.data() + groups[bi].first_term[r] * stride, stride, row.begin());
        for (int n = 0; n < m; ++n) {
          row[c1] = row[c2] = static_cast<std::uint16_t>(n);
          auto [it, fresh] = index.emplace(row_key(row.data(), all), nb.terms());
          if (fresh) {
            nb.configs.insert(nb.configs.end(), row.begin(), row.end());
            nb.amps.push_back(0.0);
          }
          nb.amps[it->second] -= alpha[bi][r] * inv_sqrt_m;
        }
      }
      next.push_back(std::move(nb));
    }
  }
  branches_ = std::move(next);
  pr.alive = false;
  const std::array<int, 2> regs{pr.left_reg, pr.right_reg};
  if (vacuum) {
    remove_registers(regs);
    normalize_branches();
    merge_branches();
  } else {
    normalize_branches();
    discard_registers(regs, nullptr);
  }
  return vacuum;
}

void AnyonSystem::discard(std::span<const ParticleId> particles, const Unravelling* basis) {
  std::vector<int> regs;
  for (ParticleId p : particles) {
    if (!alive(p)) throw StructuralError("particle does not exist");
    regs.insert(regs.end(), particles_[p].regs.begin(), particles_[p].regs.end());
  }
  for (ParticleId p : particles) {
    particles_[p].alive = false;
    line_.erase(std::find(line_.begin(), line_.end(), p));
  }
  discard_registers(regs, basis);
}

void AnyonSystem::discard_registers(std::span<const int> regs, const Unravelling* basis) {
  const int stride = columns();
  std::vector<int> dcols;
  for (int r : regs) dcols.push_back(col_of_reg_[r]);
  const std::vector<int> rest = other_columns(stride, dcols);

  std::unordered_map<std::string, int> key_index;
  if (basis) {
    for (std::size_t k = 0; k < basis->keys.size(); ++k) {
      const auto& key = basis->keys[k];
      if (key.size() != dcols.size()) throw StructuralError("unravelling keys have the wrong width");
      std::string s(key.size() * 2, '\0');
      for (std::size_t i = 0; i < key.size(); ++i) {
        s[2 * i] = static_cast<char>(key[i] & 0xff);
        s[2 * i + 1] = static_cast<char>(key[i] >> 8);
      }
      key_index.emplace(std::move(s), static_cast<int>(k));
    }
  }
  for (Branch& b : branches_) {
    const Grouping rg = group_terms(b, stride, rest);
    const std::size_t nrows = rg.first_term.size();
    // Columns of the matrix M[row][col]: discarded configurations or basis vectors.
    std::vector<std::vector<Amplitude>> cols;
    if (basis) {
      cols.assign(basis->vectors.size(), std::vector<Amplitude>(nrows, 0.0));
      for (std::size_t t = 0; t < b.terms(); ++t) {
        auto it = key_index.find(row_key(b.configs.data() + t * stride, dcols));
        if (it == key_index.end()) throw StructuralError("discarded state leaves the unravelling basis");
        for (std::size_t j = 0; j < basis->vectors.size(); ++j) {
          const Amplitude v = basis->vectors[j][it->second];
          if (v != 0.0) cols[j][rg.group_of_term[t]] += std::conj(v) * b.amps[t];
        }
      }
    } else {
      const Grouping dg = group_terms(b, stride, dcols);
      cols.assign(dg.first_term.size(), std::vector<Amplitude>(nrows, 0.0));
      for (std::size_t t = 0; t < b.terms(); ++t) cols[dg.group_of_term[t]][rg.group_of_term[t]] += b.amps[t];
    }
    std::vector<double> w(cols.size());
    std::size_t k0 = 0;
    double total = 0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      w[k] = norm2(cols[k]);
      total += w[k];
      if (w[k] > w[k0]) k0 = k;
    }
    // Separable iff every column is parallel to the heaviest one.
    bool separable = true;
    for (std::size_t k = 0; k < cols.size() && separable; ++k) {
      if (k == k0 || w[k] < 1e-24) continue;
      Amplitude ip = 0;
      for (std::size_t r = 0; r < nrows; ++r) ip += std::conj(cols[k0][r]) * cols[k][r];
      separable = std::norm(ip) >= w[k0] * w[k] * (1.0 - 1e-10);
    }
    std::size_t pick = k0;
    if (!separable) {
      const double u = rng_.uniform() * total;
      double acc = 0;
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (w[k] <= 0) continue;
        pick = k;
        acc += w[k];
        if (u < acc) break;
      }
      log("discard outcome=" + std::to_string(pick) + " p=" + fmt_prob(w[pick] / total));
    }
    std::vector<std::uint16_t> cfg;
    std::vector<Amplitude> amps;
    for (std::size_t r = 0; r < nrows; ++r) {
      if (std::abs(cols[pick][r]) < kPruneAmp) continue;
      const std::uint16_t* row = b.configs.data() + rg.first_term[r] * stride;
      cfg.insert(cfg.end(), row, row + stride);
      amps.push_back(cols[pick][r]);
    }
    b.configs = std::move(cfg);
    b.amps = std::move(amps);
  }
  remove_registers(regs);
  normalize_branches();
  merge_branches();
}

void AnyonSystem::permute_rows(const std::function<void(std::uint16_t*)>& f) {
  const int stride = columns();
  for (Branch& b : branches_) {
    for (std::size_t t = 0; t < b.terms(); ++t) f(b.configs.data() + t * stride);
  }
}

double AnyonSystem::total_weight() const {
  double s = 0;
  for (const Branch& b : branches_) s += b.weight;
  return s;
}

double AnyonSystem::max_norm_error() const {
  double e = 0;
  for (const Branch& b : branches_) e = std::max(e, std::abs(norm2(b.amps) - 1.0));
  return e;
}

}  // namespace fluxsim
