#include <algorithm>
#include <cmath>
#include <map>

#include "fluxsim/errors.hpp"
#include "fluxsim/gate.hpp"

namespace fluxsim {

namespace {

int mod(long x, int d) {
  const long r = x % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

int default_copies(double p) {
  return static_cast<int>(std::ceil(std::log(1e-4) / std::log(1.0 - p)));
}

// Same program with every constant replaced by its section in G.
Program lift_program(const Program& f, const CosetContext& ctx) {
  Program out(f.arity());
  if (f.empty()) return out;
  std::vector<int> map(f.nodes().size(), kEmpty);
  auto m = [&](int x) { return x == kEmpty ? kEmpty : map[x]; };
  for (std::size_t i = 0; i < f.nodes().size(); ++i) {
    const Node& n = f.nodes()[i];
    switch (n.kind) {
      case NodeKind::Constant: map[i] = out.constant(ctx.section[n.lhs]); break;
      case NodeKind::Input: map[i] = out.input(n.lhs); break;
      case NodeKind::InputInverse: map[i] = out.input_inverse(n.lhs); break;
      case NodeKind::Concat: map[i] = out.concat(m(n.lhs), m(n.rhs)); break;
      case NodeKind::Inverse: map[i] = out.inverse(m(n.lhs)); break;
      case NodeKind::Commutator: map[i] = out.commutator(m(n.lhs), m(n.rhs)); break;
    }
  }
  out.set_root(m(f.root()));
  return out;
}

}  // namespace

QuditRegister::QuditRegister(GroupPtr Q, std::uint64_t seed, RegisterOptions options)
    : coset_(false),
      ctx_(trivial_coset_context(Q)),
      q_(find_qudit_params(*Q, options.prefer_d)),
      opt_(std::move(options)),
      sys_(Q, seed) {
  init();
}

QuditRegister::QuditRegister(CosetContext ctx, std::uint64_t seed, RegisterOptions options)
    : coset_(true),
      ctx_(std::move(ctx)),
      q_(find_qudit_params(*ctx_.quotient, options.prefer_d)),
      opt_(std::move(options)),
      sys_(ctx_.G, seed) {
  init();
}

QuditRegister::QuditRegister(CosetContext ctx, QuditParams params, std::uint64_t seed, RegisterOptions options)
    : coset_(true), ctx_(std::move(ctx)), q_(params), opt_(std::move(options)), sys_(ctx_.G, seed) {
  if (!valid_qudit_params(*ctx_.quotient, q_)) throw NoSuchParameters("invalid qudit parameters");
  init();
}

void QuditRegister::init() {
  const FiniteGroup& Q = *ctx_.quotient;
  const FiniteGroup& G = *ctx_.G;
  syn_ = std::make_unique<Synthesizer>(ctx_.quotient);
  basis_ = basis_fluxes(Q, q_);
  fiber_size_.assign(Q.order(), 0);
  for (int g = 0; g < G.order(); ++g) {
    if (ctx_.epi[g] >= 0) ++fiber_size_[ctx_.epi[g]];
  }
  digit_of_q_.assign(Q.order(), -1);
  for (int n = 0; n < q_.d; ++n) digit_of_q_[basis_[n]] = n;

  // Classes of G weighted by how much of them maps into the class of b.
  const auto& cb = Q.class_elements_of(q_.b);
  std::vector<char> in_cb(Q.order(), 0);
  for (int x : cb) in_cb[x] = 1;
  vacuum_model_.class_weights.assign(G.classes().size(), 0.0);
  double total = 0;
  for (int g = 0; g < G.order(); ++g) {
    const int x = ctx_.epi[g];
    if (x >= 0 && in_cb[x]) {
      vacuum_model_.class_weights[G.class_of(g)] += 1;
      total += 1;
    }
  }
  const double cw = opt_.charged_weight;
  if (cw < 0 || cw > 1) throw InvalidSectorModel("charged weight must lie in [0, 1]");
  for (double& w : vacuum_model_.class_weights) w *= (1.0 - cw) / total;
  vacuum_model_.charged_weight = cw;
  if (opt_.xzero_vacuum) {
    opt_.xzero_vacuum->validate(G);
    vacuum_model_ = *opt_.xzero_vacuum;
  }
}

PairId QuditRegister::make_ancilla(int x) {
  if (!coset_) return sys_.create_flux_ancilla(x);
  const FiniteGroup& G = *ctx_.G;
  // rho_x: one branch per class of G, uniform over the part of the fiber in it.
  std::vector<std::vector<int>> by_class(G.classes().size());
  int fiber = 0;
  for (int g = 0; g < G.order(); ++g) {
    if (ctx_.epi[g] == x) {
      by_class[G.class_of(g)].push_back(g);
      ++fiber;
    }
  }
  if (fiber == 0) throw StructuralError("element outside the quotient");
  std::vector<double> weights;
  std::vector<std::vector<int>> fluxes;
  std::vector<std::vector<Amplitude>> amps;
  for (auto& members : by_class) {
    if (members.empty()) continue;
    weights.push_back(static_cast<double>(members.size()) / fiber);
    amps.emplace_back(members.size(), 1.0 / std::sqrt(static_cast<double>(members.size())));
    fluxes.push_back(std::move(members));
  }
  return sys_.create_pair_mixture(weights, fluxes, amps);
}

int QuditRegister::adopt(PairId p) {
  qudits_.push_back(p);
  alive_.push_back(1);
  return static_cast<int>(qudits_.size()) - 1;
}

void QuditRegister::rebind(int q, PairId p) {
  if (!alive(q)) throw PositionOutOfRange("no live qudit " + std::to_string(q));
  qudits_[q] = p;
}

void QuditRegister::forget(int q) {
  if (!alive(q)) throw PositionOutOfRange("no live qudit " + std::to_string(q));
  alive_[q] = 0;
}

bool QuditRegister::alive(int q) const {
  return q >= 0 && q < static_cast<int>(qudits_.size()) && alive_[q];
}

PairId QuditRegister::pair(int q) const {
  if (!alive(q)) throw PositionOutOfRange("no live qudit " + std::to_string(q));
  return qudits_[q];
}

int QuditRegister::digit_of_flux(int g) const {
  const int x = ctx_.epi[g];
  return x < 0 ? -1 : digit_of_q_[x];
}

int QuditRegister::encode(int digit) {
  if (digit < 0 || digit >= q_.d) {
    throw DigitOutOfRange("digit " + std::to_string(digit) + " outside 0.." + std::to_string(q_.d - 1));
  }
  return adopt(make_ancilla(basis_[digit]));
}

void QuditRegister::discard_particles(std::vector<ParticleId> ps) {
  std::erase_if(ps, [&](ParticleId p) { return !sys_.alive(p); });
  if (!ps.empty()) sys_.discard(ps);
}

QuditRegister::Function QuditRegister::make_function(const Program& f) const {
  Function fn;
  fn.q_prog = f;
  fn.g_prog = coset_ ? lift_program(f, ctx_) : f;
  fn.compiled = f.flattened_length() > opt_.compile_threshold;
  if (!fn.compiled) fn.word = f.flatten(*ctx_.quotient);
  return fn;
}

QuditRegister::Function& QuditRegister::function(const std::string& name) {
  auto it = functions_.find(name);
  if (it != functions_.end()) return it->second;
  Program p;
  if (name == "toffoli") {
    p = toffoli_program(*syn_, q_);
  } else if (name == "xzero") {
    p = xzero_program(*syn_, q_);
  } else {
    throw StructuralError("unknown function " + name);
  }
  return functions_.emplace(name, make_function(p)).first->second;
}

void QuditRegister::apply_function(Function& fn, std::span<const PairId> controls, PairId target, int power) {
  if (static_cast<int>(controls.size()) != fn.q_prog.arity()) throw ArityMismatch("control count differs from arity");
  if (!fn.compiled) {
    auto atom = [&](const Atom& a, int s) {
      switch (a.kind) {
        case AtomKind::Input: sys_.conjugate_pair(controls[a.value], target, s); break;
        case AtomKind::InputInverse: sys_.conjugate_pair(controls[a.value], target, -s); break;
        case AtomKind::Constant: {
          const FiniteGroup& Q = *ctx_.quotient;
          const int c = s > 0 ? a.value : Q.inv(a.value);
          if (fiber_size_[c] == 1) {
            // A definite-flux ancilla: braiding it round the target and
            // tracing it out is exactly conjugation of the target by c.
            conjugate_rows(target, ctx_.section[c]);
          } else {
            const PairId anc = make_ancilla(c);
            sys_.conjugate_pair(anc, target, 1);
            discard_particles({anc.left, anc.right});
          }
          break;
        }
      }
    };
    // The atom nearest the target acts first.
    if (power > 0) {
      for (auto it = fn.word.rbegin(); it != fn.word.rend(); ++it) atom(*it, 1);
    } else {
      for (const Atom& a : fn.word) atom(a, -1);
    }
    return;
  }
  for (const PairId& c : controls) {
    if (!net_flux_in_kernel(c)) throw NontrivialFlux("control pair has nontrivial net flux");
  }
  if (!net_flux_in_kernel(target)) throw NontrivialFlux("target pair has nontrivial net flux");
  const FiniteGroup& G = *ctx_.G;
  const int tl = sys_.column_of(target.left);
  const int tr = sys_.column_of(target.right);
  const std::uint64_t n = static_cast<std::uint64_t>(G.order());
  std::vector<int> env(controls.size());
  sys_.permute_rows([&](std::uint16_t* row) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < controls.size(); ++i) {
      env[i] = sys_.flux_in_row(row, controls[i].left);
      key = key * n + static_cast<std::uint64_t>(env[i]);
    }
    auto it = fn.memo.find(key);
    if (it == fn.memo.end()) it = fn.memo.emplace(key, fn.g_prog.evaluate(G, env)).first;
    const int f = power > 0 ? it->second : G.inv(it->second);
    row[tl] = static_cast<std::uint16_t>(G.conj(f, row[tl]));
    row[tr] = static_cast<std::uint16_t>(G.conj(f, row[tr]));
  });
}

bool QuditRegister::net_flux_in_kernel(PairId p) const {
  const FiniteGroup& G = *ctx_.G;
  const int e = ctx_.quotient->identity();
  const int stride = sys_.columns();
  for (const Branch& b : sys_.branches()) {
    for (std::size_t t = 0; t < b.terms(); ++t) {
      const std::uint16_t* row = b.configs.data() + t * stride;
      if (ctx_.epi[G.mul(sys_.flux_in_row(row, p.left), sys_.flux_in_row(row, p.right))] != e) return false;
    }
  }
  return true;
}

void QuditRegister::xzero_conjugation(PairId control, PairId target, int power) {
  if (power != 1 && power != -1) throw StructuralError("power must be 1 or -1");
  const PairId ctl[1] = {control};
  apply_function(function("xzero"), ctl, target, power);
}

void QuditRegister::conjugate_rows(PairId target, int g) {
  if (!sys_.pair_is_neutral(target)) throw NontrivialFlux("target pair has nontrivial net flux");
  const FiniteGroup& G = *ctx_.G;
  const int tl = sys_.column_of(target.left);
  const int tr = sys_.column_of(target.right);
  sys_.permute_rows([&](std::uint16_t* row) {
    row[tl] = static_cast<std::uint16_t>(G.conj(g, row[tl]));
    row[tr] = static_cast<std::uint16_t>(G.conj(g, row[tr]));
  });
}

void QuditRegister::conjugate_by_function(const Program& f, std::span<const int> controls, int target, int power) {
  if (power != 1 && power != -1) throw StructuralError("power must be 1 or -1");
  std::vector<PairId> cs;
  for (int c : controls) {
    if (c == target) throw StructuralError("target is also a control");
    cs.push_back(pair(c));
  }
  Function fn = make_function(f);
  apply_function(fn, cs, pair(target), power);
}

void QuditRegister::toffoli(int q1, int q2, int q3, int power) {
  if (q1 == q2 || q1 == q3 || q2 == q3) throw StructuralError("toffoli needs three distinct qudits");
  const int p = mod(power, q_.d);
  if (p == 0) return;
  Function& fn = function("toffoli");
  const PairId cs[2] = {pair(q1), pair(q2)};
  const PairId t = pair(q3);
  if (p == q_.d - 1 && q_.d > 2) {
    apply_function(fn, cs, t, -1);
    return;
  }
  for (int k = 0; k < p; ++k) apply_function(fn, cs, t, 1);
}

void QuditRegister::controlled_sum(int qc, int qt, int power) {
  if (qc == qt) throw StructuralError("controlled sum needs two distinct qudits");
  if (mod(power, q_.d) == 0) return;
  const int one = encode(1);
  toffoli(one, qc, qt, power);
  discard(one);
}

void QuditRegister::gate_X(int q, int power) {
  if (mod(power, q_.d) == 0) return;
  const int one1 = encode(1);
  const int one2 = encode(1);
  toffoli(one1, one2, q, power);
  discard(one1);
  discard(one2);
}

void QuditRegister::gate_Z(int q, int power) {
  if (xone_pool_.empty()) throw BootstrapRequired("Z needs an x~1 ancilla");
  controlled_sum(q, xone(), power);
}

int QuditRegister::xone() const {
  if (xone_pool_.empty()) throw BootstrapRequired("no x~1 ancilla");
  return xone_pool_.front();
}

int QuditRegister::iy_reference() const {
  if (iy_ref_ < 0) throw BootstrapRequired("no iY reference");
  return iy_ref_;
}

void QuditRegister::discard(int q, DiscardBasis basis) {
  const PairId p = pair(q);
  if (basis == DiscardBasis::Flux) {
    forget(q);
    discard_particles({p.left, p.right});
    return;
  }
  const Unravelling u = unravelling(p, basis);
  forget(q);
  const ParticleId ps[2] = {p.left, p.right};
  sys_.discard(ps, &u);
}

Unravelling QuditRegister::unravelling(const PairId&, DiscardBasis basis) const {
  const FiniteGroup& G = *ctx_.G;
  const int d = q_.d;
  if (basis == DiscardBasis::Y && d != 2) throw StructuralError("Y unravelling is for qubits only");
  std::vector<std::vector<int>> fiber(d);
  for (int g = 0; g < G.order(); ++g) {
    const int n = digit_of_flux(g);
    if (n >= 0) fiber[n].push_back(g);
  }
  Unravelling u;
  std::vector<int> digit_of_key;
  for (int n = 0; n < d; ++n) {
    for (int g : fiber[n]) {
      u.keys.push_back({static_cast<std::uint16_t>(g), static_cast<std::uint16_t>(G.inv(g))});
      digit_of_key.push_back(n);
    }
  }
  for (int j = 0; j < d; ++j) {
    std::vector<Amplitude> v(u.keys.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const int n = digit_of_key[k];
      Amplitude c;
      if (basis == DiscardBasis::X) {
        c = oracle::omega(d, -j * n);
      } else {
        c = n == 0 ? Amplitude(1.0) : Amplitude(0.0, j == 0 ? 1.0 : -1.0);
      }
      v[k] = c / std::sqrt(static_cast<double>(d * fiber[n].size()));
    }
    u.vectors.push_back(std::move(v));
  }
  return u;
}

LogicalOutcome QuditRegister::measure_Z(int q, int copies) {
  const int d = q_.d;
  const double C = static_cast<double>(ctx_.quotient->class_elements_of(q_.b).size());
  // A digit is a candidate in 2 of every d tests, so d times the per-test
  // count gives each digit twice the chances default_copies asks for.
  if (copies <= 0) copies = d * default_copies(1.0 / C);
  LogicalOutcome out;
  bool found = false;
  // Leftovers of each copy are traced out at once; that is the same partial
  // trace as keeping them, and it keeps the state small.
  for (int c = 0; c < copies && !found; ++c) {
    const int cp = encode(0);
    controlled_sum(q, cp);
    const PairId p = pair(cp);
    forget(cp);
    // Each copy is tested at both ends against different candidates.
    const int j1 = mod(2 * c, d);
    const PairId a1 = make_ancilla(basis_[j1]);
    ++out.fusions;
    if (sys_.fuse(p.left, a1.right).result == FusionResult::Vacuum) {
      out.digit = j1;
      discard_particles({p.right, a1.left});
      found = true;
      break;
    }
    // a1.left would sit between p.right and a2; passing it conjugates a2.left.
    discard_particles({p.left, a1.left});
    const int j2 = mod(2 * c + 1, d);
    const PairId a2 = make_ancilla(basis_[j2]);
    ++out.fusions;
    if (sys_.fuse(p.right, a2.left).result == FusionResult::Vacuum) {
      out.digit = j2;
      discard_particles({a2.right});
      found = true;
      break;
    }
    discard_particles({p.right, a2.right});
  }
  if (!found) {
    sys_.log("mz inconclusive fusions=" + std::to_string(out.fusions));
    throw Inconclusive("no vacuum in " + std::to_string(out.fusions) + " fusions");
  }
  out.confidence = 1.0;
  sys_.log("mz digit=" + std::to_string(out.digit) + " fusions=" + std::to_string(out.fusions));
  return out;
}

LogicalOutcome QuditRegister::measure_X(int q, int copies) {
  const int d = q_.d;
  const double C = static_cast<double>(ctx_.quotient->class_elements_of(q_.b).size());
  if (copies <= 0) copies = default_copies(1.0 / C);
  LogicalOutcome out;
  bool found = false;
  for (int c = 0; c < copies; ++c) {
    const int i = c % d;
    const int ctrl = take_xzero();
    controlled_sum(ctrl, q, -1);
    if (i != 0) gate_Z(ctrl, i);
    const PairId p = pair(ctrl);
    forget(ctrl);
    ++out.fusions;
    if (sys_.fuse(p.left, p.right).result == FusionResult::Vacuum) {
      out.digit = i;
      found = true;
      break;
    }
    discard_particles({p.left});
  }
  if (!found) {
    sys_.log("mx inconclusive fusions=" + std::to_string(out.fusions));
    throw Inconclusive("no vacuum in " + std::to_string(out.fusions) + " fusions");
  }
  out.confidence = 1.0;
  sys_.log("mx digit=" + std::to_string(out.digit) + " fusions=" + std::to_string(out.fusions));
  return out;
}

int QuditRegister::take_xzero() {
  if (!xzero_pool_.empty()) {
    const int q = xzero_pool_.back();
    xzero_pool_.pop_back();
    return q;
  }
  return prepare_xzero();
}

int QuditRegister::prepare_xzero(int retry_cap) {
  if (opt_.xzero_fast_forward && xzero_template_) return fast_forward_xzero();
  Function& fn = function("xzero");
  const int cap = retry_cap > 0 ? retry_cap : opt_.xzero_retry_cap;
  for (int attempt = 0; attempt < cap; ++attempt) {
    ++xzero_attempts_;
    const PairId A = make_ancilla(basis_[0]);
    const PairId V = sys_.create_vacuum_pair(vacuum_model_);
    const PairId a_ctl[1] = {A};
    const PairId v_ctl[1] = {V};
    apply_function(fn, v_ctl, A, 1);
    apply_function(fn, a_ctl, V, -1);
    const PairId B = make_ancilla(q_.b);
    const FusionOutcome fo = sys_.fuse(V.left, B.right);
    if (fo.result == FusionResult::Vacuum) {
      discard_particles({V.right, B.left});
      ++xzero_successes_;
      xzero_filter_p_ = fo.vacuum_probability;
      if (opt_.xzero_fast_forward) xzero_template_ = capture_template(A);
      sys_.log("xzero certified attempts=" + std::to_string(attempt + 1));
      return adopt(A);
    }
    discard_particles({A.left, A.right, V.left, V.right, B.left});
  }
  sys_.log("xzero stalled attempts=" + std::to_string(cap));
  throw ProtocolStalled("no x~0 after " + std::to_string(cap) + " attempts");
}

int QuditRegister::fast_forward_xzero() {
  // Attempts only touch fresh particles, so the count is geometric.
  const double u = sys_.rng().uniform();
  const double k = 1 + std::floor(std::log1p(-u) / std::log1p(-xzero_filter_p_));
  if (k > opt_.xzero_retry_cap) {
    xzero_attempts_ += static_cast<std::size_t>(opt_.xzero_retry_cap);
    sys_.log("xzero stalled attempts=" + std::to_string(opt_.xzero_retry_cap));
    throw ProtocolStalled("no x~0 after " + std::to_string(opt_.xzero_retry_cap) + " attempts");
  }
  xzero_attempts_ += static_cast<std::size_t>(k);
  ++xzero_successes_;
  sys_.log("xzero certified attempts=" + std::to_string(static_cast<long>(k)));
  const PairTemplate& t = *xzero_template_;
  return adopt(sys_.create_pair_mixture(t.weights, t.fluxes, t.amps));
}

QuditRegister::PairTemplate QuditRegister::capture_template(const PairId& p) const {
  const int stride = sys_.columns();
  const int lc = sys_.column_of(p.left);
  const int rc = sys_.column_of(p.right);
  PairTemplate t;
  for (const Branch& b : sys_.branches()) {
    // The pair is unentangled: read it off the heaviest configuration of the rest.
    std::map<std::vector<std::uint16_t>, std::map<int, Amplitude>> rows;
    for (std::size_t r = 0; r < b.terms(); ++r) {
      const std::uint16_t* row = b.configs.data() + r * stride;
      std::vector<std::uint16_t> key;
      for (int c = 0; c < stride; ++c) {
        if (c != lc && c != rc) key.push_back(row[c]);
      }
      rows[key][row[lc]] += b.amps[r];
    }
    const std::map<int, Amplitude>* best = nullptr;
    double best_n = -1;
    for (const auto& [key, m] : rows) {
      double n = 0;
      for (const auto& [g, a] : m) n += std::norm(a);
      if (n > best_n) {
        best_n = n;
        best = &m;
      }
    }
    std::vector<int> fl;
    std::vector<Amplitude> am;
    const Amplitude phase = std::polar(1.0, -std::arg(best->begin()->second)) / std::sqrt(best_n);
    for (const auto& [g, a] : *best) {
      fl.push_back(g);
      am.push_back(a * phase);
    }
    bool merged = false;
    for (std::size_t i = 0; i < t.weights.size() && !merged; ++i) {
      if (t.fluxes[i] != fl) continue;
      bool same = true;
      for (std::size_t j = 0; j < am.size(); ++j) same = same && std::abs(am[j] - t.amps[i][j]) < 1e-9;
      if (same) {
        t.weights[i] += b.weight;
        merged = true;
      }
    }
    if (!merged) {
      t.weights.push_back(b.weight);
      t.fluxes.push_back(std::move(fl));
      t.amps.push_back(std::move(am));
    }
  }
  return t;
}

int QuditRegister::xone_candidate() {
  const int x0 = take_xzero();
  const int t = encode(0);
  controlled_sum(x0, t, -1);
  discard(t, DiscardBasis::X);
  return x0;
}

bool QuditRegister::zero_test(int q, int copies) {
  for (int c = 0; c < copies; ++c) {
    const int ctrl = take_xzero();
    controlled_sum(ctrl, q, -1);
    const PairId p = pair(ctrl);
    forget(ctrl);
    if (sys_.fuse(p.left, p.right).result == FusionResult::Vacuum) return true;
    discard_particles({p.left});
  }
  return false;
}

void QuditRegister::bootstrap_xone() {
  const int d = q_.d;
  const double C = static_cast<double>(ctx_.quotient->class_elements_of(q_.b).size());
  const int copies = opt_.zero_test_copies > 0 ? opt_.zero_test_copies : default_copies(d / C);
  int survivor = -1;
  for (int attempt = 0; attempt < opt_.bootstrap_retry_cap; ++attempt) {
    const int cand = xone_candidate();
    if (zero_test(cand, copies)) {
      sys_.log("bootstrap rejected zero");
      xzero_pool_.push_back(cand);
      continue;
    }
    survivor = cand;
    break;
  }
  if (survivor < 0) throw ProtocolStalled("bootstrap kept drawing x~0");
  xone_pool_.push_back(survivor);
  sys_.log("bootstrap x~1 designated");

  // Which physical x~_k was designated; only used to line up with the oracle.
  try {
    const int qs[1] = {survivor};
    const oracle::DenseState s = extract_logical_state(*this, qs);
    for (int k = 1; k < d; ++k) {
      const auto v = oracle::x_eigenstate(d, k);
      if (oracle::fidelity(s, oracle::DenseState::from_amplitudes(d, 1, v)) > 1 - 1e-6) omega_power_ = k;
    }
  } catch (const Error&) {
  }

  if (d == 2) {
    const int x0 = take_xzero();
    const int t = encode(0);
    controlled_sum(x0, t);
    discard(t, DiscardBasis::Y);
    iy_ref_ = x0;
    sys_.log("bootstrap iY designated");
  }
}

void QuditRegister::controlled_ZX(int qc, int qt) {
  if (q_.d != 2) throw StructuralError("controlled ZX is for qubits only");
  controlled_sum(qc, qt);
  toffoli(qc, qt, xone());
}

int QuditRegister::copy_iy(int source) {
  const int c = take_xzero();
  controlled_ZX(c, source);
  return c;
}

bool QuditRegister::iy_consistent(int a, int b) {
  const int c = copy_iy(a);
  controlled_ZX(c, b);
  const PairId p = pair(c);
  forget(c);
  const bool vacuum = sys_.fuse(p.left, p.right).result == FusionResult::Vacuum;
  if (!vacuum) discard_particles({p.left});
  return !vacuum;
}

void QuditRegister::controlled_XaZb(int qc, int qt, int a, int b) {
  const int d = q_.d;
  a = mod(a, d);
  b = mod(b, d);
  if (d == 2) {
    if (b) {
      // Controlled Z through the x~1 ancilla: phase (-1)^(m n).
      toffoli(qc, qt, xone());
    }
    if (a) controlled_sum(qc, qt);
    return;
  }
  // Phase b (m n + a m (m - 1) / 2) computed in scratch s, applied, erased.
  const int inv2 = (d + 1) / 2;
  const int e = mod(static_cast<long>(a) * b * inv2, d);
  const int s = encode(0);
  int m2 = -1;
  if (b) toffoli(qc, qt, s, b);
  if (e) {
    m2 = encode(0);
    controlled_sum(qc, m2);
    toffoli(qc, m2, s, e);
    controlled_sum(qc, s, -e);
  }
  gate_Z(s);
  if (e) {
    controlled_sum(qc, s, e);
    toffoli(qc, m2, s, -e);
    controlled_sum(qc, m2, -1);
    discard(m2);
  }
  if (b) toffoli(qc, qt, s, -b);
  discard(s);
  if (a) controlled_sum(qc, qt, a);
}

int QuditRegister::measure_XaZb(int q, int a, int b) {
  const int d = q_.d;
  a = mod(a, d);
  b = mod(b, d);
  if (a == 0 && b == 0) throw StructuralError("X^0 Z^0 has no phase to estimate");
  if (d == 2) {
    if (b == 0) return measure_X(q).digit;
    if (a == 0) return measure_Z(q).digit;
    // The control ends up with ZX eigenvalue equal to the XZ eigenvalue of q;
    // kickback against the reference compares the two.
    const int ctrl = take_xzero();
    controlled_XaZb(ctrl, q, 1, 1);
    controlled_ZX(ctrl, iy_reference());
    const int digit = measure_X(ctrl).digit;
    discard(ctrl);
    const int index = digit == 1 ? 0 : 1;
    sys_.log("mxz index=" + std::to_string(index));
    return index;
  }
  const int ctrl = take_xzero();
  controlled_XaZb(ctrl, q, a, b);
  const int i = measure_X(ctrl).digit;
  discard(ctrl);
  const int j = mod(-i, d);
  sys_.log("mxz index=" + std::to_string(j));
  return j;
}

std::vector<int> QuditRegister::inject(const oracle::DenseState& state) {
  if (state.d() != q_.d) throw DimensionMismatch("state dimension differs from the register");
  const int k = state.qudits();
  const FiniteGroup& G = *ctx_.G;
  std::vector<int> ids;
  for (int i = 0; i < k; ++i) ids.push_back(encode(0));
  // s^n g s^-n moves a fiber element of b to one of a^n b a^-n.
  std::vector<int> spow(q_.d, 0);
  for (int n = 1; n < q_.d; ++n) spow[n] = G.mul(spow[n - 1], ctx_.section[q_.a]);
  std::vector<int> lcol(k), rcol(k);
  for (int i = 0; i < k; ++i) {
    lcol[i] = sys_.column_of(qudits_[ids[i]].left);
    rcol[i] = sys_.column_of(qudits_[ids[i]].right);
  }
  const int stride = sys_.columns();
  for (Branch& br : sys_.mutable_branches()) {
    std::vector<std::uint16_t> cfg;
    std::vector<Amplitude> amps;
    for (std::size_t t = 0; t < br.terms(); ++t) {
      const std::uint16_t* row = br.configs.data() + t * stride;
      for (std::size_t idx = 0; idx < state.size(); ++idx) {
        if (state[idx] == 0.0) continue;
        const auto digits = state.digits_of(idx);
        const std::size_t at = cfg.size();
        cfg.insert(cfg.end(), row, row + stride);
        for (int i = 0; i < k; ++i) {
          const int g = G.conj(spow[digits[i]], row[lcol[i]]);
          cfg[at + lcol[i]] = static_cast<std::uint16_t>(g);
          cfg[at + rcol[i]] = static_cast<std::uint16_t>(G.inv(g));
        }
        amps.push_back(br.amps[t] * state[idx]);
      }
    }
    br.configs = std::move(cfg);
    br.amps = std::move(amps);
  }
  sys_.normalize_branches();
  return ids;
}

}  // namespace fluxsim
