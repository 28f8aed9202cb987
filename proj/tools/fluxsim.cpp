// fluxsim: group analysis, word synthesis, braid simulation, protocol demos
// and acceptance runs. Exit codes: 0 ok, 1 acceptance failure, 2 usage or
// input error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fluxsim/braid.hpp"
#include "fluxsim/experiments.hpp"
#include "fluxsim/parallel.hpp"
#include "fluxsim/synth.hpp"

using namespace fluxsim;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

// Input problems the user can fix; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  RunConfig cfg;
  std::string out;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Either a generator spec, a group name, or a file holding a spec.
GroupPtr load_group(const std::string& spec) {
  if (spec.empty()) return alternating_group(5);
  std::ifstream probe(spec);
  return resolve_group(probe ? read_file(spec) : spec);
}

void emit(const Flags& f, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream o(f.out, std::ios::binary);
  if (!o) throw UsageError("cannot write " + f.out);
  o << text;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

int cmd_group(const Flags& f, const std::string& spec_arg) {
  const std::string spec = spec_arg.empty() ? f.cfg.group : spec_arg;
  const GroupPtr G = load_group(spec);
  std::ostringstream r;
  r << "order " << G->order() << "\ndegree " << G->degree() << "\nclasses " << G->classes().size() << ":";
  for (const auto& c : G->classes()) r << ' ' << c.size();
  r << "\nderived series:";
  int last = 0;
  for (const Subgroup& H : derived_series(*G)) {
    if (H.size() != last) r << ' ' << H.size();
    last = H.size();
  }
  const bool solvable = is_solvable(*G);
  r << "\nabelian " << yes_no(is_abelian(*G)) << "\nperfect " << yes_no(is_perfect(*G)) << "\nsolvable "
    << yes_no(solvable) << "\nsimple " << yes_no(is_simple(*G)) << '\n';
  try {
    const CosetContext ctx = simple_perfect_quotient(G);
    const FiniteGroup& Q = *ctx.quotient;
    r << "quotient |P| = " << ctx.P.size() << ", |N| = " << ctx.N.size() << ", |P/N| = " << Q.order() << '\n';
    std::string gens;
    for (int g : generating_set(*G, ctx.P)) gens += (gens.empty() ? "" : "; ") + G->format(g);
    r << "P generated by " << gens << '\n';
    for (int d : {2, 3}) {
      try {
        const QuditParams q = find_qudit_params(Q, d);
        r << "qudit d=" << d << " a=" << Q.format(q.a) << " b=" << Q.format(q.b) << " |C(b)|=" << Q.class_elements_of(q.b).size()
          << '\n';
      } catch (const NoSuchParameters&) {
        r << "qudit d=" << d << " none\n";
      }
    }
  } catch (const SolvableGroup& e) {
    r << "quotient SolvableGroup: " << e.what() << '\n';
  }
  emit(f, r.str());
  return kOk;
}

int cmd_synth(const Flags& f, const std::string& table_path, bool toffoli) {
  if (toffoli == !table_path.empty()) throw UsageError("synth needs exactly one of --table and --toffoli");
  const GroupPtr G = load_group(f.cfg.group);
  Synthesizer syn(G);
  std::ostringstream head;
  Program p;
  std::int64_t checked = 0, bad = 0;
  std::string how;
  if (toffoli) {
    const QuditParams q = find_qudit_params(*G, f.cfg.d > 0 ? std::optional<int>(f.cfg.d) : std::nullopt);
    p = toffoli_program(syn, q);
    const auto basis = basis_fluxes(*G, q);
    for (int i = 0; i < q.d; ++i)
      for (int j = 0; j < q.d; ++j) {
        const int env[2] = {basis[i], basis[j]};
        ++checked;
        bad += p.evaluate(*G, env) != G->pow(q.a, (i * j) % q.d);
      }
    head << "# toffoli d=" << q.d << " a=" << G->format(q.a) << " b=" << G->format(q.b) << '\n';
    how = "basis pairs";
  } else {
    const FunctionTable t = parse_table(*G, read_file(table_path));
    p = synthesize(syn, t.arity, t.values);
    head << "# table " << table_path << " arity " << t.arity << '\n';
    if (static_cast<double>(t.values.size()) <= 1e4) {
      const TableCheck c = verify_table(*G, p, t.values);
      checked = c.checked;
      bad = c.mismatches;
      how = "inputs (exhaustive)";
    } else {
      Rng rng(f.cfg.seed);
      std::vector<int> env(t.arity);
      for (; checked < 1000; ++checked) {
        std::size_t k = 0;
        for (int& x : env) {
          x = static_cast<int>(rng.below(G->order()));
          k = k * G->order() + x;
        }
        bad += p.evaluate(*G, env) != t.values[k];
      }
      how = "inputs (sampled)";
    }
  }
  p.compact();
  head << "# nodes " << p.size();
  if (p.flattened_length() <= 1e6) {
    head << ", word atoms " << p.flatten(*G).size() << '\n';
  } else {
    head << ", expanded length " << p.flattened_length() << '\n';
  }
  head << "# verified " << checked - bad << "/" << checked << ' ' << how << '\n';
  emit(f, head.str() + format_dag(*G, p));
  if (!f.out.empty()) std::cout << head.str();
  return bad == 0 ? kOk : kFail;
}

int cmd_simulate(const Flags& f, const std::string& path) {
  const GroupPtr G = load_group(f.cfg.group);
  const auto ops = parse_braid(*G, read_file(path));
  std::vector<const BraidOp*> fusions;
  for (const BraidOp& o : ops) {
    if (o.kind == BraidOpKind::Fuse || o.kind == BraidOpKind::ProbeFuse) fusions.push_back(&o);
  }
  const std::int64_t trials = std::max<std::int64_t>(f.cfg.trials, 1);
  struct Trial {
    std::vector<std::string> transcript;
    std::vector<char> vacuum;  // one flag per fusion line, in order
  };
  const auto runs = run_trials<Trial>(f.cfg.seed, trials, [&](std::int64_t t, std::uint64_t seed) {
    AnyonSystem sys(G, seed);
    run_braid(sys, ops, f.cfg.charged_weight);
    Trial r;
    for (const auto& line : sys.transcript()) {
      if (line.rfind("fuse ", 0) == 0 || line.rfind("probe-fuse ", 0) == 0) {
        r.vacuum.push_back(line.size() >= 6 && line.compare(line.size() - 6, 6, "vacuum") == 0);
      }
    }
    if (t == 0) r.transcript = sys.transcript();
    return r;
  });
  std::ostringstream out;
  for (const auto& line : runs.front().transcript) out << line << '\n';
  if (trials > 1) {
    for (std::size_t k = 0; k < fusions.size(); ++k) {
      std::int64_t v = 0;
      for (const Trial& r : runs) v += k < r.vacuum.size() && r.vacuum[k];
      char rate[32];
      std::snprintf(rate, sizeof rate, "%.6g", static_cast<double>(v) / static_cast<double>(trials));
      out << "line " << fusions[k]->line << " vacuum " << v << "/" << trials << " = " << rate << '\n';
    }
  }
  emit(f, out.str());
  return kOk;
}

int cmd_demo(const Flags& f, const std::string& name) {
  for (const NamedExperiment& e : demos()) {
    if (name != e.name) continue;
    try {
      const ExperimentReport r = e.run(f.cfg);
      emit(f, r.text());
      return r.pass ? kOk : kFail;
    } catch (const ProtocolStalled& s) {
      std::cerr << "demo " << name << ": ProtocolStalled: " << s.what() << '\n';
      return kFail;
    }
  }
  throw UsageError("unknown demo " + name);
}

int cmd_accept(const Flags& f, const std::vector<int>& only) {
  std::ostringstream out;
  const bool ok = run_acceptance(f.cfg, only, out);
  emit(f, out.str());
  return ok ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-abelian flux anyon simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--seed", f.cfg.seed, "base seed; trial streams derive from (seed, trial)");
  app.add_option("--trials", f.cfg.trials, "trial count (0: command default)")->check(CLI::NonNegativeNumber);
  app.add_option("--group", f.cfg.group, "group name (A5, S5, A5xA5, SL25, ...), generator spec or spec file");
  app.add_option("--sector-charged-weight", f.cfg.charged_weight, "charged weight of vacuum pairs")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--out", f.out, "write the main output here instead of stdout");
  app.add_option("--d", f.cfg.d, "qudit dimension (0: command default)")->check(CLI::Range(0, 7));
  app.add_option("--budget", f.cfg.budget, "vacuum pairs for distill")->check(CLI::NonNegativeNumber);

  std::string spec;
  auto* group = app.add_subcommand("group", "order, classes, derived series, solvability, quotient");
  group->add_option("spec", spec, "generators such as \"(1 2 3 4 5);(1 2 3)\", a name, or a file");

  std::string table;
  bool toffoli = false;
  auto* synth = app.add_subcommand("synth", "synthesize a product-form word from a table");
  synth->add_option("--table", table, "table file")->check(CLI::ExistingFile);
  synth->add_flag("--toffoli", toffoli, "the Toffoli function on the qudit basis");

  std::string braid;
  auto* simulate = app.add_subcommand("simulate", "run a braid file and print the transcript");
  simulate->add_option("braid", braid, "braid file")->required()->check(CLI::ExistingFile);

  std::string demo;
  std::vector<std::string> names;
  for (const auto& e : demos()) names.push_back(e.name);
  auto* demo_cmd = app.add_subcommand("demo", "run a protocol demo against its analytic bounds");
  demo_cmd->add_option("name", demo, "demo name")->required()->check(CLI::IsMember(names));

  std::vector<int> only;
  auto* accept = app.add_subcommand("accept", "acceptance criteria 1 to 9");
  accept->add_option("--only", only, "criterion numbers")->check(CLI::Range(1, 9));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*group) return cmd_group(f, spec);
    if (*synth) return cmd_synth(f, table, toffoli);
    if (*simulate) return cmd_simulate(f, braid);
    if (*demo_cmd) return cmd_demo(f, demo);
    if (*accept) return cmd_accept(f, only);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const MissingEntry& e) {
    std::cerr << "MissingEntry: " << e.what() << '\n';
    return kUsage;
  } catch (const GroupTooLarge& e) {
    std::cerr << "GroupTooLarge: " << e.what() << '\n';
    return kUsage;
  } catch (const NontrivialFlux& e) {
    std::cerr << "NontrivialFlux: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    // Demos and acceptance runs fail; other commands were given bad input.
    std::cerr << "error: " << e.what() << '\n';
    return *demo_cmd || *accept ? kFail : kUsage;
  }
  return kUsage;
}
