#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI through the shell; stderr is folded into the output.
Run fluxsim(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " FLUXSIM_BIN " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const char* name) { return std::string(FLUXSIM_DATA "/") + name; }

bool has(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("group reports") {
  auto r = fluxsim("group \"(1 2 3 4 5);(1 2 3)\"");
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "order 60\n"));
  CHECK(has(r.out, "perfect yes\n"));
  CHECK(has(r.out, "simple yes\n"));
  CHECK(has(r.out, "qudit d=2 a=(1 2)(3 4) b=(3 4 5)"));

  r = fluxsim("group \"(1 2)\"");
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "order 2\n"));
  CHECK(has(r.out, "solvable yes\n"));
  CHECK(has(r.out, "quotient SolvableGroup"));

  r = fluxsim("group S5");
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "derived series: 120 60\n"));
  CHECK(has(r.out, "quotient |P| = 60, |N| = 1, |P/N| = 60"));

  r = fluxsim("group --group S4");
  CHECK(has(r.out, "derived series: 24 12 4 1\n"));

  r = fluxsim("group \"(1 2\"");
  CHECK(r.code == 2);
  CHECK(has(r.out, "line 1, column"));
}

TEST_CASE("synthesis command") {
  auto r = fluxsim("synth --toffoli");
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "word atoms 9\n"));
  CHECK(has(r.out, "verified 4/4 basis pairs"));

  r = fluxsim("synth --toffoli --d 3");
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "verified 9/9 basis pairs"));

  const std::string out = std::string(FLUXSIM_TMP "/random_a5.dag");
  r = fluxsim("synth --table " + data("random_a5.tbl") + " --out " + out);
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "verified 60/60 inputs (exhaustive)"));
  std::ifstream f(out);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(has(text, "\nroot n"));

  std::ofstream(FLUXSIM_TMP "/identity.tbl") << "arity 1\ndefault ()\n";
  r = fluxsim("synth --table " FLUXSIM_TMP "/identity.tbl");
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "root empty\n"));

  std::ofstream(FLUXSIM_TMP "/partial.tbl") << "arity 1\n(1 2 3) -> ()\n";
  r = fluxsim("synth --table " FLUXSIM_TMP "/partial.tbl");
  CHECK(r.code == 2);
  CHECK(has(r.out, "MissingEntry"));

  std::ofstream(FLUXSIM_TMP "/dup.tbl") << "arity 1\ndefault ()\n() -> ()\n() -> (1 2 3)\n";
  r = fluxsim("synth --table " FLUXSIM_TMP "/dup.tbl");
  CHECK(r.code == 2);
  CHECK(has(r.out, "line 4"));

  CHECK(fluxsim("synth").code == 2);
}

TEST_CASE("braid simulation") {
  auto r = fluxsim("simulate " + data("fusion.braid") + " --trials 100000 --seed 5");
  REQUIRE(r.code == 0);
  const auto pos = r.out.find("line 4 vacuum ");
  REQUIRE(pos != std::string::npos);
  const long hits = std::stol(r.out.substr(pos + 14));
  const double sd = std::sqrt(1e5 * 0.05 * 0.95);
  CHECK(std::abs(hits - 5000.0) <= 3 * sd);

  r = fluxsim("simulate " + data("exchange_undo.braid") + " --trials 1000");
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "line 6 vacuum 1000/1000 = 1\n"));

  for (const char* f : {"pair_conjugation.braid", "conjpair.braid"}) {
    r = fluxsim(std::string("simulate ") + data(f));
    REQUIRE(r.code == 0);
    CHECK(has(r.out, "fuse 0 4 p_vacuum=0.050000"));
  }

  r = fluxsim("simulate " + data("refused.braid"));
  CHECK(r.code == 2);
  CHECK(has(r.out, "NontrivialFlux: line 7"));

  std::ofstream(FLUXSIM_TMP "/bad.braid") << "ancilla (1 2 3)\nxchg 0 sideways\n";
  r = fluxsim("simulate " FLUXSIM_TMP "/bad.braid");
  CHECK(r.code == 2);
  CHECK(has(r.out, "line 2, column 8"));
}

TEST_CASE("demos") {
  auto r = fluxsim("demo toffoli --d 2");
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "basis agreements 8/8"));

  r = fluxsim("demo measure-z --trials 100000");
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "vs 0.05, 3 sigma band"));

  r = fluxsim("demo distill --budget 10");
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "warning: partial bins"));

  CHECK(fluxsim("demo nosuch").code == 2);
  CHECK(fluxsim("--trials -3 demo toffoli").code == 2);
}

TEST_CASE("same flags give byte-identical output") {
  const std::string args = "demo measure-z --trials 20000 --seed 9";
  const auto a = fluxsim(args, "OMP_NUM_THREADS=1");
  const auto b = fluxsim(args, "OMP_NUM_THREADS=4");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const std::string sim = "simulate " + data("fusion.braid") + " --trials 5000 --seed 3";
  CHECK(fluxsim(sim, "OMP_NUM_THREADS=1").out == fluxsim(sim, "OMP_NUM_THREADS=3").out);
  CHECK(fluxsim("demo leakage --trials 10", "OMP_NUM_THREADS=2").out ==
        fluxsim("demo leakage --trials 10", "OMP_NUM_THREADS=1").out);
  CHECK(fluxsim("demo measure-z --trials 20000 --seed 10").out != a.out);
}
