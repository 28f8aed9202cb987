// Acceptance criteria 1 to 9, one PASS/FAIL line each; exit status 1 when
// any of them fails.

#include <iostream>

#include <CLI11.hpp>

#include "fluxsim/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fluxsim acceptance runner"};
  fluxsim::RunConfig cfg;
  std::vector<int> only;
  app.add_option("--seed", cfg.seed, "base seed");
  app.add_option("--only", only, "criterion numbers to run")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  return fluxsim::run_acceptance(cfg, only, std::cout) ? 0 : 1;
}
