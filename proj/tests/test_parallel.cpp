#include <catch_amalgamated.hpp>

#include <omp.h>

#include <random>
#include <stdexcept>

#include "fluxsim/errors.hpp"
#include "fluxsim/parallel.hpp"
#include "fluxsim/synth.hpp"

using namespace fluxsim;

TEST_CASE("trial runners agree with the serial reference") {
  omp_set_num_threads(4);
  auto fn = [](std::int64_t t, std::uint64_t seed) {
    Rng r(seed);
    return static_cast<double>(t) + r.uniform();
  };
  const auto a = run_trials_serial<double>(9, 5000, fn);
  const auto b = run_trials<double>(9, 5000, fn);
  REQUIRE(a == b);
  auto pred = [](std::int64_t, std::uint64_t seed) { return Rng(seed).uniform() < 0.3; };
  REQUIRE(count_trials_serial(9, 20000, pred) == count_trials(9, 20000, pred));
  // Different trials get different streams.
  REQUIRE(trial_seed(9, 0) != trial_seed(9, 1));
  REQUIRE(trial_seed(9, 0) != trial_seed(10, 0));
}

TEST_CASE("the lowest failing trial's error is rethrown") {
  omp_set_num_threads(4);
  auto fn = [](std::int64_t t, std::uint64_t) -> int {
    if (t == 700 || t == 3000) throw std::runtime_error("trial " + std::to_string(t));
    return 0;
  };
  try {
    run_trials<int>(1, 4000, fn);
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    REQUIRE(std::string(e.what()) == "trial 700");
  }
}

TEST_CASE("exhaustive table checks") {
  omp_set_num_threads(4);
  const GroupPtr G = alternating_group(5);
  Synthesizer syn(G);
  std::mt19937_64 eng(4);
  std::vector<int> table(3600);
  for (auto& v : table) v = static_cast<int>(eng() % 60);
  const Program p = synthesize(syn, 2, table);
  const TableCheck s = verify_table_serial(*G, p, table);
  const TableCheck q = verify_table(*G, p, table);
  REQUIRE(s.checked == 3600);
  REQUIRE(s.mismatches == 0);
  REQUIRE(q.checked == s.checked);
  REQUIRE(q.mismatches == 0);
  REQUIRE(q.first_mismatch == -1);

  table[1234] = (table[1234] + 1) % 60;
  table[2000] = (table[2000] + 1) % 60;
  table[5] = -1;
  const TableCheck s2 = verify_table_serial(*G, p, table);
  const TableCheck q2 = verify_table(*G, p, table);
  REQUIRE(s2.checked == 3599);
  REQUIRE(s2.mismatches == 2);
  REQUIRE(s2.first_mismatch == 1234);
  REQUIRE(q2.checked == 3599);
  REQUIRE(q2.mismatches == 2);
  REQUIRE(q2.first_mismatch == 1234);
  REQUIRE_THROWS_AS(verify_table(*G, p, std::span<const int>(table).first(60)), ArityMismatch);
}
