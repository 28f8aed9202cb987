#pragma once

// Trial sharding and exhaustive checks, each with a serial reference. Trial
// i always draws from trial_seed(seed, i), so both versions agree exactly.

#include <cstdint>
#include <exception>
#include <span>
#include <vector>

#include "fluxsim/program.hpp"
#include "fluxsim/rng.hpp"

namespace fluxsim {

namespace detail {

// Keeps the exception of the lowest failing trial, as the serial loop would.
struct FirstError {
  std::int64_t trial = -1;
  std::exception_ptr error;

  void record(std::int64_t t, std::exception_ptr e) {
    if (trial < 0 || t < trial) {
      trial = t;
      error = e;
    }
  }
  void rethrow() const {
    if (error) std::rethrow_exception(error);
  }
};

}  // namespace detail

/// fn(trial, seed) for every trial, results in trial order.
template <class Result, class Fn>
std::vector<Result> run_trials_serial(std::uint64_t seed, std::int64_t trials, Fn&& fn) {
  std::vector<Result> out(static_cast<std::size_t>(trials));
  for (std::int64_t t = 0; t < trials; ++t) out[t] = fn(t, trial_seed(seed, static_cast<std::uint64_t>(t)));
  return out;
}

template <class Result, class Fn>
std::vector<Result> run_trials(std::uint64_t seed, std::int64_t trials, Fn&& fn) {
  std::vector<Result> out(static_cast<std::size_t>(trials));
  detail::FirstError err;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t t = 0; t < trials; ++t) {
    try {
      out[t] = fn(t, trial_seed(seed, static_cast<std::uint64_t>(t)));
    } catch (...) {
#pragma omp critical(fluxsim_trial_error)
      err.record(t, std::current_exception());
    }
  }
  err.rethrow();
  return out;
}

/// Number of trials for which pred(trial, seed) holds.
template <class Pred>
std::int64_t count_trials_serial(std::uint64_t seed, std::int64_t trials, Pred&& pred) {
  std::int64_t n = 0;
  for (std::int64_t t = 0; t < trials; ++t) n += pred(t, trial_seed(seed, static_cast<std::uint64_t>(t))) ? 1 : 0;
  return n;
}

template <class Pred>
std::int64_t count_trials(std::uint64_t seed, std::int64_t trials, Pred&& pred) {
  std::int64_t n = 0;
  detail::FirstError err;
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : n)
  for (std::int64_t t = 0; t < trials; ++t) {
    try {
      n += pred(t, trial_seed(seed, static_cast<std::uint64_t>(t))) ? 1 : 0;
    } catch (...) {
#pragma omp critical(fluxsim_trial_error)
      err.record(t, std::current_exception());
    }
  }
  err.rethrow();
  return n;
}

struct TableCheck {
  std::int64_t checked = 0;
  std::int64_t mismatches = 0;
  std::int64_t first_mismatch = -1;  // table index
};

/// Evaluates the program on every tuple of an arity-n table over G (mixed
/// radix, slot 0 most significant); entries equal to -1 are skipped.
TableCheck verify_table_serial(const FiniteGroup& G, const Program& p, std::span<const int> table);
TableCheck verify_table(const FiniteGroup& G, const Program& p, std::span<const int> table);

int worker_threads();

}  // namespace fluxsim
