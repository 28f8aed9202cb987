#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fluxsim/anyon.hpp"

namespace fluxsim {

enum class BraidOpKind { VacPair, Ancilla, Exchange, ConjPair, Fuse, ProbeNew, ProbeLoop, ProbeFuse };

/// One line of a braid program. Pairs are numbered in creation order,
/// anyons by particle id, loop ranges by line position.
struct BraidOp {
  BraidOpKind kind;
  int a = 0;  // element, position, actor pair, anyon or range start
  int b = 0;  // target pair, anyon or range end
  int c = 0;  // exchange direction (0 cw, 1 ccw) or power
  std::string name;
  int line = 0;
};

std::vector<BraidOp> parse_braid(const FiniteGroup& G, std::string_view text);
std::string format_braid(const FiniteGroup& G, const std::vector<BraidOp>& ops);

/// Runs the program; vacuum pairs are concentrated on the class of their
/// representative with the given charged weight. Returns the pairs created.
std::vector<PairId> run_braid(AnyonSystem& sys, const std::vector<BraidOp>& ops, double charged_weight = 0.0);

}  // namespace fluxsim
