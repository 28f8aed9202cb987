#pragma once

#include <stdexcept>
#include <string>

namespace fluxsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FLUXSIM_ERROR(Name)          \
  class Name : public Error {        \
   public:                           \
    using Error::Error;              \
  }

FLUXSIM_ERROR(StructuralError);
FLUXSIM_ERROR(GroupTooLarge);
FLUXSIM_ERROR(SolvableGroup);
FLUXSIM_ERROR(NoSuchParameters);
FLUXSIM_ERROR(SynthesisUnsupported);
FLUXSIM_ERROR(MissingEntry);
FLUXSIM_ERROR(ArityMismatch);
FLUXSIM_ERROR(PositionOutOfRange);
FLUXSIM_ERROR(NontrivialFlux);
FLUXSIM_ERROR(InvalidSectorModel);
FLUXSIM_ERROR(NotAHomomorphism);
FLUXSIM_ERROR(PoolExhausted);
FLUXSIM_ERROR(DigitOutOfRange);
FLUXSIM_ERROR(BootstrapRequired);
FLUXSIM_ERROR(ProtocolStalled);
FLUXSIM_ERROR(Inconclusive);
FLUXSIM_ERROR(Indeterminate);
FLUXSIM_ERROR(OutOfSubspace);
FLUXSIM_ERROR(DimensionMismatch);

#undef FLUXSIM_ERROR

// Parse failures carry the 1-based line and column of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace fluxsim
