#pragma once

#include <stdexcept>
#include <string>

namespace barron {

// Error hierarchy shared by all modules. The CLI maps these onto exit codes:
// IoError -> 2, PreconditionError -> 3, AssumptionError (and ParityError,
// which signals an assumption failure at flow time) -> 4, CheckError -> 5.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operands carry incompatible ambient dimensions.
struct DimensionError : Error {
  using Error::Error;
};

// A term that cannot exist, e.g. a sine factor with zero frequency.
struct MalformedTermError : Error {
  using Error::Error;
};

// Frequency arithmetic left the 32-bit per-coordinate range.
struct OverflowError : Error {
  using Error::Error;
};

// An expansion left its admissible parity class beyond tolerance.
struct ParityError : Error {
  using Error::Error;
};

// A caller-side contract violation (bad epsilon, bad cutoff, ...).
struct PreconditionError : Error {
  using Error::Error;
};

// A problem failed its coefficient-assumption audit.
struct AssumptionError : Error {
  using Error::Error;
};

// An iterative solver failed to converge.
struct SolverError : Error {
  using Error::Error;
};

// File / parse problems.
struct IoError : Error {
  using Error::Error;
};

// A verification check did not hold.
struct CheckError : Error {
  using Error::Error;
};

}  // namespace barron
