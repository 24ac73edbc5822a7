#pragma once

#include <stdexcept>

namespace hqmm {

/// A scalar parameter lies outside its admissible range.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A machine-defining matrix violates its constraints (stochasticity,
/// Kraus completeness, normalization).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// API misuse: dimension mismatch or an argument outside the operation's
/// stated contract.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A numeric self-check failed. Indicates a bug, not bad input.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Filesystem failure; the CLI maps this to its config/IO exit code.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hqmm
