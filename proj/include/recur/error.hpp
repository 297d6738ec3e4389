#pragma once

#include <stdexcept>
#include <string>

namespace recur {

/// Malformed input: bad parameter, unknown state, inconsistent shapes.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Conditioning on an event of probability zero (e.g. U_ij when every
/// return to i passes through j).
class NoSuchPath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of a construction does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative routine or a bounded search ran out of budget.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace recur
