#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tslab {

// Bad input: malformed tables, dimension mismatches, out-of-range parameters.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A request that would exceed a size budget (codebook, table cells, enumeration).
// `required_log2` names the smallest budget that would have been accepted.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, double required_log2)
      : std::runtime_error(what), required_log2_(required_log2) {}

  double required_log2() const noexcept { return required_log2_; }

 private:
  double required_log2_;
};

// A verification suite found a property that does not hold.
class AssertionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace tslab
