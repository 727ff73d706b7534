#pragma once

#include <stdexcept>
#include <string>

namespace eabpsk {

// Raised when a parameter violates its documented invariant. field() names
// the offending parameter so callers (the sweep CLI) can report it.
class InvalidParameter : public std::invalid_argument {
 public:
  InvalidParameter(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested receiver configuration has no implemented formula.
class UnsupportedConfiguration : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Iterative solver failed to converge or produced a non-finite value.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw InvalidParameter(field, what);
}

}  // namespace detail

}  // namespace eabpsk
