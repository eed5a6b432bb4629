#pragma once

#include <stdexcept>
#include <string>

namespace remest {

/// Invalid arguments to a builder or solver (bad sizes, out-of-range parameters).
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Attempted transmission in a channel state whose action mask forbids it.
class ForbiddenActionError : public std::logic_error {
 public:
  explicit ForbiddenActionError(const std::string& what) : std::logic_error(what) {}
};

/// A conditional moment was requested on a region of (numerically) zero mass.
class DegenerateRegionError : public std::domain_error {
 public:
  explicit DegenerateRegionError(const std::string& what) : std::domain_error(what) {}
};

/// Value function exceeded the configured cap; usually the grid is too narrow.
class NumericOverflowError : public std::overflow_error {
 public:
  explicit NumericOverflowError(const std::string& what) : std::overflow_error(what) {}
};

/// Exhaustive enumeration would exceed the configured combination budget.
class EnumerationLimitError : public std::length_error {
 public:
  explicit EnumerationLimitError(const std::string& what) : std::length_error(what) {}
};

}  // namespace remest
