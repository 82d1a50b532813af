#pragma once

#include <stdexcept>
#include <string>

namespace bfcs {

/// Parameter outside its mathematical domain (e.g. nu <= 2, n < 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Correlation input that is not positive definite within tolerance.
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or invalid data files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bfcs
