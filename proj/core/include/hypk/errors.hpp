#pragma once

#include <stdexcept>
#include <string>

namespace hypk {

// Argument outside the mathematical domain of an operation (k out of range,
// negative radius, repeated index, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A stated precondition on the input does not hold (e.g. lambda not in the
// Garding cone where the statement requires it).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hypk
