#pragma once

#include <stdexcept>
#include <string>

namespace colayout {

/// Malformed input file (bad JSON, wrong types, missing fields).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query the data cannot answer (unknown label, unreachable cell, ...).
class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace colayout
