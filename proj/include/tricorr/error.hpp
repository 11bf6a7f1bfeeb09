#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tricorr {

// Base for all library errors. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input (coefficient file rows, JSON payloads, config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Coefficient data violates the Hecke/Deligne relations it claims to satisfy.
class ValidationError : public Error {
 public:
  ValidationError(std::string what, std::uint64_t first_bad_index)
      : Error(std::move(what)), index_(first_bad_index) {}
  std::uint64_t index() const noexcept { return index_; }

 private:
  std::uint64_t index_;
};

// A coefficient table is too short for the requested computation.
class CoverageError : public Error {
 public:
  CoverageError(std::string what, std::uint64_t required_n_max)
      : Error(std::move(what)), required_(required_n_max) {}
  std::uint64_t required_n_max() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

// Arguments outside the mathematically valid region (convergence half-planes,
// unsupported weights, precision below double).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The request would exceed the configured memory budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

}  // namespace tricorr
