#pragma once

#include <stdexcept>
#include <string>

namespace horolab {

enum class ErrorCode {
  Argument = 1,
  Domain = 2,
  Consistency = 3,
  Precondition = 4,
  Io = 5,
  Parse = 6,
  Precision = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Dimension or shape mismatch between arguments.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorCode::Argument, what) {}
};

// Input outside the mathematical domain of an operation (zero vector, wrong cell, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

// A computed object violates an invariant it should satisfy (group membership, nullity).
class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& what) : Error(ErrorCode::Consistency, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorCode::Precondition, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::Parse, what) {}
};

// Requested time exceeds what the active scalar precision can resolve.
class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& what) : Error(ErrorCode::Precision, what) {}
};

}  // namespace horolab
