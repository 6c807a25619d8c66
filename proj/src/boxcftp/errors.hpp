#pragma once

#include <stdexcept>
#include <string>

namespace boxcftp {

enum class ErrorKind {
  domain,
  precondition,
  construction,
  schema,
  no_coalescence,
  unsupported,
  invariant,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

// A documented precondition between arguments does not hold (e.g. envelope
// nesting).
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::precondition, what) {}
};

// Problem instance cannot be built (non-PD covariance, bad box, ...).
struct ConstructionError : Error {
  explicit ConstructionError(const std::string& what)
      : Error(ErrorKind::construction, what) {}
};

// Malformed problem file or command-line configuration.
struct SchemaError : Error {
  explicit SchemaError(const std::string& what) : Error(ErrorKind::schema, what) {}
};

struct NoCoalescenceError : Error {
  explicit NoCoalescenceError(const std::string& what)
      : Error(ErrorKind::no_coalescence, what) {}
};

struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& what)
      : Error(ErrorKind::unsupported, what) {}
};

// Internal consistency check failed; indicates a driver bug.
struct InvariantError : Error {
  explicit InvariantError(const std::string& what)
      : Error(ErrorKind::invariant, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace boxcftp
