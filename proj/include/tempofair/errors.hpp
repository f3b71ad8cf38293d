#ifndef TEMPOFAIR_ERRORS_HPP
#define TEMPOFAIR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tempofair {

/// Bad parameter values, malformed flags, out-of-range arguments.
class ArgumentError : public std::invalid_argument {
public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Mismatched entity lists, inconsistent step shapes, malformed files.
class StructuralError : public std::runtime_error {
public:
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// A candidate plan step violates a domain constraint.
class ConstraintViolation : public std::runtime_error {
public:
  explicit ConstraintViolation(const std::string& what) : std::runtime_error(what) {}
};

/// The instance admits no feasible solution.
class InfeasibleError : public std::runtime_error {
public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Unrecoverable numerical failure (singular basis after restarts, etc.).
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File read/write problems.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tempofair

#endif // TEMPOFAIR_ERRORS_HPP
