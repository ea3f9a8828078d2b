#pragma once

#include <stdexcept>
#include <string>

namespace near_misses {

/// Broad failure classes. The CLI maps them onto process exit codes.
enum class ErrorKind {
  kInvalidInput,     // bad query, point outside a domain, unsupported mode
  kNumericalBudget,  // quadrature/Newton/enumeration budget exhausted
  kContract,         // a verified invariant failed (e.g. Selberg sandwich)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::kInvalidInput, what) {}
};

class InvalidQuery : public Error {
 public:
  explicit InvalidQuery(const std::string& what) : Error(ErrorKind::kInvalidInput, what) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what) : Error(ErrorKind::kInvalidInput, what) {}
};

/// Curvature or diffeomorphism precondition failed for a chart.
class CurvatureError : public Error {
 public:
  explicit CurvatureError(const std::string& what) : Error(ErrorKind::kInvalidInput, what) {}
};

/// Newton iteration for (grad f)^{-1} did not converge; doubles as the
/// "outside the dual domain" signal.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(ErrorKind::kNumericalBudget, what) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& what) : Error(ErrorKind::kNumericalBudget, what) {}
};

class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(ErrorKind::kContract, what) {}
};

int exit_code_for(ErrorKind kind) noexcept;

}  // namespace near_misses
