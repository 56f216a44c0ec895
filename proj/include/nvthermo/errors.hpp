#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nvthermo {

/// Broad failure class; the CLI maps it onto its exit code.
enum class ErrorKind { validation, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidParameter : Error {
  explicit InvalidParameter(const std::string& w) : Error(ErrorKind::validation, w) {}
};

struct InvalidInput : Error {
  explicit InvalidInput(const std::string& w) : Error(ErrorKind::validation, w) {}
};

struct RangeError : Error {
  explicit RangeError(const std::string& w) : Error(ErrorKind::validation, w) {}
};

struct InvalidWindow : Error {
  explicit InvalidWindow(const std::string& w) : Error(ErrorKind::validation, w) {}
};

struct ContractViolation : Error {
  explicit ContractViolation(const std::string& w) : Error(ErrorKind::validation, w) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& w) : Error(ErrorKind::numerical, w) {}
};

struct RankDeficiency : Error {
  explicit RankDeficiency(const std::string& w) : Error(ErrorKind::numerical, w) {}
};

struct IllConditioned : Error {
  explicit IllConditioned(const std::string& w) : Error(ErrorKind::numerical, w) {}
};

struct Unidentifiable : Error {
  explicit Unidentifiable(const std::string& w) : Error(ErrorKind::numerical, w) {}
};

struct PipelineInstability : Error {
  explicit PipelineInstability(const std::string& w) : Error(ErrorKind::numerical, w) {}
};

/// Eigenvector labeling failed; carries the eigenvalues that could not be assigned.
class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& w, std::vector<double> eigenvalues)
      : Error(ErrorKind::numerical, w), eigenvalues_(std::move(eigenvalues)) {}
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  std::vector<double> eigenvalues_;
};

namespace detail {

inline void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw InvalidParameter(std::string(name) + " must be finite");
  }
}

}  // namespace detail

}  // namespace nvthermo
