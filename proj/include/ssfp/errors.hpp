#pragma once

#include <stdexcept>
#include <string>

namespace ssfp {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Transfer matrix with q = 0 (total reflection); T = 0 is not representable.
class DegenerateMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coincident eigenvalues where no limit-formula root exists.
class ParabolicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No N-th root branch reproduces the parent matrix within tolerance.
class ChainBreakError : public std::runtime_error {
 public:
  ChainBreakError(int level, double lnPhi, const std::string& what)
      : std::runtime_error(what), level_(level), lnPhi_(lnPhi) {}
  int level() const { return level_; }
  double lnPhi() const { return lnPhi_; }

 private:
  int level_;
  double lnPhi_;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration. field() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssfp
