#pragma once

#include <stdexcept>
#include <string>

namespace randgeo {

/// Argument outside the domain of a kernel, field or density (t <= 0, x <= 0, u <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A SourceSpec that violates its structural invariants, or a descriptor that does not parse.
class SourceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pointwise evaluation requested for a structural sentinel (PointMass, ImproperUniform).
class SentinelEvaluationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate reached.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best_estimate, double err_estimate,
                  double worst_lo, double worst_hi)
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        err_estimate_(err_estimate),
        worst_lo_(worst_lo),
        worst_hi_(worst_hi) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double err_estimate() const noexcept { return err_estimate_; }
  /// Worst subinterval, in the integration variable actually used (after any transform).
  double worst_lo() const noexcept { return worst_lo_; }
  double worst_hi() const noexcept { return worst_hi_; }

 private:
  double best_estimate_;
  double err_estimate_;
  double worst_lo_;
  double worst_hi_;
};

/// Invalid run configuration (CLI flags, config file, grid).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace randgeo
