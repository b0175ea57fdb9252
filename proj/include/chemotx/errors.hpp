// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace chemotx {

/// Input violates a documented bound. `field()` names the offending parameter.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Non-finite state produced by the Langevin integrator.
class IntegratorDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Observation evaluated at or beyond the receiver plane (x >= d).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Optimum does not exist for the requested parameters.
class UnboundedOptimumError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Detector parameters outside the single-threshold regime.
class DetectionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw ParameterError(field, "must be finite");
}

inline void require_positive(double v, const char* field) {
  require_finite(v, field);
  if (!(v > 0.0)) throw ParameterError(field, "must be > 0 (got " + std::to_string(v) + ")");
}

inline void require_nonnegative(double v, const char* field) {
  require_finite(v, field);
  if (v < 0.0) throw ParameterError(field, "must be >= 0 (got " + std::to_string(v) + ")");
}

}  // namespace detail
}  // namespace chemotx
