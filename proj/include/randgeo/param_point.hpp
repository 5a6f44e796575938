#pragma once

#include "randgeo/kernels.hpp"

namespace randgeo {

/// Smallest admissible family scale (t for heat, x for Laplace).
inline constexpr double kMinScale = 1e-8;

/// A point on the two-parameter manifold. Heat: (x, t); Laplace: (x, y).
struct ParamPoint {
  Family family = Family::Heat;
  double p1 = 0.0;
  double p2 = 1.0;

  /// t for heat, x for Laplace.
  double scale() const { return family == Family::Heat ? p2 : p1; }
  /// x for heat, y for Laplace.
  double location() const { return family == Family::Heat ? p1 : p2; }
  /// Kernel argument for integration variable xi.
  KernelPoint kernel_point(double xi) const { return {scale(), location() - xi}; }
};

/// Throws DomainError unless the point lies in the family domain with scale >= kMinScale.
void validate(const ParamPoint& theta);

}  // namespace randgeo
