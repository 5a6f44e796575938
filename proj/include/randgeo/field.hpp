#pragma once

#include <array>

#include "randgeo/kernels.hpp"
#include "randgeo/param_point.hpp"
#include "randgeo/quadrature.hpp"
#include "randgeo/sources.hpp"

namespace randgeo {

/// Partials of u at theta for every multi-index of total order <= 3, in kAllIndices order.
struct DerivBundle {
  std::array<double, kNumIndices> values{};
  /// Worst quadrature error estimate over the entries (0 for analytic bundles).
  double err = 0.0;

  double operator[](MultiIndex idx) const { return values[index_slot(idx)]; }
  double u() const { return values[0]; }
};

/// Partials of ln u, same layout. Entry (0,0) is ln u.
struct LogDerivBundle {
  std::array<double, kNumIndices> values{};

  double operator[](MultiIndex idx) const { return values[index_slot(idx)]; }
};

/// u and its partials by differentiation under the integral sign, all ten entries from one
/// shared adaptive subdivision. PointMass and ImproperUniform are handled analytically.
DerivBundle field_derivs(const SourceSpec& source, const ParamPoint& theta,
                         const QuadratureConfig& cfg);

/// Same, with default_config(theta.family, source, theta).
DerivBundle field_derivs(const SourceSpec& source, const ParamPoint& theta);

/// Chain rule to ln u. Throws DomainError if u <= 0.
LogDerivBundle log_derivs(const DerivBundle& bundle);

/// Heat: u_t - u_xx. Laplace: u_xx + u_yy.
double pde_residual(const DerivBundle& bundle, Family family);

}  // namespace randgeo
