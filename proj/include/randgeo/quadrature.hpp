#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "randgeo/param_point.hpp"
#include "randgeo/sources.hpp"

namespace randgeo {

/// xi = center + scale * tan(theta), theta in (-pi/2, pi/2).
struct Tangent {
  double center = 0.0;
  double scale = 1.0;
};

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_subdivisions = 200;
  double tail_tol = 1e-12;
  /// Applied to unbounded domains. Without it, unbounded domains are cut to `window`.
  std::optional<Tangent> transform;
  /// Truncation window; bounded domains are intersected with it too when no transform is set.
  Interval window = Interval::real_line();
  /// Points (in xi) at which to split the domain before adapting.
  std::vector<double> breakpoints;
};

/// Throws std::invalid_argument when a tolerance or limit is out of range.
void validate(const QuadratureConfig& cfg);

struct QuadResult {
  double value = 0.0;
  double err_estimate = 0.0;
  int subdivisions_used = 0;
};

/// Simultaneous integration of several integrands sharing one subdivision.
struct MultiQuadResult {
  std::vector<double> values;
  std::vector<double> err_estimates;
  int subdivisions_used = 0;

  double max_err() const;
};

/// Integrand writing `out.size()` values at one abscissa.
using MultiIntegrand = std::function<void(double xi, std::span<double> out)>;

/// Adaptive Gauss-Kronrod (7/15) with global bisection. Every component must meet
/// max(abs_tol, rel_tol * |value|). Throws QuadratureError after max_subdivisions bisections.
MultiQuadResult integrate_many(std::size_t count, const MultiIntegrand& g, Interval domain,
                               const QuadratureConfig& cfg);

QuadResult integrate(const std::function<double(double)>& g, Interval domain,
                     const QuadratureConfig& cfg);

/// Tolerances per the defaults; transform and window chosen from the family and source.
/// Heat with no Cauchy component: hard truncation to the source's effective support padded by
/// the kernel envelope c*sqrt(t), c = sqrt(4 ln(1/tail_tol)). Laplace, or any Cauchy
/// component: tangent map centred on the location parameter.
QuadratureConfig default_config(Family family, const SourceSpec& source, const ParamPoint& theta,
                                double tail_tol = 1e-12);

/// default_config, keeping the tolerances and subdivision limit of `tolerances`.
QuadratureConfig default_config(Family family, const SourceSpec& source, const ParamPoint& theta,
                                const QuadratureConfig& tolerances);

/// Domain over which a source is integrated: its exact support when compact, else the real line.
Interval integration_domain(const SourceSpec& source);

}  // namespace randgeo
