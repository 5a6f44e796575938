#include "randgeo/field.hpp"

#include <cmath>
#include <string>

#include "randgeo/errors.hpp"

namespace randgeo {

void validate(const ParamPoint& theta) {
  if (!std::isfinite(theta.p1) || !std::isfinite(theta.p2)) {
    throw DomainError("parameter point must be finite");
  }
  if (!(theta.scale() >= kMinScale)) {
    throw DomainError(std::string(theta.family == Family::Heat ? "t" : "x") +
                      " must be >= 1e-8 for the " + std::string(to_string(theta.family)) +
                      " family");
  }
}

DerivBundle field_derivs(const SourceSpec& source, const ParamPoint& theta,
                         const QuadratureConfig& cfg) {
  validate(theta);
  validate(source);
  DerivBundle bundle;
  if (source.is<ImproperUniform>()) {
    bundle.values[0] = 1.0;
    return bundle;
  }
  const Family family = theta.family;
  if (source.is<PointMass>()) {
    const KernelPoint kp = theta.kernel_point(source.as<PointMass>().xi0);
    for (std::size_t k = 0; k < kNumIndices; ++k) {
      bundle.values[k] = fundamental_partial(family, kp, kAllIndices[k]);
    }
    return bundle;
  }

  auto integrand = [&](double xi, std::span<double> out) {
    const KernelPoint kp = theta.kernel_point(xi);
    const double base = fundamental_solution(family, kp) * source_pdf(source, xi);
    if (base == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    for (std::size_t k = 0; k < kNumIndices; ++k) {
      out[k] = base * fundamental_partial_ratio(family, kp, kAllIndices[k]);
    }
  };
  const auto r = integrate_many(kNumIndices, integrand, integration_domain(source), cfg);
  for (std::size_t k = 0; k < kNumIndices; ++k) bundle.values[k] = r.values[k];
  bundle.err = r.max_err();
  return bundle;
}

DerivBundle field_derivs(const SourceSpec& source, const ParamPoint& theta) {
  validate(theta);
  return field_derivs(source, theta, default_config(theta.family, source, theta));
}

LogDerivBundle log_derivs(const DerivBundle& bundle) {
  const double u = bundle.u();
  if (!(u > 0.0) || !std::isfinite(u)) {
    throw DomainError("log_derivs: u must be positive, got " + std::to_string(u));
  }
  // Normalized moments m_I = u_I / u, then the multivariate chain rule.
  std::array<double, kNumIndices> m{};
  for (std::size_t k = 0; k < kNumIndices; ++k) m[k] = bundle.values[k] / u;
  auto M = [&](int i, int j) { return m[index_slot({i, j})]; };
  const double m1 = M(1, 0);
  const double m2 = M(0, 1);

  LogDerivBundle out;
  auto set = [&](int i, int j, double v) { out.values[index_slot({i, j})] = v; };
  set(0, 0, std::log(u));
  set(1, 0, m1);
  set(0, 1, m2);
  set(2, 0, M(2, 0) - m1 * m1);
  set(1, 1, M(1, 1) - m1 * m2);
  set(0, 2, M(0, 2) - m2 * m2);
  set(3, 0, M(3, 0) - 3.0 * M(2, 0) * m1 + 2.0 * m1 * m1 * m1);
  set(2, 1, M(2, 1) - M(2, 0) * m2 - 2.0 * M(1, 1) * m1 + 2.0 * m1 * m1 * m2);
  set(1, 2, M(1, 2) - M(0, 2) * m1 - 2.0 * M(1, 1) * m2 + 2.0 * m1 * m2 * m2);
  set(0, 3, M(0, 3) - 3.0 * M(0, 2) * m2 + 2.0 * m2 * m2 * m2);
  return out;
}

double pde_residual(const DerivBundle& bundle, Family family) {
  if (family == Family::Heat) return bundle[{0, 1}] - bundle[{2, 0}];
  return bundle[{2, 0}] + bundle[{0, 2}];
}

}  // namespace randgeo
