#include "randgeo/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "randgeo/errors.hpp"

namespace randgeo {

std::string_view to_string(FormulaMode mode) {
  return mode == FormulaMode::Printed ? "printed" : "corrected";
}

std::string_view to_string(Component c) {
  switch (c) {
    case Component::G11: return "g11";
    case Component::G12: return "g12";
    case Component::G22: return "g22";
    case Component::T111: return "t111";
    case Component::T112: return "t112";
    case Component::T122: return "t122";
    case Component::T222: return "t222";
  }
  return "?";
}

bool is_metric(Component c) {
  return c == Component::G11 || c == Component::G12 || c == Component::G22;
}

double component_of(const FisherMatrix& g, const StructureTensor& t, Component c) {
  switch (c) {
    case Component::G11: return g.g11;
    case Component::G12: return g.g12;
    case Component::G22: return g.g22;
    case Component::T111: return t.t111;
    case Component::T112: return t.t112;
    case Component::T122: return t.t122;
    case Component::T222: return t.t222;
  }
  return 0.0;
}

bool known_printed_discrepancy(Family family, Component c) {
  if (family == Family::Laplace) return true;
  return c == Component::T111 || c == Component::T112 || c == Component::T222;
}

// ---------------------------------------------------------------------------

double density_pdf(const SourceSpec& source, const ParamPoint& theta, double xi,
                   const DerivBundle& bundle) {
  validate(theta);
  if (source.is<PointMass>()) {
    throw SentinelEvaluationError("density_pdf: pointmass source gives an atom, not a density");
  }
  const double u = bundle.u();
  if (!(u > 0.0)) throw DomainError("density_pdf: u must be positive");
  const double f = source.is<ImproperUniform>() ? 1.0 : source_pdf(source, xi);
  return fundamental_solution(theta.family, theta.kernel_point(xi)) * f / u;
}

std::array<double, 2> score(const SourceSpec& source, const ParamPoint& theta, double xi,
                            const LogDerivBundle& logbundle) {
  validate(theta);
  (void)source;  // the source density cancels from the score
  const KernelPoint kp = theta.kernel_point(xi);
  // d ln Phi = d ln h + d ln normalizer, and ln v = ln u - ln normalizer, so the
  // normalizer terms combine into d ln Phi - d ln u.
  return {fundamental_partial_ratio(theta.family, kp, {1, 0}) - logbundle[{1, 0}],
          fundamental_partial_ratio(theta.family, kp, {0, 1}) - logbundle[{0, 1}]};
}

// ---------------------------------------------------------------------------
// Closed forms

namespace {

struct LogView {
  const LogDerivBundle& b;
  double operator()(int i, int j) const { return b[{i, j}]; }
};

FisherMatrix heat_fisher(const LogView& L, double t) {
  // Shared by both modes: the published metric already agrees with the defining integrals.
  return {L(2, 0) + 0.5 / t, L(1, 1) + L(1, 0) / t, L(0, 2) + 2.0 * L(0, 1) / t + 0.5 / (t * t)};
}

StructureTensor heat_structure_printed(const LogView& L, double t) {
  const double t2 = t * t;
  return {
      -0.5 * L(3, 0) - 0.75 / t * L(1, 0),
      -0.5 * L(2, 1) - L(2, 0) / t - 0.25 / t * L(0, 1) - 0.25 / t2,
      -0.5 * L(1, 2) - 2.0 / t * L(1, 1) - L(1, 0) / t2,
      -0.5 * L(0, 3) - 3.0 / t * L(0, 2) - 3.0 / t2 * L(0, 1),
  };
}

StructureTensor heat_structure_corrected(const LogView& L, double t) {
  const double t2 = t * t;
  return {
      -0.5 * L(3, 0),
      -0.5 * L(2, 1) - L(2, 0) / t - 0.25 / t2,
      -0.5 * L(1, 2) - 2.0 / t * L(1, 1) - L(1, 0) / t2,
      -0.5 * L(0, 3) - 3.0 / t * L(0, 2) - 3.0 / t2 * L(0, 1) - 0.5 / (t2 * t),
  };
}

FisherMatrix laplace_fisher_printed(const LogView& L, double x) {
  const double diag = L(2, 0) - L(1, 0) / x + 2.0 / (x * x);
  return {diag, 0.5 * L(1, 1), diag};
}

StructureTensor laplace_structure_printed(const LogView& L, double x) {
  const double x2 = x * x;
  const double x3 = x2 * x;
  return {
      -0.5 * L(3, 0) + 1.5 / x * L(2, 0) - 1.5 / x2 * L(1, 0) - 4.0 / x3,
      -L(2, 1) / 6.0 + L(1, 1) / (6.0 * x),
      -L(1, 2) / 6.0 + L(1, 1) / (6.0 * x) - L(1, 0) / (6.0 * x2) + 1.0 / (6.0 * x3),
      -0.5 * L(0, 3) + 0.75 / x * L(1, 1),
  };
}

// Laplace family, re-derived. With v = (pi/x) u = integral of h f, the normalized moments
// n_I = v_I / v give E[h_I / h] under p, and the corrected kernel identities express every
// product of first log-partials of h through them.
struct LaplaceMoments {
  double n10, n01, n20, n11, n02, n30, n21, n12, n03;
  // E[(h_a/h)(h_b/h)] and E[(h_a/h)(h_b/h)(h_c/h)]
  double e11, e12, e22, e111, e112, e122, e222;
};

LaplaceMoments laplace_moments(const LogView& L, double x) {
  // ln v = ln u - ln x + ln pi
  const double l10 = L(1, 0) - 1.0 / x;
  const double l01 = L(0, 1);
  const double l20 = L(2, 0) + 1.0 / (x * x);
  const double l11 = L(1, 1);
  const double l02 = L(0, 2);
  const double l30 = L(3, 0) - 2.0 / (x * x * x);
  const double l21 = L(2, 1);
  const double l12 = L(1, 2);
  const double l03 = L(0, 3);

  LaplaceMoments m{};
  m.n10 = l10;
  m.n01 = l01;
  m.n20 = l20 + l10 * l10;
  m.n11 = l11 + l10 * l01;
  m.n02 = l02 + l01 * l01;
  m.n30 = l30 + 3.0 * l20 * l10 + l10 * l10 * l10;
  m.n21 = l21 + l20 * l01 + 2.0 * l11 * l10 + l10 * l10 * l01;
  m.n12 = l12 + l02 * l10 + 2.0 * l11 * l01 + l01 * l01 * l10;
  m.n03 = l03 + 3.0 * l02 * l01 + l01 * l01 * l01;

  const double ix = 1.0 / x;
  m.e11 = 0.5 * m.n20 - 0.5 * ix * m.n10;
  m.e22 = 0.5 * m.n02 - 0.5 * ix * m.n10;
  m.e12 = 0.5 * m.n11;
  m.e111 = m.n30 / 6.0 - 0.5 * ix * m.n20 + 0.5 * ix * ix * m.n10;
  m.e222 = m.n03 / 6.0 - 0.5 * ix * m.n11;
  m.e122 = m.n12 / 6.0 - ix / 6.0 * m.n20 + ix * ix / 6.0 * m.n10;
  m.e112 = m.n21 / 6.0 - ix / 6.0 * m.n11;
  return m;
}

FisherMatrix laplace_fisher_corrected(const LogView& L, double x) {
  const auto m = laplace_moments(L, x);
  return {m.e11 - m.n10 * m.n10, m.e12 - m.n10 * m.n01, m.e22 - m.n01 * m.n01};
}

StructureTensor laplace_structure_corrected(const LogView& L, double x) {
  const auto m = laplace_moments(L, x);
  const double a = m.n10;
  const double b = m.n01;
  // Third central moments of the score.
  const double c111 = m.e111 - 3.0 * a * m.e11 + 2.0 * a * a * a;
  const double c112 = m.e112 - 2.0 * a * m.e12 - b * m.e11 + 2.0 * a * a * b;
  const double c122 = m.e122 - a * m.e22 - 2.0 * b * m.e12 + 2.0 * a * b * b;
  const double c222 = m.e222 - 3.0 * b * m.e22 + 2.0 * b * b * b;
  return {-0.5 * c111, -0.5 * c112, -0.5 * c122, -0.5 * c222};
}

}  // namespace

FisherMatrix fisher_closed(const LogDerivBundle& logbundle, const ParamPoint& theta,
                           FormulaMode mode) {
  validate(theta);
  const LogView L{logbundle};
  if (theta.family == Family::Heat) return heat_fisher(L, theta.p2);
  return mode == FormulaMode::Printed ? laplace_fisher_printed(L, theta.p1)
                                      : laplace_fisher_corrected(L, theta.p1);
}

StructureTensor structure_closed(const LogDerivBundle& logbundle, const ParamPoint& theta,
                                 FormulaMode mode) {
  validate(theta);
  const LogView L{logbundle};
  if (theta.family == Family::Heat) {
    return mode == FormulaMode::Printed ? heat_structure_printed(L, theta.p2)
                                        : heat_structure_corrected(L, theta.p2);
  }
  return mode == FormulaMode::Printed ? laplace_structure_printed(L, theta.p1)
                                      : laplace_structure_corrected(L, theta.p1);
}

// ---------------------------------------------------------------------------
// Direct quadrature of the defining integrals

namespace {

// Integrand layout.
enum Slot : std::size_t {
  kP,
  kS1,
  kS2,
  kS11,
  kS12,
  kS22,
  kS111,
  kS112,
  kS121,
  kS211,
  kS122,
  kS212,
  kS221,
  kS222,
  kNumSlots
};

}  // namespace

DirectMoments direct_moments(const SourceSpec& source, const ParamPoint& theta,
                             const QuadratureConfig& cfg) {
  validate(theta);
  validate(source);
  DirectMoments out;
  if (source.is<PointMass>()) return out;  // a one-point family: every score vanishes

  const DerivBundle bundle = field_derivs(source, theta, cfg);
  const LogDerivBundle logb = log_derivs(bundle);
  const double u = bundle.u();
  const double l1 = logb[{1, 0}];
  const double l2 = logb[{0, 1}];
  const bool improper = source.is<ImproperUniform>();
  const Family family = theta.family;

  auto integrand = [&](double xi, std::span<double> o) {
    const KernelPoint kp = theta.kernel_point(xi);
    const double f = improper ? 1.0 : source_pdf(source, xi);
    const double p = fundamental_solution(family, kp) * f / u;
    if (p == 0.0) {
      std::fill(o.begin(), o.end(), 0.0);
      return;
    }
    const double s1 = fundamental_partial_ratio(family, kp, {1, 0}) - l1;
    const double s2 = fundamental_partial_ratio(family, kp, {0, 1}) - l2;
    o[kP] = p;
    o[kS1] = s1 * p;
    o[kS2] = s2 * p;
    o[kS11] = s1 * s1 * p;
    o[kS12] = s1 * s2 * p;
    o[kS22] = s2 * s2 * p;
    o[kS111] = s1 * s1 * s1 * p;
    o[kS112] = s1 * s1 * s2 * p;
    o[kS121] = s1 * s2 * s1 * p;
    o[kS211] = s2 * s1 * s1 * p;
    o[kS122] = s1 * s2 * s2 * p;
    o[kS212] = s2 * s1 * s2 * p;
    o[kS221] = s2 * s2 * s1 * p;
    o[kS222] = s2 * s2 * s2 * p;
  };
  const auto r = integrate_many(kNumSlots, integrand, integration_domain(source), cfg);
  const auto& v = r.values;
  const auto& e = r.err_estimates;

  out.normalization = v[kP];
  out.normalization_err = e[kP];
  out.mean_score = {v[kS1], v[kS2]};
  out.mean_score_err = {e[kS1], e[kS2]};
  out.g = {v[kS11], v[kS12], v[kS22]};
  out.metric_err = {e[kS11], e[kS12], e[kS22]};
  out.t = {-0.5 * v[kS111], -0.5 * v[kS112], -0.5 * v[kS122], -0.5 * v[kS222]};
  out.tensor_err = {0.5 * e[kS111], 0.5 * e[kS112], 0.5 * e[kS122], 0.5 * e[kS222]};
  out.t112_orders = {-0.5 * v[kS112], -0.5 * v[kS121], -0.5 * v[kS211]};
  out.t122_orders = {-0.5 * v[kS122], -0.5 * v[kS212], -0.5 * v[kS221]};
  return out;
}

FisherDirect fisher_direct(const SourceSpec& source, const ParamPoint& theta,
                           const QuadratureConfig& cfg) {
  const auto m = direct_moments(source, theta, cfg);
  return {m.g, std::max({m.metric_err[0], m.metric_err[1], m.metric_err[2]})};
}

StructureDirect structure_direct(const SourceSpec& source, const ParamPoint& theta,
                                 const QuadratureConfig& cfg) {
  const auto m = direct_moments(source, theta, cfg);
  return {m.t,
          std::max({m.tensor_err[0], m.tensor_err[1], m.tensor_err[2], m.tensor_err[3]}),
          m.t112_orders, m.t122_orders};
}

std::vector<ComparisonReport> compare(const SourceSpec& source, const ParamPoint& theta,
                                      const QuadratureConfig& cfg, FormulaMode mode) {
  std::vector<ComparisonReport> reports;
  for (Component c : kAllComponents) {
    ComparisonReport r;
    r.theta = theta;
    r.component = c;
    reports.push_back(r);
  }
  auto fail_all = [&](const std::string& why) {
    for (auto& r : reports) {
      if (r.failure.empty()) r.failure = why;
    }
  };

  std::optional<FisherMatrix> gc;
  std::optional<StructureTensor> tc;
  try {
    const auto logb = log_derivs(field_derivs(source, theta, cfg));
    gc = fisher_closed(logb, theta, mode);
    tc = structure_closed(logb, theta, mode);
  } catch (const std::exception& ex) {
    fail_all(std::string("closed: ") + ex.what());
    return reports;
  }
  DirectMoments dm;
  try {
    dm = direct_moments(source, theta, cfg);
  } catch (const std::exception& ex) {
    fail_all(std::string("direct: ") + ex.what());
    return reports;
  }
  for (std::size_t k = 0; k < reports.size(); ++k) {
    auto& r = reports[k];
    r.closed = component_of(*gc, *tc, r.component);
    r.direct = component_of(dm.g, dm.t, r.component);
    r.direct_err = k < 3 ? dm.metric_err[k] : dm.tensor_err[k - 3];
    r.abs_residual = std::abs(r.closed - r.direct);
    r.rel_residual = r.abs_residual / std::max(1.0, std::abs(r.direct));
  }
  return reports;
}

PdResult pd_check(const FisherMatrix& g) {
  PdResult r;
  const double det = g.g11 * g.g22 - g.g12 * g.g12;
  r.is_pd = g.g11 > 0.0 && det > 0.0;
  const double mean = 0.5 * (g.g11 + g.g22);
  const double half_diff = 0.5 * (g.g11 - g.g22);
  const double radius = std::hypot(half_diff, g.g12);
  const double sign = half_diff >= 0.0 ? 1.0 : -1.0;
  r.lambda1 = mean + sign * radius;
  r.lambda2 = mean - sign * radius;
  return r;
}

}  // namespace randgeo
