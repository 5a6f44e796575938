#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "randgeo/geometry.hpp"
#include "randgeo/grid.hpp"

namespace randgeo {

enum class IdentityOrder { Second, Third };

/// One of the nonlinear kernel identities. Second order has slots 1..3, third order 1..4,
/// numbered in the order the identities are stated for each family.
struct IdentityId {
  Family family = Family::Heat;
  IdentityOrder order = IdentityOrder::Second;
  int slot = 1;
  FormulaMode mode = FormulaMode::Printed;
};

/// All seven identities of a family, second order first.
std::vector<IdentityId> all_identities(Family family, FormulaMode mode);

/// e.g. "heat/second/2: hx*hx/h"
std::string identity_name(const IdentityId& id);

/// Both sides divided by h (exact up to rounding, and immune to underflow of h).
struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};
IdentitySides identity_sides(const IdentityId& id, KernelPoint pt);

/// LHS - RHS.
double identity_residual(const IdentityId& id, KernelPoint pt);

/// |LHS - RHS| / (|LHS| + |RHS| + 1e-300).
double identity_relative_residual(const IdentityId& id, KernelPoint pt);

/// False for printed identities known to be misprinted (all Laplace ones except h_y h_x / h).
bool identity_expected_to_hold(const IdentityId& id);

enum class Verdict { Pass, Fail, KnownDiscrepancy };
std::string_view to_string(Verdict v);

struct ResidualReport {
  std::string id;
  std::size_t n_points = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  /// Point attaining max_rel (identities: location = offset, scale = kernel scale).
  ParamPoint argmax;
  /// Residual level above which a point counts as failing.
  double threshold = 0.0;
  /// Points whose residual exceeded the threshold.
  std::size_t n_exceeding = 0;
  /// Points that could not be evaluated (numerical failures).
  std::size_t n_failed = 0;
  bool expected_pass = true;
  Verdict verdict = Verdict::Pass;
};

inline constexpr double kIdentityRelTol = 1e-11;
inline constexpr double kNormalizationTol = 1e-8;
inline constexpr double kZeroMeanTol = 1e-7;
inline constexpr double kSymmetryTol = 1e-8;
inline constexpr double kComparisonTol = 1e-6;

/// Samples scale log-uniform on [0.1, 10] and offset ~ N(0, (3 scale)^2) and aggregates
/// every identity of the family.
std::vector<ResidualReport> run_identity_suite(Family family, FormulaMode mode,
                                               std::size_t n_points, std::uint64_t seed);

/// Normalization, zero-mean score, direct-tensor symmetry and closed-vs-direct residuals over
/// a grid. `tolerances` supplies quadrature tolerances; transform and window follow
/// default_config at each point. Failed points are counted, never thrown.
std::vector<ResidualReport> run_consistency_suite(const SourceSpec& source, Family family,
                                                  const GridSpec& grid,
                                                  const QuadratureConfig& tolerances,
                                                  FormulaMode mode);

/// True when no report has verdict Fail.
bool all_expected_pass(const std::vector<ResidualReport>& reports);

}  // namespace randgeo
