#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "randgeo/field.hpp"

namespace randgeo {

/// Symmetric 2x2 Fisher information matrix.
struct FisherMatrix {
  double g11 = 0.0;
  double g12 = 0.0;
  double g22 = 0.0;
};

/// Fully symmetric rank-3 structure tensor; the four independent components.
struct StructureTensor {
  double t111 = 0.0;
  double t112 = 0.0;
  double t122 = 0.0;
  double t222 = 0.0;
};

/// Printed: the closed forms exactly as published. Corrected: re-derived forms that agree
/// with the defining integrals.
enum class FormulaMode { Printed, Corrected };

std::string_view to_string(FormulaMode mode);

enum class Component { G11, G12, G22, T111, T112, T122, T222 };

inline constexpr std::array<Component, 7> kAllComponents{
    Component::G11,  Component::G12,  Component::G22, Component::T111,
    Component::T112, Component::T122, Component::T222};

std::string_view to_string(Component c);
bool is_metric(Component c);
double component_of(const FisherMatrix& g, const StructureTensor& t, Component c);

/// True where the printed closed form is known to disagree with the defining integral for
/// general sources: heat T111, T112, T222 and every Laplace component.
bool known_printed_discrepancy(Family family, Component c);

/// Randomized density p(xi; theta) = Phi(theta, xi) f(xi) / u(theta).
double density_pdf(const SourceSpec& source, const ParamPoint& theta, double xi,
                   const DerivBundle& bundle);

/// Score (d/dp1 ln p, d/dp2 ln p) at xi: kernel log-partials minus the log-partials of
/// v = u / normalizer.
std::array<double, 2> score(const SourceSpec& source, const ParamPoint& theta, double xi,
                            const LogDerivBundle& logbundle);

FisherMatrix fisher_closed(const LogDerivBundle& logbundle, const ParamPoint& theta,
                           FormulaMode mode);
StructureTensor structure_closed(const LogDerivBundle& logbundle, const ParamPoint& theta,
                                 FormulaMode mode);

/// Every expectation under p computed by one shared quadrature of the defining integrals.
struct DirectMoments {
  double normalization = 1.0;
  std::array<double, 2> mean_score{};
  FisherMatrix g;
  StructureTensor t;
  /// T112 from the (1,1,2), (1,2,1) and (2,1,1) index orders.
  std::array<double, 3> t112_orders{};
  /// T122 from the (1,2,2), (2,1,2) and (2,2,1) index orders.
  std::array<double, 3> t122_orders{};

  double normalization_err = 0.0;
  std::array<double, 2> mean_score_err{};
  std::array<double, 3> metric_err{};
  std::array<double, 4> tensor_err{};
};

DirectMoments direct_moments(const SourceSpec& source, const ParamPoint& theta,
                             const QuadratureConfig& cfg);

struct FisherDirect {
  FisherMatrix g;
  double err = 0.0;
};

struct StructureDirect {
  StructureTensor t;
  double err = 0.0;
  std::array<double, 3> t112_orders{};
  std::array<double, 3> t122_orders{};
};

FisherDirect fisher_direct(const SourceSpec& source, const ParamPoint& theta,
                           const QuadratureConfig& cfg);
StructureDirect structure_direct(const SourceSpec& source, const ParamPoint& theta,
                                 const QuadratureConfig& cfg);

struct ComparisonReport {
  ParamPoint theta;
  Component component = Component::G11;
  double closed = 0.0;
  double direct = 0.0;
  double direct_err = 0.0;
  double abs_residual = 0.0;
  /// abs_residual / max(1, |direct|).
  double rel_residual = 0.0;
  /// Empty on success; otherwise why this component could not be evaluated.
  std::string failure;
};

/// Both routes for all seven components. Failures are recorded per component, never thrown.
std::vector<ComparisonReport> compare(const SourceSpec& source, const ParamPoint& theta,
                                      const QuadratureConfig& cfg, FormulaMode mode);

struct PdResult {
  bool is_pd = false;
  /// lambda1 is the branch that tends to g11 as g12 -> 0.
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Sylvester criterion (g11 > 0, det > 0) plus closed-form eigenvalues.
PdResult pd_check(const FisherMatrix& g);

}  // namespace randgeo
