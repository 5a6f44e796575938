#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace randgeo {

/// Closed interval; either endpoint may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool bounded() const;
  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return hi - lo; }
  static Interval real_line() { return {}; }
};

struct Gaussian {
  double mu = 0.0;
  double sigma = 1.0;
};

struct CauchySrc {
  double mu = 0.0;
  double gamma = 1.0;
};

struct Uniform {
  double a = 0.0;
  double b = 1.0;
};

/// Degenerate source concentrated at a single point.
struct PointMass {
  double xi0 = 0.0;
};

/// The non-normalizable sentinel f == 1; the field is then identically 1.
struct ImproperUniform {};

class SourceSpec;

struct Mixture {
  std::vector<double> weights;
  std::vector<SourceSpec> components;
};

/// Initial (heat) or boundary (Laplace) density.
class SourceSpec {
 public:
  using Variant = std::variant<Gaussian, CauchySrc, Uniform, Mixture, PointMass, ImproperUniform>;

  SourceSpec() : v_(ImproperUniform{}) {}
  template <class T>
    requires std::is_constructible_v<Variant, T>
  SourceSpec(T value) : v_(std::move(value)) {}  // NOLINT: implicit by intent

  const Variant& variant() const { return v_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(v_);
  }

  /// Proper = a genuine probability density (not PointMass / ImproperUniform).
  bool is_proper() const;
  /// True if any (nested) component is a Cauchy density.
  bool has_cauchy_component() const;

 private:
  Variant v_;
};

Mixture make_mixture(std::vector<std::pair<double, SourceSpec>> parts);

/// Empty string when valid; otherwise a message naming the violated invariant.
std::string validation_error(const SourceSpec& spec);

/// Throws SourceError carrying validation_error(spec) when invalid.
void validate(const SourceSpec& spec);

/// f(xi). Throws SentinelEvaluationError for PointMass / ImproperUniform.
double source_pdf(const SourceSpec& spec, double xi);

/// Interval outside which the source mass is below tail_tol. tail_tol must lie in (0, 1e-2].
Interval effective_support(const SourceSpec& spec, double tail_tol);

/// Exact closed support hull: finite only for compactly supported sources.
Interval exact_support(const SourceSpec& spec);

/// Points where f or its derivatives jump (Uniform endpoints), sorted and deduplicated.
std::vector<double> discontinuities(const SourceSpec& spec);

/// Points where the source mass concentrates (location parameters), used to seed subdivision.
std::vector<double> focal_points(const SourceSpec& spec);

/// Source translated by c: f_c(xi) = f(xi - c).
SourceSpec shifted(const SourceSpec& spec, double c);

/// Parses the textual descriptor grammar:
///   gaussian:mu=<r>,sigma=<r> | cauchy:mu=<r>,gamma=<r> | uniform:a=<r>,b=<r>
///   pointmass:xi0=<r> | improper-uniform | mix:w1*<desc>|w2*<desc>|...
/// Location parameters (mu, xi0) default to 0. The result is validated.
SourceSpec parse_source(std::string_view descriptor);

/// Canonical descriptor; parse_source(describe(s)) reproduces s exactly.
std::string describe(const SourceSpec& spec);

}  // namespace randgeo
