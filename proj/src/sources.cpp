#include "randgeo/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

#include "randgeo/errors.hpp"
#include "randgeo/io.hpp"

namespace randgeo {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kWeightSumTol = 1e-12;

// Two-sided standard normal quantile: z with P(|Z| > z) = mass, by bisection on erfc.
double normal_two_sided_quantile(double mass) {
  double lo = 0.0;
  double hi = 40.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::numbers::sqrt2) > mass) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

Interval hull(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

void check_tail_tol(double tail_tol) {
  if (!(tail_tol > 0.0 && tail_tol <= 1e-2)) {
    throw std::invalid_argument("tail_tol must lie in (0, 1e-2]");
  }
}

}  // namespace

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

bool SourceSpec::is_proper() const {
  return !is<PointMass>() && !is<ImproperUniform>();
}

bool SourceSpec::has_cauchy_component() const {
  if (is<CauchySrc>()) return true;
  if (const auto* mix = std::get_if<Mixture>(&v_)) {
    return std::any_of(mix->components.begin(), mix->components.end(),
                       [](const SourceSpec& c) { return c.has_cauchy_component(); });
  }
  return false;
}

Mixture make_mixture(std::vector<std::pair<double, SourceSpec>> parts) {
  Mixture m;
  for (auto& [w, s] : parts) {
    m.weights.push_back(w);
    m.components.push_back(std::move(s));
  }
  return m;
}

std::string validation_error(const SourceSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Gaussian& g) -> std::string {
            if (!std::isfinite(g.mu)) return "mu must be finite";
            if (!(g.sigma > 0.0) || !std::isfinite(g.sigma)) return "sigma must be positive";
            return {};
          },
          [](const CauchySrc& c) -> std::string {
            if (!std::isfinite(c.mu)) return "mu must be finite";
            if (!(c.gamma > 0.0) || !std::isfinite(c.gamma)) return "gamma must be positive";
            return {};
          },
          [](const Uniform& u) -> std::string {
            if (!std::isfinite(u.a) || !std::isfinite(u.b)) return "a and b must be finite";
            if (!(u.a < u.b)) return "uniform requires a < b";
            return {};
          },
          [](const PointMass& p) -> std::string {
            if (!std::isfinite(p.xi0)) return "xi0 must be finite";
            return {};
          },
          [](const ImproperUniform&) -> std::string { return {}; },
          [](const Mixture& m) -> std::string {
            if (m.components.empty()) return "mixture needs at least one component";
            if (m.weights.size() != m.components.size()) {
              return "mixture weights and components differ in length";
            }
            for (double w : m.weights) {
              if (!(w > 0.0) || !std::isfinite(w)) return "weights must be positive";
            }
            const double total = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
            if (std::abs(total - 1.0) > kWeightSumTol) return "weights must sum to 1";
            for (const auto& c : m.components) {
              if (!c.is_proper()) {
                return "mixture components must be proper densities (no pointmass or "
                       "improper-uniform)";
              }
              if (auto err = validation_error(c); !err.empty()) return "component: " + err;
            }
            return {};
          },
      },
      spec.variant());
}

void validate(const SourceSpec& spec) {
  if (auto err = validation_error(spec); !err.empty()) throw SourceError(err);
}

double source_pdf(const SourceSpec& spec, double xi) {
  return std::visit(
      Overloaded{
          [xi](const Gaussian& g) {
            const double z = (xi - g.mu) / g.sigma;
            return std::exp(-0.5 * z * z) / (g.sigma * std::sqrt(2.0 * std::numbers::pi));
          },
          [xi](const CauchySrc& c) {
            const double z = (xi - c.mu) / c.gamma;
            return 1.0 / (std::numbers::pi * c.gamma * (1.0 + z * z));
          },
          [xi](const Uniform& u) { return (xi >= u.a && xi <= u.b) ? 1.0 / (u.b - u.a) : 0.0; },
          [xi](const Mixture& m) {
            double sum = 0.0;
            for (std::size_t k = 0; k < m.components.size(); ++k) {
              sum += m.weights[k] * source_pdf(m.components[k], xi);
            }
            return sum;
          },
          [](const PointMass&) -> double {
            throw SentinelEvaluationError("pointmass source has no pointwise density");
          },
          [](const ImproperUniform&) -> double {
            throw SentinelEvaluationError("improper-uniform source has no pointwise density");
          },
      },
      spec.variant());
}

Interval effective_support(const SourceSpec& spec, double tail_tol) {
  check_tail_tol(tail_tol);
  return std::visit(
      Overloaded{
          [tail_tol](const Gaussian& g) {
            const double z = normal_two_sided_quantile(tail_tol);
            return Interval{g.mu - z * g.sigma, g.mu + z * g.sigma};
          },
          [tail_tol](const CauchySrc& c) {
            // P(|X - mu| > q) = 1 - (2/pi) atan(q/gamma)
            const double q = c.gamma / std::tan(0.5 * std::numbers::pi * tail_tol);
            return Interval{c.mu - q, c.mu + q};
          },
          [](const Uniform& u) { return Interval{u.a, u.b}; },
          [tail_tol](const Mixture& m) {
            Interval out{std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()};
            for (const auto& c : m.components) out = hull(out, effective_support(c, tail_tol));
            return out;
          },
          [](const PointMass& p) { return Interval{p.xi0, p.xi0}; },
          [](const ImproperUniform&) { return Interval::real_line(); },
      },
      spec.variant());
}

Interval exact_support(const SourceSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Uniform& u) { return Interval{u.a, u.b}; },
          [](const PointMass& p) { return Interval{p.xi0, p.xi0}; },
          [](const Mixture& m) {
            Interval out{std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()};
            for (const auto& c : m.components) out = hull(out, exact_support(c));
            return out;
          },
          [](const auto&) { return Interval::real_line(); },
      },
      spec.variant());
}

std::vector<double> discontinuities(const SourceSpec& spec) {
  std::vector<double> pts;
  std::visit(Overloaded{
                 [&pts](const Uniform& u) { pts = {u.a, u.b}; },
                 [&pts](const Mixture& m) {
                   for (const auto& c : m.components) {
                     auto sub = discontinuities(c);
                     pts.insert(pts.end(), sub.begin(), sub.end());
                   }
                 },
                 [](const auto&) {},
             },
             spec.variant());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<double> focal_points(const SourceSpec& spec) {
  std::vector<double> pts;
  std::visit(Overloaded{
                 [&pts](const Gaussian& g) { pts = {g.mu}; },
                 [&pts](const CauchySrc& c) { pts = {c.mu}; },
                 [&pts](const PointMass& p) { pts = {p.xi0}; },
                 [&pts](const Mixture& m) {
                   for (const auto& c : m.components) {
                     auto sub = focal_points(c);
                     pts.insert(pts.end(), sub.begin(), sub.end());
                   }
                 },
                 [](const auto&) {},
             },
             spec.variant());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

SourceSpec shifted(const SourceSpec& spec, double c) {
  return std::visit(
      Overloaded{
          [c](const Gaussian& g) -> SourceSpec { return Gaussian{g.mu + c, g.sigma}; },
          [c](const CauchySrc& s) -> SourceSpec { return CauchySrc{s.mu + c, s.gamma}; },
          [c](const Uniform& u) -> SourceSpec { return Uniform{u.a + c, u.b + c}; },
          [c](const PointMass& p) -> SourceSpec { return PointMass{p.xi0 + c}; },
          [](const ImproperUniform& s) -> SourceSpec { return s; },
          [c](const Mixture& m) -> SourceSpec {
            Mixture out;
            out.weights = m.weights;
            for (const auto& comp : m.components) out.components.push_back(shifted(comp, c));
            return out;
          },
      },
      spec.variant());
}

// ---------------------------------------------------------------------------
// Descriptor grammar

namespace {

struct Params {
  std::vector<std::pair<std::string, double>> items;

  std::optional<double> get(std::string_view key) const {
    for (const auto& [k, v] : items) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

Params parse_params(std::string_view body, std::initializer_list<std::string_view> allowed,
                    std::string_view kind) {
  Params out;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const auto item = io::trim(body.substr(0, comma));
    body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw SourceError(std::string(kind) + ": expected key=value, got '" + std::string(item) +
                        "'");
    }
    const std::string key(io::trim(item.substr(0, eq)));
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw SourceError(std::string(kind) + ": unknown parameter '" + key + "'");
    }
    if (out.get(key)) throw SourceError(std::string(kind) + ": duplicate parameter '" + key + "'");
    try {
      out.items.emplace_back(key, io::parse_double(item.substr(eq + 1)));
    } catch (const std::invalid_argument&) {
      throw SourceError(std::string(kind) + ": parameter '" + key + "' is not a number");
    }
  }
  return out;
}

double required(const Params& p, std::string_view key, std::string_view kind) {
  if (auto v = p.get(key)) return *v;
  throw SourceError(std::string(kind) + ": missing parameter '" + std::string(key) + "'");
}

SourceSpec parse_simple(std::string_view desc) {
  desc = io::trim(desc);
  if (desc == "improper-uniform") return ImproperUniform{};
  if (desc.empty()) throw SourceError("empty source descriptor");
  // a bare kind name is allowed when every parameter has a default
  const auto colon = desc.find(':');
  const auto kind = io::trim(desc.substr(0, colon));
  const auto body = colon == std::string_view::npos ? std::string_view{} : desc.substr(colon + 1);
  if (kind == "gaussian") {
    auto p = parse_params(body, {"mu", "sigma"}, kind);
    return Gaussian{p.get("mu").value_or(0.0), required(p, "sigma", kind)};
  }
  if (kind == "cauchy") {
    auto p = parse_params(body, {"mu", "gamma"}, kind);
    return CauchySrc{p.get("mu").value_or(0.0), required(p, "gamma", kind)};
  }
  if (kind == "uniform") {
    auto p = parse_params(body, {"a", "b"}, kind);
    return Uniform{required(p, "a", kind), required(p, "b", kind)};
  }
  if (kind == "pointmass") {
    auto p = parse_params(body, {"xi0"}, kind);
    return PointMass{p.get("xi0").value_or(0.0)};
  }
  if (kind == "mix") throw SourceError("nested mix descriptors are not supported");
  throw SourceError("unknown source kind '" + std::string(kind) + "'");
}

}  // namespace

SourceSpec parse_source(std::string_view descriptor) {
  descriptor = io::trim(descriptor);
  SourceSpec spec;
  if (descriptor.starts_with("mix:")) {
    Mixture m;
    std::string_view rest = descriptor.substr(4);
    while (true) {
      const auto bar = rest.find('|');
      const auto part = io::trim(rest.substr(0, bar));
      const auto star = part.find('*');
      if (star == std::string_view::npos) {
        throw SourceError("mix: component '" + std::string(part) + "' must read <weight>*<desc>");
      }
      try {
        m.weights.push_back(io::parse_double(part.substr(0, star)));
      } catch (const std::invalid_argument&) {
        throw SourceError("mix: weight is not a number in '" + std::string(part) + "'");
      }
      m.components.push_back(parse_simple(part.substr(star + 1)));
      if (bar == std::string_view::npos) break;
      rest = rest.substr(bar + 1);
    }
    spec = std::move(m);
  } else {
    spec = parse_simple(descriptor);
  }
  validate(spec);
  return spec;
}

std::string describe(const SourceSpec& spec) {
  using io::format_shortest;
  return std::visit(
      Overloaded{
          [](const Gaussian& g) {
            return "gaussian:mu=" + format_shortest(g.mu) + ",sigma=" + format_shortest(g.sigma);
          },
          [](const CauchySrc& c) {
            return "cauchy:mu=" + format_shortest(c.mu) + ",gamma=" + format_shortest(c.gamma);
          },
          [](const Uniform& u) {
            return "uniform:a=" + format_shortest(u.a) + ",b=" + format_shortest(u.b);
          },
          [](const PointMass& p) { return "pointmass:xi0=" + format_shortest(p.xi0); },
          [](const ImproperUniform&) { return std::string("improper-uniform"); },
          [](const Mixture& m) {
            std::string out = "mix:";
            for (std::size_t k = 0; k < m.components.size(); ++k) {
              if (k) out += '|';
              out += format_shortest(m.weights[k]) + "*" + describe(m.components[k]);
            }
            return out;
          },
      },
      spec.variant());
}

}  // namespace randgeo
