#include "randgeo/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "randgeo/errors.hpp"

namespace randgeo {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kUflow = std::numeric_limits<double>::min();

struct Segment {
  double lo;
  double hi;
  std::vector<double> value;
  std::vector<double> err;
};

// One 15-point Kronrod panel, with the QUADPACK error heuristic per component.
void gk15(std::size_t n, const std::function<void(double, std::span<double>)>& g, Segment& seg,
          std::vector<double>& scratch) {
  const double center = 0.5 * (seg.lo + seg.hi);
  const double half = 0.5 * (seg.hi - seg.lo);
  // scratch layout: 15 abscissae x n components
  scratch.assign(15 * n, 0.0);
  auto row = [&](int k) { return std::span<double>(scratch.data() + k * n, n); };
  g(center, row(0));
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    g(center - dx, row(1 + 2 * j));
    g(center + dx, row(2 + 2 * j));
  }
  seg.value.assign(n, 0.0);
  seg.err.assign(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    const double fc = row(0)[c];
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::abs(resk);
    for (int j = 0; j < 7; ++j) {
      const double f1 = row(1 + 2 * j)[c];
      const double f2 = row(2 + 2 * j)[c];
      resk += kWgk[j] * (f1 + f2);
      resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
      if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
      resasc += kWgk[j] * (std::abs(row(1 + 2 * j)[c] - reskh) +
                           std::abs(row(2 + 2 * j)[c] - reskh));
    }
    const double ah = std::abs(half);
    resk *= half;
    resabs *= ah;
    resasc *= ah;
    double abserr = std::abs((resk - resg * half));
    if (resasc != 0.0 && abserr != 0.0) {
      abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    }
    if (resabs > kUflow / (50.0 * kEps)) abserr = std::max(kEps * 50.0 * resabs, abserr);
    if (!std::isfinite(resk)) abserr = std::numeric_limits<double>::infinity();
    seg.value[c] = resk;
    seg.err[c] = abserr;
  }
}

std::string describe_interval(double lo, double hi) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << lo << ", " << hi << "]";
  return os.str();
}

}  // namespace

void validate(const QuadratureConfig& cfg) {
  if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0)) {
    throw std::invalid_argument("abs_tol and rel_tol must be positive");
  }
  if (!(cfg.tail_tol > 0.0 && cfg.tail_tol <= 1e-2)) {
    throw std::invalid_argument("tail_tol must lie in (0, 1e-2]");
  }
  if (cfg.max_subdivisions < 1) throw std::invalid_argument("max_subdivisions must be >= 1");
  if (cfg.transform && !(cfg.transform->scale > 0.0)) {
    throw std::invalid_argument("tangent transform scale must be positive");
  }
}

double MultiQuadResult::max_err() const {
  double m = 0.0;
  for (double e : err_estimates) m = std::max(m, e);
  return m;
}

MultiQuadResult integrate_many(std::size_t count, const MultiIntegrand& g, Interval domain,
                               const QuadratureConfig& cfg) {
  validate(cfg);
  if (count == 0) throw std::invalid_argument("integrate_many: no integrands");
  if (!(domain.lo <= domain.hi)) throw std::invalid_argument("integrate_many: empty domain");

  // Choose the integration variable.
  std::function<void(double, std::span<double>)> integrand = g;
  std::function<double(double)> to_var = [](double xi) { return xi; };
  double lo = domain.lo;
  double hi = domain.hi;
  if (!domain.bounded() && cfg.transform) {
    const Tangent tr = *cfg.transform;
    to_var = [tr](double xi) { return std::atan((xi - tr.center) / tr.scale); };
    lo = std::isfinite(domain.lo) ? to_var(domain.lo) : -0.5 * std::numbers::pi;
    hi = std::isfinite(domain.hi) ? to_var(domain.hi) : 0.5 * std::numbers::pi;
    integrand = [&g, tr](double v, std::span<double> out) {
      const double c = std::cos(v);
      const double jac = tr.scale / (c * c);
      const double xi = tr.center + tr.scale * std::tan(v);
      if (!std::isfinite(xi) || !std::isfinite(jac)) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
      }
      g(xi, out);
      for (double& o : out) o = (o == 0.0) ? 0.0 : o * jac;
    };
  } else if (!cfg.transform) {
    lo = std::max(lo, cfg.window.lo);
    hi = std::min(hi, cfg.window.hi);
    if (!(std::isfinite(lo) && std::isfinite(hi))) {
      throw std::invalid_argument(
          "integrate_many: unbounded domain needs a truncation window or a tangent transform");
    }
  }

  MultiQuadResult result;
  result.values.assign(count, 0.0);
  result.err_estimates.assign(count, 0.0);
  if (!(lo < hi)) return result;

  // Initial partition at the breakpoints.
  std::vector<double> cuts{lo};
  std::vector<double> mapped;
  for (double b : cfg.breakpoints) {
    const double v = to_var(b);
    if (v > lo && v < hi) mapped.push_back(v);
  }
  std::sort(mapped.begin(), mapped.end());
  for (double v : mapped) {
    if (v > cuts.back()) cuts.push_back(v);
  }
  if (hi > cuts.back()) {
    cuts.push_back(hi);
  } else {
    cuts.back() = hi;
  }

  std::vector<double> scratch;
  std::vector<Segment> segs;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Segment s{cuts[k], cuts[k + 1], {}, {}};
    gk15(count, integrand, s, scratch);
    segs.push_back(std::move(s));
  }

  int bisections = 0;
  while (true) {
    std::fill(result.values.begin(), result.values.end(), 0.0);
    std::fill(result.err_estimates.begin(), result.err_estimates.end(), 0.0);
    for (const auto& s : segs) {
      for (std::size_t c = 0; c < count; ++c) {
        result.values[c] += s.value[c];
        result.err_estimates[c] += s.err[c];
      }
    }
    std::vector<double> tol(count);
    bool converged = true;
    std::size_t worst_comp = 0;
    double worst_ratio = 0.0;
    for (std::size_t c = 0; c < count; ++c) {
      tol[c] = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(result.values[c]));
      const double ratio = result.err_estimates[c] / tol[c];
      if (!(ratio <= 1.0)) converged = false;
      if (!(ratio <= worst_ratio)) {
        worst_ratio = ratio;
        worst_comp = c;
      }
    }
    result.subdivisions_used = bisections;
    if (converged) return result;

    // Segment contributing most to the tolerance-weighted error.
    std::size_t pick = segs.size();
    double pick_score = -1.0;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const double mid = 0.5 * (segs[k].lo + segs[k].hi);
      if (segs[k].hi - segs[k].lo <= 1e3 * kEps * std::max(1.0, std::abs(mid))) continue;
      double score = 0.0;
      for (std::size_t c = 0; c < count; ++c) score += segs[k].err[c] / tol[c];
      if (!(score <= pick_score)) {
        pick_score = score;
        pick = k;
      }
    }
    if (bisections >= cfg.max_subdivisions || pick == segs.size()) {
      std::size_t worst_seg = 0;
      for (std::size_t k = 1; k < segs.size(); ++k) {
        if (segs[k].err[worst_comp] > segs[worst_seg].err[worst_comp]) worst_seg = k;
      }
      throw QuadratureError("quadrature did not converge after " + std::to_string(bisections) +
                                " subdivisions (component " + std::to_string(worst_comp) +
                                ", worst subinterval " +
                                describe_interval(segs[worst_seg].lo, segs[worst_seg].hi) + ")",
                            result.values[worst_comp], result.err_estimates[worst_comp],
                            segs[worst_seg].lo, segs[worst_seg].hi);
    }
    const double mid = 0.5 * (segs[pick].lo + segs[pick].hi);
    Segment left{segs[pick].lo, mid, {}, {}};
    Segment right{mid, segs[pick].hi, {}, {}};
    gk15(count, integrand, left, scratch);
    gk15(count, integrand, right, scratch);
    segs[pick] = std::move(left);
    segs.push_back(std::move(right));
    ++bisections;
  }
}

QuadResult integrate(const std::function<double(double)>& g, Interval domain,
                     const QuadratureConfig& cfg) {
  auto r = integrate_many(
      1, [&g](double xi, std::span<double> out) { out[0] = g(xi); }, domain, cfg);
  return {r.values[0], r.err_estimates[0], r.subdivisions_used};
}

Interval integration_domain(const SourceSpec& source) {
  if (source.is<ImproperUniform>()) return Interval::real_line();
  return exact_support(source);
}

QuadratureConfig default_config(Family family, const SourceSpec& source, const ParamPoint& theta,
                                double tail_tol) {
  QuadratureConfig cfg;
  cfg.tail_tol = tail_tol;
  cfg.breakpoints = discontinuities(source);
  for (double p : focal_points(source)) cfg.breakpoints.push_back(p);
  cfg.breakpoints.push_back(theta.location());
  std::sort(cfg.breakpoints.begin(), cfg.breakpoints.end());
  cfg.breakpoints.erase(std::unique(cfg.breakpoints.begin(), cfg.breakpoints.end()),
                        cfg.breakpoints.end());

  if (family == Family::Heat && !source.has_cauchy_component()) {
    const double x = theta.p1;
    const double t = theta.p2;
    const double c = std::sqrt(4.0 * std::log(1.0 / tail_tol));
    const double half = c * std::sqrt(t);
    Interval supp = effective_support(source, tail_tol);
    if (!supp.bounded()) supp = {x, x};
    cfg.window = {std::min(supp.lo, x) - half, std::max(supp.hi, x) + half};
    return cfg;
  }
  if (family == Family::Heat) {
    cfg.transform = Tangent{theta.p1, std::sqrt(2.0 * theta.p2)};
  } else {
    cfg.transform = Tangent{theta.p2, theta.p1};
  }
  return cfg;
}

QuadratureConfig default_config(Family family, const SourceSpec& source, const ParamPoint& theta,
                                const QuadratureConfig& tolerances) {
  QuadratureConfig cfg = default_config(family, source, theta, tolerances.tail_tol);
  cfg.abs_tol = tolerances.abs_tol;
  cfg.rel_tol = tolerances.rel_tol;
  cfg.max_subdivisions = tolerances.max_subdivisions;
  return cfg;
}

}  // namespace randgeo
