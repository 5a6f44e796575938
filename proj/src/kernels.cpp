#include "randgeo/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "randgeo/detail/kernel_ratios.hpp"
#include "randgeo/errors.hpp"

namespace randgeo {

namespace {

void check_point(KernelPoint pt, const char* who) {
  if (!(pt.scale > 0.0) || !std::isfinite(pt.scale)) {
    throw DomainError(std::string(who) + ": scale must be positive and finite, got " +
                      std::to_string(pt.scale));
  }
  if (!std::isfinite(pt.offset)) {
    throw DomainError(std::string(who) + ": offset must be finite");
  }
}

void check_index(MultiIndex idx) {
  if (!is_valid(idx)) {
    throw std::out_of_range("multi-index (" + std::to_string(idx.i) + "," +
                            std::to_string(idx.j) + ") outside total order 3");
  }
}

using detail::heat_ratio;
using detail::poisson_ratio;

// d^k/dt^k of t^{-1/2}, divided by t^{-1/2}, times t^k.
constexpr std::array<double, 4> kHeatNormalizerCoeff{1.0, -0.5, 0.75, -1.875};
constexpr std::array<std::array<double, 4>, 4> kBinomial{{
    {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}}};

}  // namespace

std::string_view to_string(Family family) {
  return family == Family::Heat ? "heat" : "laplace";
}

bool is_valid(MultiIndex idx) {
  return idx.i >= 0 && idx.j >= 0 && idx.order() <= 3;
}

std::size_t index_slot(MultiIndex idx) {
  check_index(idx);
  for (std::size_t k = 0; k < kAllIndices.size(); ++k) {
    if (kAllIndices[k] == idx) return k;
  }
  throw std::logic_error("index_slot: unreachable");
}

double kernel_partial_ratio(Family family, KernelPoint pt, MultiIndex idx) {
  check_point(pt, "kernel_partial_ratio");
  check_index(idx);
  return family == Family::Heat ? heat_ratio(pt.scale, pt.offset, idx)
                                : poisson_ratio(pt.scale, pt.offset, idx);
}

double heat_kernel_partial(KernelPoint pt, MultiIndex idx) {
  check_point(pt, "heat_kernel_partial");
  check_index(idx);
  const double h = std::exp(-pt.offset * pt.offset / (4.0 * pt.scale));
  if (h == 0.0) return 0.0;
  return h * heat_ratio(pt.scale, pt.offset, idx);
}

double poisson_kernel_partial(KernelPoint pt, MultiIndex idx) {
  check_point(pt, "poisson_kernel_partial");
  check_index(idx);
  const double h = 1.0 / (pt.scale * pt.scale + pt.offset * pt.offset);
  return h * poisson_ratio(pt.scale, pt.offset, idx);
}

double kernel_partial(Family family, KernelPoint pt, MultiIndex idx) {
  return family == Family::Heat ? heat_kernel_partial(pt, idx) : poisson_kernel_partial(pt, idx);
}

double normalizer(Family family, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("normalizer: scale must be positive and finite");
  }
  if (family == Family::Heat) return 0.5 / std::sqrt(std::numbers::pi * scale);
  return scale / std::numbers::pi;
}

double fundamental_solution(Family family, KernelPoint pt) {
  return normalizer(family, pt.scale) * kernel_partial(family, pt, {0, 0});
}

double fundamental_partial_ratio(Family family, KernelPoint pt, MultiIndex idx) {
  check_point(pt, "fundamental_partial_ratio");
  check_index(idx);
  if (family == Family::Heat) {
    // The normalizer depends on t only: Leibniz rule in j.
    double sum = 0.0;
    double tk = 1.0;
    for (int k = 0; k <= idx.j; ++k) {
      sum += kBinomial[idx.j][k] * kHeatNormalizerCoeff[k] / tk *
             heat_ratio(pt.scale, pt.offset, {idx.i, idx.j - k});
      tk *= pt.scale;
    }
    return sum;
  }
  // Normalizer x/pi is linear in x.
  double r = poisson_ratio(pt.scale, pt.offset, idx);
  if (idx.i > 0) r += idx.i / pt.scale * poisson_ratio(pt.scale, pt.offset, {idx.i - 1, idx.j});
  return r;
}

double fundamental_partial(Family family, KernelPoint pt, MultiIndex idx) {
  const double phi = fundamental_solution(family, pt);
  if (phi == 0.0) return 0.0;
  return phi * fundamental_partial_ratio(family, pt, idx);
}

}  // namespace randgeo
