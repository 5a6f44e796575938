#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace randgeo {

enum class Family { Heat, Laplace };

std::string_view to_string(Family family);

/// Derivative orders: `i` in the first parameter (x for both families),
/// `j` in the second (t for heat, y for Laplace). Total order at most 3.
struct MultiIndex {
  int i = 0;
  int j = 0;

  constexpr int order() const { return i + j; }
  friend constexpr bool operator==(MultiIndex, MultiIndex) = default;
};

inline constexpr std::size_t kNumIndices = 10;

/// All multi-indices of total order <= 3, ordered by total order then by descending i.
inline constexpr std::array<MultiIndex, kNumIndices> kAllIndices{{
    {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}}};

/// Position of `idx` in kAllIndices. Throws std::out_of_range for invalid indices.
std::size_t index_slot(MultiIndex idx);

bool is_valid(MultiIndex idx);

/// Kernel argument. Heat: scale = t, offset = x - xi. Laplace: scale = x, offset = y - xi.
struct KernelPoint {
  double scale = 1.0;
  double offset = 0.0;
};

/// Partials of h(t, w) = exp(-w^2 / 4t); index i differentiates in w (equivalently x), j in t.
double heat_kernel_partial(KernelPoint pt, MultiIndex idx);

/// Partials of h(x, w) = 1 / (x^2 + w^2); index i differentiates in x, j in w (equivalently y).
double poisson_kernel_partial(KernelPoint pt, MultiIndex idx);

double kernel_partial(Family family, KernelPoint pt, MultiIndex idx);

/// The partial divided by h itself. Always finite for finite arguments, even where h underflows.
double kernel_partial_ratio(Family family, KernelPoint pt, MultiIndex idx);

/// Per-family constant turning h into the normalized kernel: 1/(2 sqrt(pi t)) or x/pi.
double normalizer(Family family, double scale);

/// Normalized kernel Phi = normalizer * h.
double fundamental_solution(Family family, KernelPoint pt);

/// Partials of Phi, from the h partials and the product rule with the normalizer.
double fundamental_partial(Family family, KernelPoint pt, MultiIndex idx);

/// Partial of Phi divided by Phi.
double fundamental_partial_ratio(Family family, KernelPoint pt, MultiIndex idx);

}  // namespace randgeo
