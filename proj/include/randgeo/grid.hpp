#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "randgeo/param_point.hpp"

namespace randgeo {

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;

  /// lo + k (hi - lo) / (count - 1); the single point lo when count == 1.
  double at(int k) const;
};

struct GridSpec {
  GridAxis p1;
  GridAxis p2;

  /// Row-major: p1 outer, p2 inner.
  std::vector<ParamPoint> points(Family family) const;
  std::size_t size() const { return static_cast<std::size_t>(p1.count) * p2.count; }
};

/// Parses "p1=lo:hi:count,p2=lo:hi:count". Throws ConfigError.
GridSpec parse_grid(std::string_view text);

std::string describe(const GridSpec& grid);

/// Throws ConfigError unless lo <= hi, count >= 1 and every point is inside the family domain.
void validate(const GridSpec& grid, Family family);

}  // namespace randgeo
