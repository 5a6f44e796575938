#include "randgeo/grid.hpp"

#include <cmath>

#include "randgeo/errors.hpp"
#include "randgeo/io.hpp"

namespace randgeo {

double GridAxis::at(int k) const {
  if (count == 1) return lo;
  if (k == count - 1) return hi;
  return lo + k * (hi - lo) / (count - 1);
}

std::vector<ParamPoint> GridSpec::points(Family family) const {
  std::vector<ParamPoint> out;
  out.reserve(size());
  for (int a = 0; a < p1.count; ++a) {
    for (int b = 0; b < p2.count; ++b) out.push_back({family, p1.at(a), p2.at(b)});
  }
  return out;
}

namespace {

GridAxis parse_axis(std::string_view text, std::string_view name) {
  GridAxis axis;
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw ConfigError("grid axis " + std::string(name) + " must read lo:hi:count");
  }
  try {
    axis.lo = io::parse_double(text.substr(0, c1));
    axis.hi = io::parse_double(text.substr(c1 + 1, c2 - c1 - 1));
    const long long n = io::parse_integer(text.substr(c2 + 1));
    if (n < 1 || n > 1000000) throw ConfigError("grid axis " + std::string(name) + ": count must be >= 1");
    axis.count = static_cast<int>(n);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("grid axis " + std::string(name) + ": " + ex.what());
  }
  return axis;
}

}  // namespace

GridSpec parse_grid(std::string_view text) {
  GridSpec grid;
  bool seen1 = false;
  bool seen2 = false;
  text = io::trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = io::trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("grid: expected p1=... or p2=...");
    const auto key = io::trim(item.substr(0, eq));
    if (key == "p1") {
      grid.p1 = parse_axis(item.substr(eq + 1), key);
      seen1 = true;
    } else if (key == "p2") {
      grid.p2 = parse_axis(item.substr(eq + 1), key);
      seen2 = true;
    } else {
      throw ConfigError("grid: unknown axis '" + std::string(key) + "'");
    }
  }
  if (!seen1 || !seen2) throw ConfigError("grid: both p1 and p2 are required");
  return grid;
}

std::string describe(const GridSpec& grid) {
  auto axis = [](const GridAxis& a) {
    return io::format_shortest(a.lo) + ":" + io::format_shortest(a.hi) + ":" +
           std::to_string(a.count);
  };
  return "p1=" + axis(grid.p1) + ",p2=" + axis(grid.p2);
}

void validate(const GridSpec& grid, Family family) {
  for (const auto* axis : {&grid.p1, &grid.p2}) {
    if (!std::isfinite(axis->lo) || !std::isfinite(axis->hi)) {
      throw ConfigError("grid: bounds must be finite");
    }
    if (!(axis->lo <= axis->hi)) throw ConfigError("grid: lo must not exceed hi");
    if (axis->count < 1) throw ConfigError("grid: count must be >= 1");
  }
  const GridAxis& scale_axis = family == Family::Heat ? grid.p2 : grid.p1;
  if (!(scale_axis.lo >= kMinScale)) {
    throw ConfigError(std::string("grid: ") + (family == Family::Heat ? "t (p2)" : "x (p1)") +
                      " must be >= 1e-8 for the " + std::string(to_string(family)) +
                      " family");
  }
}

}  // namespace randgeo
