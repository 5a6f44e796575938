#pragma once

#include <stdexcept>

#include "randgeo/kernels.hpp"

namespace randgeo::detail {

/// h_{ij} / h for h = exp(-w^2/4t), in a = w/(2t) so that h_x / h = -a.
/// Templated so identity checks can run the same expressions in extended precision.
template <class Real>
Real heat_ratio(Real t, Real w, MultiIndex idx) {
  const Real a = w / (Real(2) * t);
  const Real a2 = a * a;
  const Real it = Real(1) / t;
  switch (idx.i * 4 + idx.j) {
    case 0: return Real(1);                                                        // (0,0)
    case 4: return -a;                                                             // (1,0)
    case 1: return a2;                                                             // (0,1)
    case 8: return a2 - Real(0.5) * it;                                            // (2,0)
    case 5: return a * (it - a2);                                                  // (1,1)
    case 2: return a2 * (a2 - Real(2) * it);                                       // (0,2)
    case 12: return a * (Real(1.5) * it - a2);                                     // (3,0)
    case 9: return a2 * a2 - Real(2.5) * a2 * it + Real(0.5) * it * it;            // (2,1)
    case 6: return -a * (a2 * a2 - Real(4) * a2 * it + Real(2) * it * it);         // (1,2)
    case 3: return a2 * (a2 * a2 - Real(6) * a2 * it + Real(6) * it * it);         // (0,3)
    default: break;
  }
  throw std::out_of_range("heat_ratio: index outside total order 3");
}

/// h_{ij} / h for h = 1/(x^2 + w^2); every ratio is a polynomial in x, w and h.
template <class Real>
Real poisson_ratio(Real x, Real w, MultiIndex idx) {
  const Real h = Real(1) / (x * x + w * w);
  const Real h2 = h * h;
  const Real h3 = h2 * h;
  switch (idx.i * 4 + idx.j) {
    case 0: return Real(1);
    case 4: return Real(-2) * x * h;
    case 1: return Real(-2) * w * h;
    case 8: return Real(-2) * h + Real(8) * x * x * h2;
    case 5: return Real(8) * x * w * h2;
    case 2: return Real(-2) * h + Real(8) * w * w * h2;
    case 12: return Real(24) * x * h2 - Real(48) * x * x * x * h3;
    case 9: return Real(8) * w * h2 - Real(48) * x * x * w * h3;
    case 6: return Real(8) * x * h2 - Real(48) * x * w * w * h3;
    case 3: return Real(24) * w * h2 - Real(48) * w * w * w * h3;
    default: break;
  }
  throw std::out_of_range("poisson_ratio: index outside total order 3");
}

template <class Real>
Real kernel_ratio(Family family, Real scale, Real offset, MultiIndex idx) {
  return family == Family::Heat ? heat_ratio(scale, offset, idx)
                                : poisson_ratio(scale, offset, idx);
}

}  // namespace randgeo::detail
