#include <doctest.h>

#include <cmath>
#include <numbers>

#include "randgeo/errors.hpp"
#include "randgeo/kernels.hpp"
#include "randgeo/quadrature.hpp"
#include "support/oracles.hpp"

using namespace randgeo;
using doctest::Approx;

TEST_CASE("heat kernel values") {
  CHECK(heat_kernel_partial({1.0, 0.0}, {0, 0}) == 1.0);
  CHECK(heat_kernel_partial({1.0, 2.0}, {0, 0}) == Approx(0.3678794412).epsilon(1e-10));
  CHECK(heat_kernel_partial({1.0, 1.0}, {1, 0}) == Approx(-0.3894003915).epsilon(1e-10));
}

TEST_CASE("poisson kernel values") {
  CHECK(poisson_kernel_partial({1.0, 0.0}, {0, 0}) == 1.0);
  CHECK(poisson_kernel_partial({1.0, 1.0}, {0, 0}) == 0.5);
  CHECK(poisson_kernel_partial({1.0, 0.0}, {1, 0}) == Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("fundamental solutions") {
  CHECK(fundamental_solution(Family::Heat, {1.0 / (4.0 * std::numbers::pi), 0.0}) ==
        Approx(1.0).epsilon(1e-15));
  CHECK(fundamental_solution(Family::Laplace, {1.0, 0.0}) ==
        Approx(0.3183098862).epsilon(1e-10));
  for (double t : {0.01, 0.5, 3.0}) {
    QuadratureConfig cfg;
    cfg.transform = Tangent{0.0, std::sqrt(2.0 * t)};
    const auto r = integrate([&](double w) { return fundamental_solution(Family::Heat, {t, w}); },
                             Interval::real_line(), cfg);
    CHECK(r.value == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("every kernel partial matches finite differences of the next-lower partial") {
  const KernelPoint heat_pts[] = {{0.5, 1.0}, {1.3, -0.7}, {0.2, 0.3}, {4.0, 5.0}};
  const KernelPoint poisson_pts[] = {{1.0, 1.0}, {0.5, -0.3}, {2.0, 3.0}, {0.3, 0.1}};
  for (Family family : {Family::Heat, Family::Laplace}) {
    for (const KernelPoint& pt : family == Family::Heat ? heat_pts : poisson_pts) {
      for (MultiIndex idx : kAllIndices) {
        if (idx.i + idx.j == 0) continue;
        const bool first = idx.i > 0;
        const MultiIndex base = first ? MultiIndex{idx.i - 1, idx.j} : MultiIndex{idx.i, idx.j - 1};
        const double analytic = kernel_partial(family, pt, idx);
        const double numeric = testing::fd_kernel(family, pt, base, first);
        CAPTURE(to_string(family));
        CAPTURE(idx.i);
        CAPTURE(idx.j);
        CAPTURE(pt.scale);
        CAPTURE(pt.offset);
        CHECK(testing::close(analytic, numeric, 1e-7, 1e-9 * std::abs(kernel_partial(family, pt, {0, 0}))));
      }
    }
  }
}

TEST_CASE("normalized kernel partials match finite differences") {
  for (Family family : {Family::Heat, Family::Laplace}) {
    const KernelPoint pt{0.8, 0.6};
    for (MultiIndex idx : kAllIndices) {
      if (idx.i + idx.j == 0) continue;
      const bool first = idx.i > 0;
      const MultiIndex base = first ? MultiIndex{idx.i - 1, idx.j} : MultiIndex{idx.i, idx.j - 1};
      double numeric = 0.0;
      if (testing::steps_scale(family, first)) {
        numeric = testing::richardson(
            [&](double s) { return fundamental_partial(family, {s, pt.offset}, base); }, pt.scale,
            0.5);
      } else {
        numeric = testing::richardson(
            [&](double w) { return fundamental_partial(family, {pt.scale, w}, base); }, pt.offset);
      }
      CAPTURE(idx.i);
      CAPTURE(idx.j);
      CHECK(testing::close(fundamental_partial(family, pt, idx), numeric, 1e-7, 1e-9));
      CHECK(testing::close(fundamental_partial_ratio(family, pt, idx),
                           fundamental_partial(family, pt, idx) / fundamental_solution(family, pt),
                           1e-12, 1e-14));
    }
  }
}

TEST_CASE("kernels are even in the offset") {
  for (Family family : {Family::Heat, Family::Laplace}) {
    for (MultiIndex idx : kAllIndices) {
      const int offset_order = family == Family::Heat ? idx.i : idx.j;
      const double sign = offset_order % 2 == 0 ? 1.0 : -1.0;
      const double a = kernel_partial(family, {0.7, 1.1}, idx);
      const double b = kernel_partial(family, {0.7, -1.1}, idx);
      CHECK(testing::close(a, sign * b, 1e-14));
    }
  }
}

TEST_CASE("kernels are positive") {
  for (Family family : {Family::Heat, Family::Laplace}) {
    for (double s : {0.05, 1.0, 20.0}) {
      for (double w : {-10.0, -0.1, 0.0, 3.0}) CHECK(kernel_partial(family, {s, w}, {0, 0}) > 0.0);
    }
  }
}

TEST_CASE("fundamental solutions solve their equations") {
  for (KernelPoint pt : {KernelPoint{0.4, 0.3}, KernelPoint{1.7, -2.0}, KernelPoint{0.1, 0.05}}) {
    const double ut = fundamental_partial(Family::Heat, pt, {0, 1});
    const double uxx = fundamental_partial(Family::Heat, pt, {2, 0});
    CHECK(std::abs(ut - uxx) <= 1e-12 * (1.0 + std::abs(uxx)));
    const double lxx = fundamental_partial(Family::Laplace, pt, {2, 0});
    const double lyy = fundamental_partial(Family::Laplace, pt, {0, 2});
    CHECK(std::abs(lxx + lyy) <= 1e-12 * (1.0 + std::abs(lxx)));
    // third order follows by differentiating the equation
    CHECK(testing::close(fundamental_partial(Family::Heat, pt, {1, 1}),
                         fundamental_partial(Family::Heat, pt, {3, 0}), 1e-12, 1e-12));
    CHECK(testing::close(fundamental_partial(Family::Laplace, pt, {3, 0}),
                         -fundamental_partial(Family::Laplace, pt, {1, 2}), 1e-12, 1e-12));
  }
}

TEST_CASE("kernel domain errors") {
  CHECK_THROWS_AS(heat_kernel_partial({0.0, 1.0}, {0, 0}), DomainError);
  CHECK_THROWS_AS(poisson_kernel_partial({-1.0, 1.0}, {0, 0}), DomainError);
  CHECK_THROWS_AS(kernel_partial(Family::Heat, {std::nan(""), 0.0}, {0, 0}), DomainError);
  CHECK_THROWS(kernel_partial(Family::Heat, {1.0, 0.0}, {2, 2}));
}

TEST_CASE("multi-index slots") {
  for (std::size_t k = 0; k < kAllIndices.size(); ++k) CHECK(index_slot(kAllIndices[k]) == k);
  CHECK_FALSE(is_valid({-1, 0}));
  CHECK_FALSE(is_valid({2, 2}));
  CHECK(is_valid({0, 3}));
}
