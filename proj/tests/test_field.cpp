#include <doctest.h>

#include <cmath>
#include <numbers>

#include "randgeo/errors.hpp"
#include "randgeo/field.hpp"
#include "randgeo/rng.hpp"
#include "support/oracles.hpp"

using namespace randgeo;
using doctest::Approx;

namespace {

QuadratureConfig tight(Family family, const SourceSpec& s, const ParamPoint& theta) {
  QuadratureConfig tol;
  tol.abs_tol = 1e-13;
  tol.rel_tol = 1e-11;
  tol.max_subdivisions = 2000;
  return default_config(family, s, theta, tol);
}

DerivBundle tight_bundle(const SourceSpec& s, const ParamPoint& theta) {
  return field_derivs(s, theta, tight(theta.family, s, theta));
}

ParamPoint random_theta(Family family, DeterministicRng& rng) {
  if (family == Family::Heat) return {family, rng.uniform(-2.0, 2.0), rng.log_uniform(0.05, 3.0)};
  return {family, rng.log_uniform(0.1, 3.0), rng.uniform(-2.0, 2.0)};
}

}  // namespace

TEST_CASE("field values at reference points") {
  const auto flat = field_derivs(ImproperUniform{}, {Family::Heat, 0.3, 0.7});
  CHECK(flat.u() == 1.0);
  for (std::size_t k = 1; k < kNumIndices; ++k) CHECK(flat.values[k] == 0.0);

  const auto g = field_derivs(Gaussian{0, 1}, {Family::Heat, 0.0, 0.5});
  CHECK(g.u() == Approx(1.0 / (2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-10));

  const auto c = field_derivs(CauchySrc{0, 1}, {Family::Laplace, 1.0, 0.0});
  CHECK(c.u() == Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("gaussian source gives the closed-form convolution and its derivatives") {
  // u(x, t) = N(x; mu, sigma^2 + 2t)
  const double mu = 0.4, sigma = 0.8;
  for (ParamPoint th : {ParamPoint{Family::Heat, 0.0, 0.5}, ParamPoint{Family::Heat, 1.7, 0.05}}) {
    auto u_at = [&](double x, double t) {
      const double v = sigma * sigma + 2 * t;
      return std::exp(-(x - mu) * (x - mu) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
    };
    const auto b = field_derivs(Gaussian{mu, sigma}, th);
    CHECK(testing::close(b.u(), u_at(th.p1, th.p2), 1e-10));
    const double ux = testing::richardson([&](double x) { return u_at(x, th.p2); }, th.p1);
    CHECK(testing::close(b[{1, 0}], ux, 1e-7, 1e-10));
  }
}

TEST_CASE("cauchy source under the Poisson kernel stays Cauchy with scale x + gamma") {
  const double gamma = 0.5, mu = -0.3;
  for (ParamPoint th : {ParamPoint{Family::Laplace, 1.0, 0.0}, ParamPoint{Family::Laplace, 0.2, 1.4}}) {
    const double s = th.p1 + gamma;
    const double w = th.p2 - mu;
    const double expect = s / (std::numbers::pi * (s * s + w * w));
    CHECK(testing::close(field_derivs(CauchySrc{mu, gamma}, th).u(), expect, 1e-10));
  }
}

TEST_CASE("every field partial matches finite differences of the next-lower partial") {
  const std::pair<SourceSpec, ParamPoint> cases[] = {
      {Gaussian{0, 1}, {Family::Heat, 0.3, 0.4}},
      {Uniform{0, 2}, {Family::Heat, 1.2, 0.3}},
      {CauchySrc{0, 1}, {Family::Heat, -0.5, 1.0}},
      {Uniform{0, 2}, {Family::Laplace, 0.5, 1.0}},
      {CauchySrc{0, 1}, {Family::Laplace, 0.8, -0.4}},
      {make_mixture({{0.3, Gaussian{-1, 0.5}}, {0.7, Uniform{0, 3}}}), {Family::Laplace, 1.5, 0.5}},
      {PointMass{0.25}, {Family::Heat, 0.1, 0.6}},
      {PointMass{0.25}, {Family::Laplace, 0.7, 0.1}},
  };
  for (const auto& [src, th] : cases) {
    const auto b = tight_bundle(src, th);
    for (MultiIndex idx : kAllIndices) {
      if (idx.i + idx.j == 0) continue;
      const bool first = idx.i > 0;
      const MultiIndex base = first ? MultiIndex{idx.i - 1, idx.j} : MultiIndex{idx.i, idx.j - 1};
      double numeric = 0.0;
      if (first) {
        numeric = testing::richardson(
            [&](double p1) { return tight_bundle(src, {th.family, p1, th.p2})[base]; }, th.p1,
            th.family == Family::Laplace ? std::min(1.0, th.p1) : 1.0);
      } else {
        numeric = testing::richardson(
            [&](double p2) { return tight_bundle(src, {th.family, th.p1, p2})[base]; }, th.p2,
            th.family == Family::Heat ? std::min(1.0, th.p2) : 1.0);
      }
      CAPTURE(describe(src));
      CAPTURE(to_string(th.family));
      CAPTURE(idx.i);
      CAPTURE(idx.j);
      CHECK(testing::close(b[idx], numeric, 1e-6, 1e-7 * (1.0 + std::abs(b.u()))));
    }
  }
}

TEST_CASE("the field solves its equation for every corpus source") {
  for (Family family : {Family::Heat, Family::Laplace}) {
    DeterministicRng rng(7);
    for (const auto& [name, spec] : testing::corpus()) {
      for (int k = 0; k < 50; ++k) {
        const ParamPoint th = random_theta(family, rng);
        const auto b = field_derivs(spec, th);
        CAPTURE(name);
        CAPTURE(th.p1);
        CAPTURE(th.p2);
        CHECK(std::abs(pde_residual(b, family)) <= 1e-7 * (1.0 + std::abs(b[{2, 0}])));
      }
    }
  }
  const auto g = field_derivs(Gaussian{0, 1}, {Family::Heat, 0.3, 0.4});
  CHECK(std::abs(pde_residual(g, Family::Heat)) < 1e-8);
  const auto u = field_derivs(Uniform{0, 2}, {Family::Laplace, 0.5, 1.0});
  CHECK(std::abs(pde_residual(u, Family::Laplace)) < 1e-8);
  CHECK(pde_residual(field_derivs(ImproperUniform{}, {Family::Laplace, 1, 0}), Family::Laplace) == 0.0);
}

TEST_CASE("translation equivariance") {
  for (Family family : {Family::Heat, Family::Laplace}) {
    for (const auto& [name, spec] : testing::corpus()) {
      const ParamPoint th = family == Family::Heat ? ParamPoint{family, 0.4, 0.6}
                                                   : ParamPoint{family, 0.6, 0.4};
      const ParamPoint moved = family == Family::Heat ? ParamPoint{family, th.p1 + 1.25, th.p2}
                                                      : ParamPoint{family, th.p1, th.p2 + 1.25};
      const auto a = field_derivs(spec, th);
      const auto b = field_derivs(shifted(spec, 1.25), moved);
      CAPTURE(name);
      for (std::size_t k = 0; k < kNumIndices; ++k) {
        CHECK(testing::close(a.values[k], b.values[k], 1e-8, 1e-10));
      }
    }
  }
}

TEST_CASE("log-derivative chain rule") {
  DerivBundle one;
  one.values[0] = 1.0;
  for (double v : log_derivs(one).values) CHECK(v == 0.0);

  // u = e^{p1}: every pure p1 partial equals u
  DerivBundle e;
  e.values[index_slot({0, 0})] = std::exp(0.3);
  e.values[index_slot({1, 0})] = std::exp(0.3);
  e.values[index_slot({2, 0})] = std::exp(0.3);
  e.values[index_slot({3, 0})] = std::exp(0.3);
  const auto le = log_derivs(e);
  CHECK(le[{0, 0}] == Approx(0.3).epsilon(1e-15));
  CHECK(le[{1, 0}] == Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(le[{2, 0}]) < 1e-15);
  CHECK(std::abs(le[{3, 0}]) < 1e-15);

  DerivBundle r;
  r.values[index_slot({0, 0})] = 2.0;
  r.values[index_slot({1, 0})] = 1.0;
  r.values[index_slot({2, 0})] = 0.5;
  CHECK(log_derivs(r)[{2, 0}] == 0.0);

  DerivBundle bad;
  CHECK_THROWS_AS(log_derivs(bad), DomainError);
}

TEST_CASE("log-derivatives match finite differences of ln u") {
  const SourceSpec src = make_mixture({{0.4, Gaussian{0, 0.7}}, {0.6, CauchySrc{1, 0.5}}});
  for (ParamPoint th : {ParamPoint{Family::Heat, 0.2, 0.5}, ParamPoint{Family::Laplace, 0.9, 0.3}}) {
    const auto l = log_derivs(tight_bundle(src, th));
    auto lnu = [&](double p1, double p2) { return std::log(tight_bundle(src, {th.family, p1, p2}).u()); };
    CHECK(testing::close(l[{1, 0}], testing::richardson([&](double p) { return lnu(p, th.p2); }, th.p1), 1e-7, 1e-9));
    CHECK(testing::close(l[{0, 1}], testing::richardson([&](double p) { return lnu(th.p1, p); }, th.p2, 0.5), 1e-7, 1e-9));
  }
}
