#include <doctest.h>

#include <cmath>

#include "usol/bump.hpp"
#include "usol/surface_ops.hpp"

using namespace usol;

TEST_CASE("sphere rules integrate constants to the sphere area") {
  CHECK(sphere_rule(1, 4).weights.size() == 2);
  double a2 = 0.0, a3 = 0.0;
  for (double w : sphere_rule(2, 32).weights) a2 += w;
  for (double w : sphere_rule(3, 32).weights) a3 += w;
  CHECK(a2 == doctest::Approx(kTwoPi));
  CHECK(a3 == doctest::Approx(2.0 * kTwoPi));
}

TEST_CASE("polar identity for the Gaussian") {
  for (auto [d, k] : {std::pair{3, 1}, std::pair{4, 2}}) {
    QuadraticForm f(d, k);
    PolarResult r = polar_integrate(
        [d](const double* x) {
          double s = 0.0;
          for (int i = 0; i < d; ++i) s += x[i] * x[i];
          return std::exp(-kPi * s);
        },
        f);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.plus + r.minus == doctest::Approx(r.value));
  }
}

TEST_CASE("surface integral against a shell computation") {
  // int e^{-|xi|^2} delta(Q - 1): in d = 3, k = 1 with xi = (s, r w), r^2 = 1 + s^2,
  // the measure is pi ds, so the integral is pi int e^{-(1 + 2 s^2)} ds = pi e^{-1} sqrt(pi/2).
  QuadraticForm f(3, 1);
  double v = surface_integral(
      [](const double* x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); }, f, 1.0);
  CHECK(v == doctest::Approx(kPi * std::exp(-1.0) * std::sqrt(kPi / 2.0)).epsilon(1e-9));
}

TEST_CASE("chart lift and project are inverse and land on the surface") {
  QuadraticForm f(3, 1);
  GraphChart gc(f, 1.0);
  SurfaceChart c = SurfaceChart::null_frame(gc);
  RealVec u{1.4, 0.1}, xi(3), back(2);
  double dens = 0.0;
  REQUIRE(c.lift(u.data(), xi.data(), &dens));
  CHECK(eval_Q(f, xi) == doctest::Approx(1.0));
  CHECK(dens == doctest::Approx(1.0 / (2.0 * 1.4)));
  REQUIRE(c.project(xi.data(), back.data()));
  CHECK(back[0] == doctest::Approx(u[0]));
  CHECK(back[1] == doctest::Approx(u[1]));
}

TEST_CASE("lattice extension agrees with the pointwise engine") {
  QuadraticForm f(3, 1);
  const double s = 1.0 / std::sqrt(2.0);
  const RealVec x0{s * (1.5 - 1.0 / 3.0), 0.0, s * (1.5 + 1.0 / 3.0)};
  FrequencyFn fh = [&](const double* x) -> cplx {
    double q = 0.0;
    for (int c = 0; c < 3; ++c) q += (x[c] - x0[c]) * (x[c] - x0[c]);
    return bump::bump(std::sqrt(q) / 0.3);
  };
  GraphChart gc(f, 1.0, GraphDomain{1.15, 1.85, 1.0, 0.35}, 1.0);
  SurfaceAtlas A = SurfaceAtlas::single(SurfaceChart::null_frame(gc, ChartWeight::Indicator));
  Grid g = Grid::cubic(3, 16, 8.0);
  RestrictOptions o;
  o.min_nodes = 192;
  SampledField E = restrict_extend_chart(fh, A, g, o);
  RealVec x{1.5, -2.0, 3.0};
  std::size_t idx = (11 * 16 + 4) * 16 + 14;
  CHECK(std::abs(restrict_extend_at(fh, A, x) - E[idx]) < 1e-9 * std::abs(E[idx]));
}

TEST_CASE("mollified extension converges at rate eps") {
  QuadraticForm f(3, 1);
  const double s = 1.0 / std::sqrt(2.0);
  const RealVec x0{s * (1.5 - 1.0 / 3.0), 0.0, s * (1.5 + 1.0 / 3.0)};
  FrequencyFn fh = [&](const double* x) -> cplx {
    double q = 0.0;
    for (int c = 0; c < 3; ++c) q += (x[c] - x0[c]) * (x[c] - x0[c]);
    return bump::bump(std::sqrt(q) / 0.3);
  };
  GraphChart gc(f, 1.0, GraphDomain{1.15, 1.85, 1.0, 0.35}, 1.0);
  SurfaceAtlas A = SurfaceAtlas::single(SurfaceChart::null_frame(gc, ChartWeight::Indicator));
  Grid g = Grid::cubic(3, 8, 8.0);
  SampledField E = restrict_extend_chart(fh, A, g);
  auto M = restrict_extend_mollified_pointwise(fh, f, 1.0, {2e-3, 1e-3}, {x0[0] - 0.3, -0.3}, {x0[0] + 0.3, 0.3},
                                               x0[2] - 0.3, x0[2] + 0.3, g);
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t j = 0; j < E.size(); ++j) {
    d0 += std::norm(E[j] - M[0][j]);
    d1 += std::norm(E[j] - M[1][j]);
  }
  CHECK(std::sqrt(d1 / d0) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("oscillatory integral is bounded by the cutoff mass") {
  GraphChart ch(QuadraticForm(3, 1), 1.0);
  RealVec x0{0.0, 0.0, 0.0};
  double mass = std::abs(oscillatory_I(x0, ch));
  RealVec x{-50.0, 0.0, 60.0};
  CHECK(std::abs(oscillatory_I(x, ch)) < mass);
}
