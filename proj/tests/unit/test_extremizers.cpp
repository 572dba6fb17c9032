#include <doctest.h>

#include <cmath>

#include "usol/extremizers.hpp"

using namespace usol;

TEST_CASE("profile is supported in |t| <= 1/4") {
  CHECK(profile(0.0) == doctest::Approx(1.0));
  CHECK(profile(0.26) == 0.0);
  CHECK(profile(-0.3) == 0.0);
  CHECK(profile(0.2) > 0.0);
}

TEST_CASE("profile dual L^2 norm equals the L^2 norm of the profile") {
  double s = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    double t = -0.25 + (i + 0.5) * 0.5 / N;
    s += profile(t) * profile(t) * 0.5 / N;
  }
  CHECK(profile_dual_norm(2.0) == doctest::Approx(std::sqrt(s)).epsilon(1e-8));
  // ||phi-check||_inf = int phi.
  double m = 0.0;
  for (int i = 0; i < N; ++i) m += profile(-0.25 + (i + 0.5) * 0.5 / N) * 0.5 / N;
  CHECK(profile_dual_norm(INFINITY) == doctest::Approx(m).epsilon(1e-8));
}

TEST_CASE("box norms from samples") {
  CHECK(box_norm_from_samples({2.0, 2.0, 2.0}, 8.0, 3.0) == doctest::Approx(2.0 * 2.0));
  CHECK(box_norm_from_samples({1.0, 3.0}, 1.0, INFINITY) == doctest::Approx(3.0));
  Box b{{0.0, -1.0}, {2.0, 1.0}};
  CHECK(b.volume() == doctest::Approx(4.0));
  CHECK(b.midpoints(3).size() == 18);
}

TEST_CASE("analytic L^p norms of the families match the sampled fields") {
  // p = 2 is exact up to quadrature; for p < 2 the slowly decaying tails of phi-check
  // outside the lattice box cost a few parts in a thousand.
  for (auto [p, tol] : {std::pair{2.0, 1e-5}, std::pair{1.5, 1e-2}}) {
    GLambdaFamily g = make_glambda(3, 1, 0.25);
    CHECK(lp_norm(inv_fourier(g.field()), p) == doctest::Approx(g.norm_p(p)).epsilon(tol));
    KnappFamily k = make_knapp(3, 1, 0.25);
    CHECK(lp_norm(inv_fourier(k.field()), p) == doctest::Approx(k.norm_p(p)).epsilon(tol));
  }
}

TEST_CASE("Knapp extension is bounded below by c lambda^2 on the dual box, uniformly in lambda") {
  RealVec mins;
  for (double lam : {0.125, 0.0625}) {
    KnappFamily f = make_knapp(3, 1, lam);
    SurfaceAtlas at = f.atlas();
    RealVec pts = f.dual_box.midpoints(3);
    double mn = INFINITY;
    for (std::size_t i = 0; i < pts.size() / 3; ++i)
      mn = std::min(mn, std::abs(restrict_extend_at([&](const double* xi) { return f.fhat(xi); }, at,
                                                    std::span<const double>(&pts[3 * i], 3))));
    mins.push_back(mn / (lam * lam));
  }
  CHECK(mins[0] > 0.04);
  CHECK(mins[1] == doctest::Approx(mins[0]).epsilon(1e-3));
}

TEST_CASE("shell masses integrate power laws exactly") {
  RealVec edges{1.0, 2.0, 4.0};
  auto sh = shell_masses([](double x) { return RealVec{x * x}; }, edges, 1);
  CHECK(sh[0][0] == doctest::Approx(7.0 / 3.0));
  CHECK(sh[1][0] == doctest::Approx(56.0 / 3.0));
}

TEST_CASE("cone kernel: reduction matches direct quadrature") {
  ConeFamily c = make_cone_K(3, 1, 8.0);
  CHECK(c.aperture() == doctest::Approx(1e-3 / (c.lambda * c.lambda)));
  RealVec x{0.1 - 0.25 / 40.0, 0.5, 20.0};
  cplx a = c.K(x), b = c.K_direct(x);
  CHECK(std::abs(a - b) < 1e-6 * std::abs(b));
  RealVec far{0.0, 0.0, 1e5};
  CHECK(c.in_U(far));
}

TEST_CASE("T lambda probe quotient is positive and grows with lambda") {
  GraphChart ch(QuadraticForm(3, 1), 1.0);
  TtStarProbe p(ch, build_delta_psi(BumpKit::standard()), 6.0);
  TtStarResult a = p.evaluate(0.125), b = p.evaluate(0.0625);
  CHECK(a.ratio > b.ratio);
  CHECK(b.ratio > 0.0);
  CHECK(a.ratio == doctest::Approx(a.norm_q / a.norm_2));
}
