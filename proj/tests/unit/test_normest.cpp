#include <doctest.h>

#include <cmath>

#include "usol/normest.hpp"

using namespace usol;

TEST_CASE("identity has norm one") {
  Grid g = Grid::cubic(3, 8, 4.0);
  NormProbe p;
  p.iterations = 5;
  NormEstimate e = opnorm_lower(identity_operator(g), p);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.monotone);
}

TEST_CASE("a Fourier multiplier has L^2 norm sup |m|") {
  Grid g = Grid::cubic(2, 16, 4.0);
  CplxVec m(g.size());
  RealVec c(2);
  double sup = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.coords(i, true, c.data());
    m[i] = std::exp(-(c[0] * c[0] + c[1] * c[1])) * (1.0 + 0.2 * c[1]);
    sup = std::max(sup, std::abs(m[i]));
  }
  NormProbe p;
  p.iterations = 300;
  NormEstimate e = opnorm_lower(multiplier_operator(g, m), p);
  CHECK(e.value <= sup * (1 + 1e-12));
  CHECK(e.value == doctest::Approx(sup).epsilon(1e-6));
}

TEST_CASE("the estimate is a lower bound that never exceeds a Hoelder bound") {
  Grid g = Grid::cubic(3, 8, 4.0);
  auto u = SampledField::sample(g, Space::Physical, [](const double* x) { return cplx(std::exp(-x[0] * x[0])); });
  auto v = SampledField::sample(g, Space::Physical, [](const double* x) { return cplx(x[1] > 0 ? 1.0 : 0.0, 0.5); });
  NormProbe p;
  p.p = 1.5;
  p.q = 4.0;
  NormEstimate e = opnorm_lower(rank_one_operator(u, v), p);
  double bound = lp_norm(v, 4.0) * lp_norm(u, 3.0);
  CHECK(e.value <= bound * (1 + 1e-9));
  CHECK(e.value == doctest::Approx(bound).epsilon(1e-6));
}

TEST_CASE("operators are linear and exponent ranges are enforced") {
  Grid g = Grid::cubic(3, 8, 4.0);
  QuadraticForm f(3, 1);
  CHECK(is_linear(resolvent_operator(g, f, {0.2, 0.9})));
  CHECK(is_linear(pv_operator(g, f, 1.0, build_pv_psi(BumpKit::standard()))));
  LinearOperator bad{g, [](const SampledField& x) {
                       SampledField y = x;
                       for (auto& v : y.values()) v = std::norm(v);
                       return y;
                     },
                     [](const SampledField& x) { return x; }, "square"};
  CHECK_FALSE(is_linear(bad));
  NormProbe p;
  p.p = 3.0;
  CHECK_THROWS(opnorm_lower(identity_operator(g), p));
  CHECK_THROWS(resolvent_operator(g, f, {1.0, 0.0}));
}

TEST_CASE("resolvent bound is covariant under the scaling z -> 4z, L -> L/2") {
  // (Q(D) + z)^{-1} conjugated by dilation x -> 2x is 4 (Q(D) + 4z)^{-1}; with the lattice
  // spacing halved the two discrete problems are identical up to that factor and the
  // L^p -> L^q Jacobian 2^{d(1/p - 1/q)}.
  QuadraticForm f(3, 1);
  ExponentPair F = vertex(3, 'F');
  NormProbe p;
  p.p = F.p();
  p.q = F.q();
  p.iterations = 12;
  SpectralParameter z{0.6, 0.8};
  Grid g1 = Grid::cubic(3, 16, 8.0), g2 = Grid::cubic(3, 16, 4.0);
  double a = opnorm_lower(resolvent_operator(g1, f, z), p).value;
  p.warm_start.reset();
  double b = opnorm_lower(resolvent_operator(g2, f, {4 * z.a, 4 * z.b}), p).value;
  double scale = 4.0 / std::pow(2.0, 3 * (1.0 / p.p - 1.0 / p.q));
  CHECK(b * scale == doctest::Approx(a).epsilon(0.1));
}

TEST_CASE("duality: T from p to q and its adjoint from q' to p' are comparable") {
  QuadraticForm f(3, 1);
  Grid g = Grid::cubic(3, 16, 8.0);
  ExponentPair B = vertex(3, 'B'), Bd = dual(B);
  SpectralParameter z{0.0, 1.0};
  NormProbe p;
  p.iterations = 15;
  p.p = B.p();
  p.q = B.q();
  double a = opnorm_lower(resolvent_operator(g, f, z), p).value;
  p.p = Bd.p();
  p.q = Bd.q();
  double b = opnorm_lower(resolvent_operator(g, f, {z.a, -z.b}), p).value;
  CHECK(a / b < 2.0);
  CHECK(b / a < 2.0);
}

TEST_CASE("principal value route is consistent with small imaginary part") {
  QuadraticForm f(3, 1);
  Grid g = Grid::cubic(3, 16, 8.0);
  ExponentPair B = vertex(3, 'B');
  NormProbe p;
  p.p = B.p();
  p.q = B.q();
  p.iterations = 10;
  // At a = 1 the lattice contains exact zeros of Q + a and the b = 1e-3 symbol spikes to 1/b;
  // a = 0.7071 keeps every lattice point at |Q + a| >= 4e-3.
  double a = opnorm_lower(pv_operator(g, f, 0.7071, build_pv_psi(BumpKit::standard())), p).value;
  double b = opnorm_lower(resolvent_operator(g, f, {0.7071, 1e-3}), p).value;
  CHECK(a / b < 3.0);
  CHECK(b / a < 3.0);
}

TEST_CASE("Lorentz mode on an indicator-friendly operator") {
  Grid g = Grid::cubic(3, 8, 4.0);
  NormProbe p;
  p.mode = NormMode::Lorentz;
  p.p = 1.5;
  p.q = 3.0;
  p.iterations = 5;
  NormEstimate e = opnorm_lower(identity_operator(g), p);
  // ||f||_{3,inf} <= ||f||_{1.5,1} on a set of measure <= 64: equality only for |E| = 1.
  CHECK(e.value > 0.0);
  CHECK(std::isfinite(e.value));
}

TEST_CASE("circle sweep avoids the real axis") {
  auto zs = circle_sweep(16);
  CHECK(zs.size() == 16);
  for (auto z : zs) {
    CHECK(z.modulus() == doctest::Approx(1.0));
    CHECK(std::abs(z.b) >= std::sin(kPi / 16) - 1e-12);
  }
}
