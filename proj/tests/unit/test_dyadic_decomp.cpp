#include <doctest.h>

#include <cmath>

#include "usol/dyadic_decomp.hpp"

using namespace usol;

namespace {
const PsiFunction& delta() {
  static PsiFunction p = build_delta_psi(BumpKit::standard());
  return p;
}
const PsiFunction& pv() {
  static PsiFunction p = build_pv_psi(BumpKit::standard());
  return p;
}
DyadicOptions wide() {
  DyadicOptions o;
  o.j_min = -24;
  o.j_max = 24;
  return o;
}
}  // namespace

TEST_CASE("bump kit: annular phi forms a dyadic partition of unity") {
  const BumpKit& k = BumpKit::standard();
  CHECK(k.phi(0.0) == 0.0);
  CHECK(k.phi(0.5) == 0.0);
  CHECK(k.phi(2.0) == 0.0);
  CHECK(k.phi(1.0) > 0.0);
  for (double t : {0.013, 0.7, 1.0, 1.3, 57.0}) {
    double s = 0.0;
    for (int j = -30; j <= 30; ++j) s += k.phi(std::ldexp(t, j));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  // chi is supported in [1, 2] with total mass 1/2.
  CHECK(k.chi_cdf(1.0) == 0.0);
  CHECK(k.chi_cdf(2.0) == doctest::Approx(0.5));
  CHECK(k.chi_cdf(1.5) > 0.0);
  CHECK(k.chi_cdf(1.5) < 0.5);
}

TEST_CASE("delta resolution reproduces g(0)") {
  for (double c : {0.0, 0.3, -0.7}) {
    auto g = [c](double x) { return std::exp(-kPi * (x - c) * (x - c)); };
    CHECK(std::abs(dyadic_pairing(delta(), g, wide()).value - g(0.0)) < 1e-7);
  }
}

TEST_CASE("principal value resolution") {
  auto g = [](double x) { return x * std::exp(-kPi * x * x); };
  CHECK(dyadic_pairing(pv(), g, wide()).value == doctest::Approx(1.0).epsilon(1e-9));
  auto h = [](double x) { return std::exp(-kPi * (x - 1.0) * (x - 1.0)); };
  // p.v. int e^{-pi (x-1)^2}/x dx, independent quadrature of the odd part on (0, 12).
  double ref = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    double x = (i + 0.5) * 12.0 / N;
    ref += (h(x) - h(-x)) / x * 12.0 / N;
  }
  CHECK(dyadic_pairing(pv(), h, wide()).value == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("psi for the principal value is odd with transform supported in 1/2 <= |t| <= 2") {
  for (double x = 0.01; x < 20.0; x *= 1.3) CHECK(pv()(x) == -pv()(-x));
  for (double t : {0.0, 0.2, 0.49, 2.01, 5.0, -0.3, -3.0}) CHECK(std::abs(pv().hat(t)) < 1e-10);
  CHECK(std::abs(pv().hat(1.0)) > 0.1);
  CHECK(pv().hat(1.0) == -pv().hat(-1.0));
  for (double t : {0.0, 0.49, 2.01, 4.0}) CHECK(std::abs(delta().hat(t)) < 1e-10);
}

TEST_CASE("the dyadic pieces of the p.v. transform sum to -i pi sgn") {
  // sum_j psi^(2^j t) = -i pi sgn(t) away from 0.
  for (double t : {0.013, 0.4, 1.0, 3.7, 250.0}) {
    cplx s = 0.0;
    for (int j = -40; j <= 40; ++j) s += pv().hat(std::ldexp(t, j));
    CHECK(s.real() == doctest::Approx(0.0));
    CHECK(s.imag() == doctest::Approx(-kPi).epsilon(1e-9));
  }
}
