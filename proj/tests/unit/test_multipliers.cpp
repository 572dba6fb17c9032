#include <doctest.h>

#include <cmath>
#include <random>

#include "usol/multipliers.hpp"

using namespace usol;

namespace {
const PsiFunction& pv() {
  static PsiFunction p = build_pv_psi(BumpKit::standard());
  return p;
}
}  // namespace

TEST_CASE("l0 brackets |b| dyadically") {
  CHECK(SpectralParameter{0.0, 1.0}.l0() == 0);
  CHECK(SpectralParameter{0.0, 0.75}.l0() == 0);
  CHECK(SpectralParameter{0.0, 0.5}.l0() == -1);
  CHECK(SpectralParameter{0.0, -3.0}.l0() == 2);
  CHECK_THROWS_AS((SpectralParameter{1.0, 0.0}.l0()), DomainError);
  for (double b : {0.013, 0.3, 1.7, 40.0}) {
    int l = SpectralParameter{0.0, b}.l0();
    CHECK(std::ldexp(1.0, l - 1) < b);
    CHECK(b <= std::ldexp(1.0, l));
  }
}

TEST_CASE("resolvent symbol and its real/imaginary split") {
  QuadraticForm f(3, 1);
  Grid g = Grid::cubic(3, 8, 4.0);
  SpectralParameter z{0.3, -0.8};
  CplxVec s = resolvent_symbol(g, f, z);
  RealVec xi(3);
  RealImagSplit sp = split_real_imag(f, z);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    g.coords(i, true, xi.data());
    double q = eval_Q(f, xi);
    cplx ref = 1.0 / cplx(q + z.a, z.b);
    CHECK(std::abs(s[i] - ref) < 1e-14);
    CHECK(std::abs(sp.recombine(q) - ref) < 1e-14);
  }
}

TEST_CASE("A/B/C decomposition reproduces the real part") {
  QuadraticForm f(3, 1);
  Grid g = Grid::cubic(3, 32, 8.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int i = 0; i < 4; ++i) {
    double th = u(rng);
    SpectralParameter z{std::cos(th), std::sin(th)};
    if (std::abs(z.b) < 0.1) continue;
    auto [eps, sup] = grid_range_of_symbol(g, f, z.a);
    AbcDecomposition abc = decompose_abc(f, z, pv(), default_window(eps, sup, pv()));
    for (double t : {-30.0, -1.0, -0.01, 0.004, 0.5, 2.0, 17.0}) CHECK(std::abs(abc.residual(t)) < 1e-9);
  }
}

TEST_CASE("principal value symbol approximates 1/(Q+a) off the singular set") {
  QuadraticForm f(3, 1);
  Grid g = Grid::cubic(3, 16, 4.0);
  const double a = 0.5;
  auto [eps, sup] = grid_range_of_symbol(g, f, a);
  CplxVec s = pv_symbol(g, f, a, pv(), default_window(eps, sup, pv()));
  RealVec xi(3);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.coords(i, true, xi.data());
    double t = eval_Q(f, xi) + a;
    if (std::abs(t) > 1e-3) err = std::max(err, std::abs(s[i] - 1.0 / t) * std::abs(t));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("localized kernel vanishes outside its slab") {
  QuadraticForm f(3, 1);
  for (MChoice mc : {MChoice::ConstantOne, MChoice::TwoEta1}) {
    LocalizedMultiplier lm{0.125, mc, pv(), GraphChart(f, 1.0)};
    auto [lo, hi] = lm.kernel_slab();
    CHECK(lo < hi);
    for (double xd : {0.5 * lo, -0.5 * lo, 1.5 * hi, -2.0 * hi}) {
      RealVec x{0.3, -0.2, xd};
      CHECK(kernel_K(lm, x) == cplx(0.0));
    }
    RealVec x{-0.5 * (lo + hi) * 0.5, 0.0, 0.5 * (lo + hi)};
    CHECK(std::abs(kernel_K(lm, x)) > 0.0);
  }
}

TEST_CASE("localized symbol matches chi psi(lambda^-1 (eta_d - G))") {
  QuadraticForm f(3, 1);
  LocalizedMultiplier lm{0.25, MChoice::ConstantOne, pv(), GraphChart(f, 1.0)};
  RealVec et{1.5, 0.1};
  const double G = lm.chart.height(et.data());
  for (double off : {0.01, 0.25, -0.4}) {
    RealVec xi = rotate_from_graph(f, RealVec{et[0], et[1], G + off});
    cplx ref = lm.chart.tilde_chi(et.data()) * pv()(off / 0.25);
    CHECK(std::abs(lm.symbol(xi) - ref) < 1e-12);
  }
  RealVec outside = rotate_from_graph(f, RealVec{2.5, 0.0, 0.3});
  CHECK(lm.symbol(outside) == cplx(0.0));
}

TEST_CASE("principal value apply agrees with the real part at small b") {
  QuadraticForm f(3, 1);
  Grid g = Grid::cubic(3, 16, 8.0);
  SampledField u = SampledField::sample(g, Space::Physical, [](const double* x) {
    return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])));
  });
  // a chosen so that no lattice point has Q + a = 0.
  const double a = 0.7071;
  auto [eps, sup] = grid_range_of_symbol(g, f, a);
  SampledField P = pv_apply(u, f, a, pv(), default_window(eps, sup, pv()));
  double prev = INFINITY;
  for (double b : {4e-3, 2e-3, 1e-3}) {
    SampledField R = apply_multiplier(u, [&](const double* xi) {
      double t = eval_Q(f, std::span<const double>(xi, 3)) + a;
      return cplx(t / (t * t + b * b));
    });
    double d = 0.0, n = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      d += std::norm(P[i] - R[i]);
      n += std::norm(R[i]);
    }
    double rel = std::sqrt(d / n);
    CHECK(rel < prev * 0.6);
    prev = rel;
  }
  CHECK(prev < 0.01);
}
