#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "usol/field.hpp"

using namespace usol;

namespace {
SampledField gaussian(const Grid& g) {
  return SampledField::sample(g, Space::Physical, [&](const double* x) {
    double s = 0.0;
    for (int i = 0; i < g.d; ++i) s += x[i] * x[i];
    return cplx(std::exp(-kPi * s));
  });
}
}  // namespace

TEST_CASE("the Gaussian is its own Fourier transform") {
  // Aliasing error is e^{-pi (1/h - xi_max)^2}, negligible for h = 1/8.
  Grid g = Grid::cubic(3, 64, 8.0);
  SampledField F = fourier(gaussian(g));
  RealVec xi(3);
  double err = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    g.coords(i, true, xi.data());
    err = std::max(err, std::abs(F[i] - std::exp(-kPi * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]))));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("inverse transform and Plancherel") {
  Grid g({8, 16, 4}, {3.0, 5.0, 2.0});
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  CplxVec v(g.size());
  for (auto& c : v) c = {n(rng), n(rng)};
  SampledField f(g, Space::Physical, v);
  SampledField back = inv_fourier(fourier(f));
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
  CHECK(err < 1e-12);
  CHECK(lp_norm(fourier(f), 2.0) == doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-12));
}

TEST_CASE("norms of an indicator") {
  Grid g = Grid::cubic(3, 16, 4.0);
  SampledField f = SampledField::sample(g, Space::Physical,
                                        [](const double* x) { return cplx(std::abs(x[0]) < 0.6 ? 1.0 : 0.0); });
  double count = 0.0;
  for (const auto& v : f.values()) count += std::abs(v);
  const double mu = count * g.cell_volume();
  for (double p : {1.5, 2.0, 6.0}) {
    CHECK(lp_norm(f, p) == doctest::Approx(std::pow(mu, 1.0 / p)));
    CHECK(lorentz_p1(f, p) == doctest::Approx(std::pow(mu, 1.0 / p)));
    CHECK(lorentz_qinf(f, p) == doctest::Approx(std::pow(mu, 1.0 / p)));
  }
  CHECK(lp_norm(f, INFINITY) == 1.0);
}

TEST_CASE("weak norm never exceeds the strong one and the (p,1) norm dominates") {
  Grid g = Grid::cubic(2, 32, 6.0);
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e(1.0);
  CplxVec v(g.size());
  for (auto& c : v) c = e(rng);
  SampledField f(g, Space::Physical, v);
  for (double p : {1.2, 2.0, 4.0}) {
    CHECK(lorentz_qinf(f, p) <= lp_norm(f, p) * (1 + 1e-12));
    CHECK(lp_norm(f, p) <= lorentz_p1(f, p) * (1 + 1e-12));
  }
  RealVec r = decreasing_rearrangement(f);
  CHECK(std::is_sorted(r.rbegin(), r.rend()));
}

TEST_CASE("multiplier application and band-limited interpolation") {
  Grid g = Grid::cubic(2, 16, 4.0);
  SampledField f = gaussian(g);
  SampledField same = apply_multiplier(f, [](const double*) { return cplx(1.0); });
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(same[i] - f[i]) < 1e-13);
  SampledField F = fourier(f);
  RealVec xi(2);
  for (std::size_t i : {std::size_t(0), std::size_t(37), std::size_t(200)}) {
    g.coords(i, true, xi.data());
    CHECK(std::abs(band_limited_interpolant(f, xi.data()) - F[i]) < 1e-12);
  }
}

TEST_CASE("binary round trip") {
  Grid g = Grid::cubic(3, 4, 2.0);
  SampledField f = gaussian(g);
  f[3] = {0.25, -7.0};
  std::stringstream ss;
  save_field(f, ss);
  SampledField h = load_field(ss);
  CHECK(h.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(h[i] == f[i]);
  std::stringstream bad("XXXX");
  CHECK_THROWS(load_field(bad));
}
