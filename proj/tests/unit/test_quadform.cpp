#include <doctest.h>

#include <random>

#include "usol/quadform.hpp"

using namespace usol;

TEST_CASE("Q evaluates the signature form") {
  QuadraticForm f(3, 1);
  RealVec xi{1.0, 2.0, 3.0};
  CHECK(eval_Q(f, xi) == doctest::Approx(-1.0 + 4.0 + 9.0));
  QuadraticForm g(4, 2);
  RealVec z{1.0, 1.0, 2.0, 0.5};
  CHECK(eval_Q(g, z) == doctest::Approx(-2.0 + 4.25));
  CHECK(f.dim_prime() == 0);
  CHECK(f.dim_dprime() == 1);
  CHECK_THROWS(QuadraticForm(2, 1));
}

TEST_CASE("graph rotation is an isometry that carries Q to 2 eta_1 eta_d - ...") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (auto [d, k] : {std::pair{3, 1}, std::pair{4, 1}, std::pair{4, 2}, std::pair{5, 3}}) {
    QuadraticForm f(d, k);
    for (int t = 0; t < 20; ++t) {
      RealVec xi(d);
      for (auto& v : xi) v = n(rng);
      RealVec eta = rotate_to_graph(f, xi);
      RealVec back = rotate_from_graph(f, eta);
      double n1 = 0, n2 = 0;
      for (int i = 0; i < d; ++i) {
        CHECK(back[i] == doctest::Approx(xi[i]).epsilon(1e-12));
        n1 += xi[i] * xi[i];
        n2 += eta[i] * eta[i];
      }
      CHECK(n1 == doctest::Approx(n2));
      CHECK(graph_form(f, eta) == doctest::Approx(eval_Q(f, xi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("graph height solves the form and its gradient matches differences") {
  for (double rho : {1.0, -1.0, 1e-4}) {
    QuadraticForm f(4, 2);
    GraphChart ch(f, rho);
    RealVec et{1.4, 0.2, -0.3};
    double G = ch.height(et.data());
    RealVec eta{et[0], et[1], et[2], G};
    CHECK(graph_form(f, eta) == doctest::Approx(rho).epsilon(1e-12));
    RealVec g(3);
    ch.gradient(et.data(), g.data());
    for (int i = 0; i < 3; ++i) {
      RealVec a = et, b = et;
      a[i] += 1e-6;
      b[i] -= 1e-6;
      CHECK(g[i] == doctest::Approx((ch.height(a.data()) - ch.height(b.data())) / 2e-6).epsilon(1e-6));
    }
  }
}

TEST_CASE("chart cutoff is supported inside the domain") {
  GraphChart ch(QuadraticForm(3, 1), 1.0);
  RealVec in{1.5, 0.0}, out{2.5, 0.0}, edge{1.0, 0.0};
  CHECK(ch.tilde_chi(in.data()) > 0.0);
  CHECK(ch.tilde_chi(out.data()) == 0.0);
  CHECK(ch.tilde_chi(edge.data()) == 0.0);
  CHECK(ch.contains(in));
  CHECK_FALSE(ch.contains(out));
}
