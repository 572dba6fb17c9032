#include <doctest.h>

#include "usol/exponent_region.hpp"

using namespace usol;

namespace {
ExponentPair P(long long a, long long b, long long c, long long d) { return {Rational(a, b), Rational(c, d)}; }
}  // namespace

TEST_CASE("named points in d = 3 and d = 4") {
  CHECK(vertex(3, 'B') == P(3, 4, 1, 12));
  CHECK(vertex(3, 'C') == P(2, 3, 1, 6));
  CHECK(vertex(3, 'F') == P(5, 6, 1, 6));
  CHECK(vertex(4, 'B') == P(2, 3, 1, 6));
  CHECK(vertex(4, 'C') == P(5, 8, 9, 40));
  CHECK(vertex(4, 'F') == P(3, 4, 1, 4));
  CHECK(dual(vertex(3, 'B')) == P(11, 12, 1, 4));
  CHECK_THROWS_AS(vertex(3, 'Z'), DomainError);
}

TEST_CASE("B, B' and F lie on the line 1/p - 1/q = 2/d") {
  for (int d = 3; d <= 9; ++d)
    for (auto p : {vertex(d, 'B'), dual(vertex(d, 'B')), vertex(d, 'F')})
      CHECK(p.ip - p.iq == Rational(2, d));
}

TEST_CASE("classification of the corners") {
  for (int d = 3; d <= 8; ++d) {
    CHECK(classify(d, vertex(d, 'B')).status == RegionStatus::RestrictedWeakType);
    CHECK(classify(d, dual(vertex(d, 'C'))).status == RegionStatus::RestrictedWeakType);
    CHECK(classify(d, vertex(d, 'F')).status == RegionStatus::StrongType);
    CHECK(classify(d, vertex(d, 'E')).status == RegionStatus::Fails);
    CHECK(classify(d, vertex(d, 'O')).status == RegionStatus::Fails);
    CHECK(classify(d, vertex(d, 'A')).status == RegionStatus::Fails);
    CHECK_FALSE(classify(d, vertex(d, 'A')).violated.empty());
  }
}

TEST_CASE("classification is invariant under duality") {
  for (int d = 3; d <= 6; ++d)
    for (int a = 0; a <= 24; ++a)
      for (int b = 0; b <= 24; ++b) {
        ExponentPair p{Rational(a, 24), Rational(b, 24)};
        CHECK(classify(d, p).status == classify(d, dual(p)).status);
      }
}

TEST_CASE("strong type points are interior to the closed trapezoid") {
  // Points strictly between F and the midpoint of CC' are strong type.
  const int d = 3;
  ExponentPair F = vertex(d, 'F');
  ExponentPair mid{(vertex(d, 'C').ip + dual(vertex(d, 'C')).ip) / 2, (vertex(d, 'C').iq + dual(vertex(d, 'C')).iq) / 2};
  for (int t = 0; t <= 10; ++t) {
    Rational s(t, 10);
    ExponentPair p{F.ip + s * (mid.ip - F.ip), F.iq + s * (mid.iq - F.iq)};
    CHECK(classify(d, p).status == RegionStatus::StrongType);
  }
}

TEST_CASE("exponents of endpoint pairs do not recurse") {
  // Regression: comparing boost::rational with an int literal under C++20 recursed.
  ExponentPair e = vertex(3, 'E');
  CHECK(e.p() == doctest::Approx(1.0));
  CHECK(std::isinf(e.q()));
  ExponentPair g = vertex(3, 'G');
  CHECK(std::isinf(g.p()));
  CHECK(g.q() == doctest::Approx(1.0));
}

TEST_CASE("predicted slopes") {
  auto s = predicted_slopes(3, vertex(3, 'F'));
  CHECK(s.glambda_slope == doctest::Approx(0.0));
  CHECK(s.knapp_slope == doctest::Approx(2.0 / 3.0));
  CHECK(s.stationary_decay == doctest::Approx(1.0));
  CHECK(s.cone_decay == doctest::Approx(0.5));
  auto t = predicted_slopes(3, P(1, 1, 1, 4));
  CHECK(t.glambda_slope == doctest::Approx(-0.25));
  CHECK(predicted_slopes(3, P(1, 2, 1, 2)).knapp_slope == doctest::Approx(-2.0));
}

TEST_CASE("pair parsing") {
  CHECK(parse_pair("5/6,1/6") == vertex(3, 'F'));
  CHECK(parse_pair(vertex(4, 'C').to_string()) == vertex(4, 'C'));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK_THROWS(parse_pair("1/2"));
  CHECK_THROWS(parse_pair("3/2,1/2"));
}
