#pragma once

#include <boost/rational.hpp>

#include <string>
#include <vector>

#include "usol/common.hpp"

namespace usol {

using Rational = boost::rational<long long>;

// (1/p, 1/q). Exact rational arithmetic; converted to double only for numerics.
struct ExponentPair {
  Rational ip;
  Rational iq;

  double ip_value() const { return boost::rational_cast<double>(ip); }
  double iq_value() const { return boost::rational_cast<double>(iq); }
  // p and q as doubles (infinity for a zero reciprocal).
  double p() const;
  double q() const;
  std::string to_string() const;

  friend bool operator==(const ExponentPair&, const ExponentPair&) = default;
};

enum class RegionStatus { StrongType, RestrictedWeakType, Fails };
std::string to_string(RegionStatus s);

struct RegionVerdict {
  RegionStatus status = RegionStatus::Fails;
  // Subset of {"scaling-gap", "q-lower", "p-upper", "p-q-order"}.
  std::vector<std::string> violated;
};

// Named points of the exponent diagram: A, B, C, D, E, F, G, O.
ExponentPair vertex(int d, char name);
ExponentPair dual(const ExponentPair& pair);

// Membership in the closed trapezoid BB'C'C minus its four corners.
RegionVerdict classify(int d, const ExponentPair& pair);
// The Sobolev segment: open part of BB' is StrongType, B and B' are restricted weak type.
RegionVerdict sobolev_admissible(int d, const ExponentPair& pair);

struct PredictedSlopes {
  double glambda_slope;
  double knapp_slope;
  double stationary_decay;
  double cone_decay;
};
PredictedSlopes predicted_slopes(int d, const ExponentPair& pair);

// Parses "ip,iq" where each entry is a decimal ("0.75") or a fraction ("3/4").
ExponentPair parse_pair(const std::string& text);
Rational parse_rational(const std::string& text);

}  // namespace usol
