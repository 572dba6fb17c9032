#include "usol/exponent_region.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

namespace usol {

namespace {

Rational R(long long n, long long d) { return Rational(n, d); }

void check_dim(int d) {
  if (d < 3) throw DimensionError("exponent_region: d must be at least 3");
}

// Sign of the cross product (b - a) x (p - a).
int orient(const ExponentPair& a, const ExponentPair& b, const ExponentPair& p) {
  Rational c = (b.ip - a.ip) * (p.iq - a.iq) - (b.iq - a.iq) * (p.ip - a.ip);
  return c > 0 ? 1 : (c < 0 ? -1 : 0);
}

// True when p lies strictly on the far side of edge (a,b) relative to `inside`.
bool outside_edge(const ExponentPair& a, const ExponentPair& b, const ExponentPair& inside,
                  const ExponentPair& p) {
  int ref = orient(a, b, inside);
  int s = orient(a, b, p);
  return s != 0 && s != ref;
}

}  // namespace

double ExponentPair::p() const {
  return ip.numerator() == 0 ? std::numeric_limits<double>::infinity() : 1.0 / ip_value();
}
double ExponentPair::q() const {
  return iq.numerator() == 0 ? std::numeric_limits<double>::infinity() : 1.0 / iq_value();
}

std::string ExponentPair::to_string() const {
  std::ostringstream os;
  os << ip.numerator() << "/" << ip.denominator() << "," << iq.numerator() << "/" << iq.denominator();
  return os.str();
}

std::string to_string(RegionStatus s) {
  switch (s) {
    case RegionStatus::StrongType:
      return "StrongType";
    case RegionStatus::RestrictedWeakType:
      return "RestrictedWeakType";
    case RegionStatus::Fails:
      return "Fails";
  }
  return "?";
}

ExponentPair vertex(int d, char name) {
  check_dim(d);
  const long long D = d;
  switch (name) {
    case 'A':
      return {R(D + 1, 2 * D), R(D - 3, 2 * D)};
    case 'B':
      return {R(D, 2 * (D - 1)), R((D - 2) * (D - 2), 2 * D * (D - 1))};
    case 'C':
      return {R(D + 1, 2 * D), R((D - 1) * (D - 1), 2 * D * (D + 1))};
    case 'D':
      return {R(D + 1, 2 * D), R(0, 1)};
    case 'E':
      return {R(1, 1), R(0, 1)};
    case 'F':
      return {R(D + 2, 2 * D), R(D - 2, 2 * D)};
    case 'G':
      return {R(0, 1), R(1, 1)};
    case 'O':
      return {R(0, 1), R(0, 1)};
    default:
      throw DomainError(std::string("vertex: unknown point name '") + name + "'");
  }
}

ExponentPair dual(const ExponentPair& pair) { return {Rational(1) - pair.iq, Rational(1) - pair.ip}; }

RegionVerdict classify(int d, const ExponentPair& p) {
  check_dim(d);
  const ExponentPair B = vertex(d, 'B'), C = vertex(d, 'C');
  const ExponentPair Bd = dual(B), Cd = dual(C);
  const ExponentPair centre{(B.ip + C.ip + Bd.ip + Cd.ip) / 4, (B.iq + C.iq + Bd.iq + Cd.iq) / 4};

  RegionVerdict v;
  if (!(p.iq >= Rational(0) && p.iq <= p.ip && p.ip <= Rational(1))) v.violated.push_back("p-q-order");
  Rational gap = p.ip - p.iq;
  if (gap > R(2, d) || gap < R(2, d + 1)) v.violated.push_back("scaling-gap");
  // Beyond edge BC the exponent p is too large; beyond B'C' q is too small.
  if (outside_edge(B, C, centre, p)) v.violated.push_back("p-upper");
  if (outside_edge(Bd, Cd, centre, p)) v.violated.push_back("q-lower");

  if (!v.violated.empty()) {
    v.status = RegionStatus::Fails;
  } else if (p == B || p == C || p == Bd || p == Cd) {
    v.status = RegionStatus::RestrictedWeakType;
  } else {
    v.status = RegionStatus::StrongType;
  }
  return v;
}

RegionVerdict sobolev_admissible(int d, const ExponentPair& p) {
  check_dim(d);
  const ExponentPair B = vertex(d, 'B'), Bd = dual(B);
  RegionVerdict v;
  if (!(p.iq >= Rational(0) && p.iq <= p.ip && p.ip <= Rational(1))) v.violated.push_back("p-q-order");
  if (p.ip - p.iq != R(2, d)) v.violated.push_back("scaling-gap");
  // On the scaling line: p < 2(d-1)/d  <=>  ip > B.ip, and q > 2(d-1)/(d-2)  <=>  iq < B'.iq.
  if (p.ip < B.ip) v.violated.push_back("p-upper");
  if (p.iq > Bd.iq) v.violated.push_back("q-lower");
  if (!v.violated.empty()) {
    v.status = RegionStatus::Fails;
  } else if (p == B || p == Bd) {
    v.status = RegionStatus::RestrictedWeakType;
  } else {
    v.status = RegionStatus::StrongType;
  }
  return v;
}

PredictedSlopes predicted_slopes(int d, const ExponentPair& pair) {
  check_dim(d);
  double ip = pair.ip_value(), iq = pair.iq_value();
  return {2.0 - d * ip + d * iq, (d + 1) * (ip - iq) - 2.0, 0.5 * (d - 1), 0.5 * (d - 2)};
}

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw ConfigError("empty exponent value");
  auto digits_only = [](const std::string& t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    s.erase(0, 1);
  }
  Rational r;
  auto slash = s.find('/');
  auto dot = s.find('.');
  try {
    if (slash != std::string::npos) {
      std::string a = s.substr(0, slash), b = s.substr(slash + 1);
      if (!digits_only(a) || !digits_only(b)) throw ConfigError("malformed fraction '" + raw + "'");
      long long den = std::stoll(b);
      if (den == 0) throw ConfigError("zero denominator in '" + raw + "'");
      r = Rational(std::stoll(a), den);
    } else if (dot != std::string::npos) {
      std::string a = s.substr(0, dot), b = s.substr(dot + 1);
      if (a.empty()) a = "0";
      if (!digits_only(a) || (!b.empty() && !digits_only(b)) || b.size() > 15)
        throw ConfigError("malformed decimal '" + raw + "'");
      long long scale = 1;
      for (std::size_t i = 0; i < b.size(); ++i) scale *= 10;
      r = Rational(std::stoll(a)) + (b.empty() ? Rational(0) : Rational(std::stoll(b), scale));
    } else {
      if (!digits_only(s)) throw ConfigError("malformed number '" + raw + "'");
      r = Rational(std::stoll(s));
    }
  } catch (const std::out_of_range&) {
    throw ConfigError("exponent value out of range '" + raw + "'");
  }
  return neg ? -r : r;
}

ExponentPair parse_pair(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("pair must be given as ip,iq");
  ExponentPair p{parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1))};
  if (p.ip < Rational(0) || p.ip > Rational(1) || p.iq < Rational(0) || p.iq > Rational(1)) throw ConfigError("pair entries must lie in [0,1]");
  return p;
}

}  // namespace usol
