#pragma once

#include <cmath>

namespace usol::bump {

// exp(-1/t) for t > 0, else 0.
inline double flat_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Smooth step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = flat_exp(t), b = flat_exp(1.0 - t);
  return a / (a + b);
}

// Standard bump on (-1,1) with peak value 1 at the origin.
inline double bump(double t) {
  double s = 1.0 - t * t;
  return s > 0.0 ? std::exp(1.0 - 1.0 / s) : 0.0;
}

// Bump supported in (lo, hi) with value 1 at the midpoint.
inline double interval_bump(double t, double lo, double hi) {
  double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  return bump((t - mid) / half);
}

// Equal to 1 for |t| <= inner, 0 for |t| >= outer, smooth in between.
inline double plateau(double t, double inner, double outer) {
  double a = std::abs(t);
  if (a <= inner) return 1.0;
  if (a >= outer) return 0.0;
  return 1.0 - smooth_step((a - inner) / (outer - inner));
}

}  // namespace usol::bump
