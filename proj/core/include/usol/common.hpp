#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace usol {

using cplx = std::complex<double>;
using RealVec = std::vector<double>;
using CplxVec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Error taxonomy. The CLI maps ConfigError to exit code 2 and
// ConvergenceError to exit code 3; everything else is exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Gauss-Legendre rule on [-1,1]. Tables are cached per order.
struct QuadRule {
  RealVec x;
  RealVec w;
};
const QuadRule& gauss_legendre(int n);

// Rule mapped to [a,b] split into `panels` equal pieces with `order` nodes each.
QuadRule composite_gl(double a, double b, int panels, int order);
// Panels whose edges are given explicitly (must be increasing).
QuadRule composite_gl_edges(const RealVec& edges, int order);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max absolute residual of the fit
  double r2 = 0.0;
};
LineFit fit_line(const RealVec& x, const RealVec& y);
// Least-squares fit of log(y) against log(x). Requires positive data.
LineFit fit_loglog(const RealVec& x, const RealVec& y);

struct MaxResult {
  RealVec x;
  double value = 0.0;
  int evaluations = 0;
};
// Local maximization by the Nelder-Mead simplex (GSL nmsimplex2).
MaxResult nelder_mead_max(const std::function<double(const RealVec&)>& f, const RealVec& x0, const RealVec& step,
                          int max_iter = 200, double size_tol = 1e-4);

// Worker count from USOL_WORKERS (default: hardware concurrency, at least 1).
int worker_count();
// Splits [0,n) into contiguous chunks run on worker threads. fn(begin, end).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

RealVec geometric_sequence(double start, double ratio, int count);
RealVec log_spaced(double lo, double hi, int count);

void log_warn(const std::string& msg);

}  // namespace usol
