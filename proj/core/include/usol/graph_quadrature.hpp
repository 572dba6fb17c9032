#pragma once

#include <span>

#include "usol/common.hpp"
#include "usol/quadform.hpp"

namespace usol {

struct OscillatoryOptions {
  int min_nodes = 64;        // per axis
  int max_nodes = 16384;     // per axis; exceeding it raises ConvergenceError
  double rel_tol = 1e-6;     // doubling stops when |I_2N - I_N| <= rel_tol |I_2N| + abs_floor * int|A|
  double abs_floor = 1e-13;
  double abs_scale = 0.0;    // lower bound for the scale multiplying abs_floor (0: int|A| alone)
};

struct OscillatoryResult {
  cplx value;
  std::vector<int> nodes;  // final per-axis node counts
  int doublings = 0;
  double amplitude_l1 = 0.0;  // int |A|, used as the absolute scale
};

// int_box a0(eta_1) * a(eta_tilde) * exp(2 pi i (x_tilde . eta_tilde + x_d G_rho(eta_tilde))) d eta_tilde
// over the cutoff box of the chart, by tensor Gauss-Legendre with per-axis node
// counts sized from the phase variation, doubled until stable.
// x has length d (x_tilde then x_d). a0 may be null (treated as 1).
OscillatoryResult graph_oscillatory_integral(const GraphChart& chart, std::span<const double> x,
                                             const std::function<cplx(double)>& a0,
                                             const std::function<double(const double*)>& a,
                                             const OscillatoryOptions& opts = {});

// Same engine over an explicit box with an arbitrary smooth real phase height h(eta_tilde)
// (used for charts other than the null-frame graph). grad_bound[i] bounds |d_i h| on the box.
OscillatoryResult box_oscillatory_integral(const RealVec& lo, const RealVec& hi, std::span<const double> x,
                                           const std::function<double(const double*)>& height,
                                           const RealVec& grad_bound,
                                           const std::function<cplx(const double*)>& amplitude,
                                           const OscillatoryOptions& opts = {});

}  // namespace usol
