#include "usol/graph_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace usol {

namespace {

struct Sum {
  cplx value = 0.0;
  double l1 = 0.0;
};

// Tensor Gauss-Legendre sum. a0 depends on the first coordinate only and is
// evaluated once per first-axis node.
Sum tensor_sum(const RealVec& lo, const RealVec& hi, const std::vector<int>& N, std::span<const double> x,
               const std::function<double(const double*)>& height, const std::function<cplx(double)>& a0,
               const std::function<cplx(const double*)>& amp) {
  const int n = static_cast<int>(lo.size());
  std::vector<QuadRule> rules(n);
  for (int i = 0; i < n; ++i) rules[i] = composite_gl(lo[i], hi[i], 1, N[i]);
  const double xd = x[n];
  std::size_t inner = 1;
  for (int i = 1; i < n; ++i) inner *= static_cast<std::size_t>(N[i]);

  std::mutex mu;
  Sum total;
  parallel_for(static_cast<std::size_t>(N[0]), [&](std::size_t b, std::size_t e) {
    Sum local;
    RealVec et(n);
    std::vector<int> mi(n, 0);
    for (std::size_t i0 = b; i0 < e; ++i0) {
      et[0] = rules[0].x[i0];
      cplx f0 = a0 ? a0(et[0]) : cplx(1.0);
      if (f0 == 0.0) continue;
      const double w0 = rules[0].w[i0];
      std::fill(mi.begin() + 1, mi.end(), 0);
      for (std::size_t r = 0; r < inner; ++r) {
        double w = w0;
        for (int i = 1; i < n; ++i) {
          et[i] = rules[i].x[mi[i]];
          w *= rules[i].w[mi[i]];
        }
        for (int i = n - 1; i >= 1; --i) {
          if (++mi[i] < N[i]) break;
          mi[i] = 0;
        }
        cplx A = amp(et.data());
        if (A == 0.0) continue;
        A *= f0;
        double ph = xd * height(et.data());
        for (int i = 0; i < n; ++i) ph += x[i] * et[i];
        ph -= std::floor(ph);
        local.value += w * A * cplx(std::cos(kTwoPi * ph), std::sin(kTwoPi * ph));
        local.l1 += w * std::abs(A);
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    total.value += local.value;
    total.l1 += local.l1;
  });
  return total;
}

OscillatoryResult run(const RealVec& lo, const RealVec& hi, std::span<const double> x,
                      const std::function<double(const double*)>& height, const RealVec& grad_bound,
                      const std::function<cplx(double)>& a0, const std::function<cplx(const double*)>& amp,
                      const OscillatoryOptions& opts) {
  const int n = static_cast<int>(lo.size());
  if (x.size() != static_cast<std::size_t>(n + 1)) throw DimensionError("oscillatory integral: x must have length d");
  std::vector<int> N(n);
  for (int i = 0; i < n; ++i) {
    double cycles = (std::abs(x[i]) + std::abs(x[n]) * grad_bound[i]) * (hi[i] - lo[i]);
    int v = static_cast<int>(std::ceil(1.6 * cycles + 24.0));
    v = std::max(opts.min_nodes, v + (v & 1));
    if (v > opts.max_nodes) throw ConvergenceError("oscillatory integral: phase needs more than max_nodes per axis");
    N[i] = v;
  }
  Sum prev = tensor_sum(lo, hi, N, x, height, a0, amp);
  OscillatoryResult res;
  for (int it = 1;; ++it) {
    std::vector<int> M(N);
    for (int& v : M) v *= 2;
    for (int v : M)
      if (v > opts.max_nodes)
        throw ConvergenceError("oscillatory integral: no convergence before " + std::to_string(opts.max_nodes) +
                               " nodes per axis");
    Sum cur = tensor_sum(lo, hi, M, x, height, a0, amp);
    double diff = std::abs(cur.value - prev.value);
    N = M;
    if (diff <= opts.rel_tol * std::abs(cur.value) + opts.abs_floor * std::max(cur.l1, opts.abs_scale)) {
      res.value = cur.value;
      res.nodes = N;
      res.doublings = it;
      res.amplitude_l1 = cur.l1;
      return res;
    }
    prev = cur;
  }
}

}  // namespace

OscillatoryResult graph_oscillatory_integral(const GraphChart& chart, std::span<const double> x,
                                             const std::function<cplx(double)>& a0,
                                             const std::function<double(const double*)>& a,
                                             const OscillatoryOptions& opts) {
  RealVec lo, hi;
  chart.cutoff_box(lo, hi);
  const int n = chart.param_dim();
  const int k = chart.form().k();
  double rp = 0.0, rd = 0.0;
  for (int i = 1; i < n; ++i) (i < k ? rp : rd) = std::max(i < k ? rp : rd, hi[i]);
  RealVec gb(n);
  gb[0] = (rp * rp + rd * rd + std::abs(chart.rho())) / (2.0 * lo[0] * lo[0]);
  for (int i = 1; i < n; ++i) gb[i] = hi[i] / lo[0];
  auto height = [&](const double* et) { return chart.height(et); };
  auto amp = [&](const double* et) { return cplx(a(et)); };
  return run(lo, hi, x, height, gb, a0, amp, opts);
}

OscillatoryResult box_oscillatory_integral(const RealVec& lo, const RealVec& hi, std::span<const double> x,
                                           const std::function<double(const double*)>& height,
                                           const RealVec& grad_bound,
                                           const std::function<cplx(const double*)>& amplitude,
                                           const OscillatoryOptions& opts) {
  if (lo.size() != hi.size() || grad_bound.size() != lo.size())
    throw DimensionError("box_oscillatory_integral: inconsistent box description");
  return run(lo, hi, x, height, grad_bound, nullptr, amplitude, opts);
}

}  // namespace usol
