#pragma once

#include <optional>
#include <span>

#include "usol/field.hpp"
#include "usol/graph_quadrature.hpp"
#include "usol/quadform.hpp"

namespace usol {

// Orthogonal map in O(k) x O(d-k); these preserve Q. xi = R xi_local.
class BlockRotation {
 public:
  static BlockRotation identity(int d);
  // Householder reflections taking e_1 to u (negative block, length k) and
  // e_d to v (positive block, length d-k). u and v are normalized internally.
  static BlockRotation aligning(const QuadraticForm& form, const RealVec& u, const RealVec& v);

  int d() const { return d_; }
  void apply(const double* local, double* global) const;
  void apply_transpose(const double* global, double* local) const;

 private:
  int d_ = 0;
  RealVec m_;  // row-major d x d
};

enum class ChartKind { NullFrame, Vertical };
// Bump: the chart weight is the smooth cutoff (tilde_chi for null-frame charts).
// Indicator: weight 1 on the parameter box; the input must vanish near its edge.
enum class ChartWeight { Bump, Indicator };

// A parametrized piece of Sigma_rho = {Q = rho}.
//   NullFrame: u = eta_tilde, eta_d = G_rho(u), density 1/(2 eta_1).
//   Vertical:  u = xi_tilde, xi_d = sign sqrt(rho - Q~(u)), density 1/(2|xi_d|),
//              where Q~ is Q with the xi_d^2 term dropped.
class SurfaceChart {
 public:
  static SurfaceChart null_frame(const GraphChart& chart, ChartWeight weight = ChartWeight::Bump,
                                 BlockRotation rot = BlockRotation{});
  static SurfaceChart vertical(const QuadraticForm& form, double rho, RealVec lo, RealVec hi, int sign,
                               ChartWeight weight = ChartWeight::Indicator, BlockRotation rot = BlockRotation{});

  ChartKind kind() const { return kind_; }
  const QuadraticForm& form() const { return form_; }
  double rho() const { return rho_; }
  int param_dim() const { return form_.d() - 1; }
  const RealVec& box_lo() const { return lo_; }
  const RealVec& box_hi() const { return hi_; }
  const std::optional<GraphChart>& graph() const { return graph_; }

  // Local height h(u): the last local coordinate of the lifted point.
  double height(const double* u) const;
  // Bounds of |d h/d u_i| over the parameter box.
  RealVec gradient_bound() const;
  // u -> point on Sigma_rho and the pulled-back density of delta(Q - rho).
  // Returns false if u is outside the chart.
  bool lift(const double* u, double* xi, double* density) const;
  // Point on Sigma_rho -> u. Returns false when the point lies outside the box.
  bool project(const double* xi, double* u) const;
  // Local weight nu(u) (before normalization by an atlas).
  double weight(const double* u) const;
  // Coordinates y with x.xi = y_tilde.u + y_d h(u) for xi = lift(u).
  void local_dual(const double* x, double* y) const;

 private:
  ChartKind kind_ = ChartKind::NullFrame;
  ChartWeight weight_ = ChartWeight::Bump;
  QuadraticForm form_{3, 1};
  double rho_ = 1.0;
  int sign_ = 1;
  std::optional<GraphChart> graph_;
  BlockRotation rot_;
  RealVec lo_, hi_;
};

// A finite family of charts. With `normalize` the weights nu_c / sum nu form a
// partition of unity on the covered set; otherwise each chart contributes nu_c.
class SurfaceAtlas {
 public:
  SurfaceAtlas(std::vector<SurfaceChart> charts, bool normalize);
  static SurfaceAtlas single(SurfaceChart chart);
  // Null-frame charts rotated through direction sets of the two blocks,
  // covering the band 1/2 <= |xi| <= 2 of Sigma_rho for rho = +-1.
  static SurfaceAtlas band(const QuadraticForm& form, double rho, int angular = 8);

  const std::vector<SurfaceChart>& charts() const { return charts_; }
  bool normalized() const { return normalize_; }
  double rho() const { return charts_.front().rho(); }
  const QuadraticForm& form() const { return charts_.front().form(); }
  // sum_c nu_c at a point of Sigma_rho.
  double coverage(const double* xi) const;
  // Weight of chart c at xi = lift_c(u).
  double weight(std::size_t c, const double* u, const double* xi) const;

 private:
  std::vector<SurfaceChart> charts_;
  bool normalize_;
};

// Nodes on Sigma_{sign} = {Q = sign} in the hyperbolic parametrization
//   sign=+1: (sinh t w_-, cosh t w_+),  sign=-1: (cosh t w_-, sinh t w_+),
// with weights for dsigma = 2 delta(Q - sign) dtheta, t in [0, t_max].
struct HyperbolicRule {
  int d = 0;
  RealVec points;  // flattened, d per node
  RealVec weights;
  std::size_t size() const { return weights.size(); }
};
HyperbolicRule hyperbolic_rule(const QuadraticForm& form, int sign, double t_max, int t_panels, int t_order,
                               int n_angle);

// Unit-sphere rule on S^{m-1}: m=1 gives {+-1}, m=2 equispaced angles,
// higher m by recursion in the polar angle.
HyperbolicRule sphere_rule(int m, int n_angle);

// int F delta(Q - rho) dxi via the hyperbolic rule (rho != 0).
double surface_integral(const std::function<double(const double*)>& F, const QuadraticForm& form, double rho,
                        double t_max = 6.0, int t_panels = 24, int t_order = 12, int n_angle = 48);

struct RestrictOptions {
  int min_nodes = 48;      // per parameter axis
  bool check_leakage = true;
  double leakage_tol = 1e-6;
  double leakage_radius = 3.0;  // the check scans Sigma_rho within this |xi|
};

using FrequencyFn = std::function<cplx(const double*)>;

// Mass of |f^| on Sigma_rho not covered by the atlas, relative to the total.
double atlas_leakage(const SurfaceAtlas& atlas, const FrequencyFn& fhat, double radius);

// E f(x) = sum_c int nu_c f^(xi(u)) e^{2 pi i x.xi(u)} density du on the physical lattice of `grid`.
SampledField restrict_extend_chart(const FrequencyFn& fhat, const SurfaceAtlas& atlas, const Grid& grid,
                                   const RestrictOptions& opts = {});
// Physical-space input: f^ is evaluated off the lattice by band-limited interpolation.
SampledField restrict_extend_chart(const SampledField& f, const SurfaceAtlas& atlas, const Grid& grid,
                                   const RestrictOptions& opts = {});
// Same integral at individual points by the adaptive oscillatory engine.
cplx restrict_extend_at(const FrequencyFn& fhat, const SurfaceAtlas& atlas, std::span<const double> x,
                        const OscillatoryOptions& opts = {});

// F^{-1}( (1/pi) eps/((Q - rho)^2 + eps^2) f^ ) on the lattice of f.
SampledField restrict_extend_mollified(const SampledField& f, const QuadraticForm& form, double rho, double eps);

// Pointwise mollified extension for f^ supported in {xi_tilde in [lo,hi], xi_d in [zd_lo, zd_hi]}
// with 0 < zd_lo. The Lorentzian is integrated in u = Q - rho (xi_d = sqrt(u + rho - Q~)),
// and the smooth inner integral over xi_tilde is interpolated in u at Chebyshev nodes.
struct MollifiedOptions {
  int xi_nodes = 48;   // Gauss-Legendre nodes per xi_tilde axis
  int u_nodes = 96;    // Chebyshev nodes in u
  int u_order = 16;    // Gauss-Legendre nodes per geometric panel around u = 0
};
// The inner integral does not depend on eps, so several eps share one pass.
std::vector<SampledField> restrict_extend_mollified_pointwise(const FrequencyFn& fhat, const QuadraticForm& form,
                                                              double rho, const RealVec& eps_list, const RealVec& lo,
                                                              const RealVec& hi, double zd_lo, double zd_hi,
                                                              const Grid& grid, const MollifiedOptions& opts = {});

struct PolarOptions {
  double radius = 8.0;  // radial cutoff in |xi|
  int r_panels = 8;
  int r_order = 16;
  double t_max = 14.0;
  int t_panels = 28;
  int t_order = 12;
  int n_angle = 48;
  double tail_tol = 1e-8;  // allowed relative size of the outermost radial panel
};
struct PolarResult {
  double value = 0.0;
  double plus = 0.0;   // Sigma_{+1} branch
  double minus = 0.0;  // Sigma_{-1} branch
  double radial_tail = 0.0;
};
// sum_+- int_0^inf int g(r theta) r^{d-1} dsigma_+-(theta) dr.
PolarResult polar_integrate(const std::function<double(const double*)>& g, const QuadraticForm& form,
                            const PolarOptions& opts = {});
// Trapezoid rule on [-W, W]^d with n points per axis (the Cartesian oracle).
double cartesian_integrate(const std::function<double(const double*)>& g, int d, double half_width, int n);

// U_rho(t) g = F^{-1}(tilde_chi e^{2 pi i t G_rho} g^) for a (d-1)-dimensional field
// whose frequency lattice covers the chart.
SampledField evolution_U(const SampledField& g, const GraphChart& chart, double t);
// Per-point quadrature of the same integral; ghat is evaluated on the chart box.
cplx evolution_U_at(const FrequencyFn& ghat, const GraphChart& chart, double t, std::span<const double> x_tilde,
                    const OscillatoryOptions& opts = {});

// I(x) = int e^{2 pi i (x~.eta~ + x_d G_rho)} tilde_chi d eta~.
cplx oscillatory_I(std::span<const double> x, const GraphChart& chart, OscillatoryResult* info = nullptr,
                   const OscillatoryOptions& opts = {});

}  // namespace usol
