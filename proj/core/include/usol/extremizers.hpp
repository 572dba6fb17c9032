#pragma once

#include "usol/exponent_region.hpp"
#include "usol/multipliers.hpp"
#include "usol/surface_ops.hpp"

namespace usol {

enum class FamilyKind { GLambda, Knapp, Stationary, Cone };
std::string to_string(FamilyKind k);

struct Box {
  RealVec lo;
  RealVec hi;
  double volume() const;
  // Tensor grid of midpoints, `per_axis` per coordinate (flattened, d per point).
  RealVec midpoints(int per_axis) const;
};

// The one-dimensional profile phi(t) = bump(4t), supported in |t| <= 1/4.
double profile(double t);
// ||phi-check||_p from a one-dimensional FFT (cached per p); p may be infinite.
double profile_dual_norm(double p);

// L^q(box) norm from midpoint samples of |F|: (|box| mean |F|^q)^{1/q}.
double box_norm_from_samples(const RealVec& abs_values, double box_volume, double q);

// g_lambda^(eta) = phi(lambda^2(eta_1 - lambda^-2)) phi(eta_d) prod phi(lambda eta_j), in graph coordinates.
struct GLambdaFamily {
  int d = 3;
  int k = 1;
  double lambda = 0.25;
  Box R;        // frequency rectangle R_lambda (graph coordinates)
  Box R_dual;   // R'_lambda

  double ghat_eta(const double* eta) const;
  cplx ghat_xi(const double* xi) const;  // Cartesian frequency
  // lambda^{-d+d/p} ||phi-check||_p^d.
  double norm_p(double p) const;
  // Frequency samples on the per-axis grid chosen by the constructor (graph coordinates).
  SampledField field() const;
  Grid grid() const;
  // Single null-frame chart on R_lambda at rho = +1.
  SurfaceAtlas atlas() const;
};
GLambdaFamily make_glambda(int d, int k, double lambda);

// f_lambda^(xi) = phi(lambda^-2(xi_d - 1)) prod_{j<d} phi(lambda^-1 xi_j), a cap at (0,...,0,1) of Sigma_1.
struct KnappFamily {
  int d = 3;
  int k = 1;
  double lambda = 0.25;
  double c = 0.01;  // dual box constant
  Box dual_box;

  cplx fhat(const double* xi) const;
  // lambda^{(d+1)(1-1/p)} ||phi-check||_p^d.
  double norm_p(double p) const;
  SampledField field() const;
  Grid grid() const;
  SurfaceAtlas atlas() const;  // vertical chart over the cap
};
KnappFamily make_knapp(int d, int k, double lambda, double c = 0.01);

// Plateau bump near (0,...,0,1): f^ = plateau(|xi~|; inner, outer) on Sigma_1.
struct StationaryFamily {
  int d = 3;
  int k = 1;
  double inner = 0.3;
  double outer = 0.5;

  cplx fhat(const double* xi) const;
  SurfaceAtlas atlas() const;
  // |Ef(0, x_d)| by the oscillatory engine.
  double axis_value(double xd) const;
  // int |Ef(x~, x_d)|^q dx~ from a (d-1)-dimensional FFT slice, for each q.
  RealVec slice_mass(double xd, const RealVec& qs) const;
};
StationaryFamily make_stationary(int d, int k);

// K(x) = int e^{2 pi i (x~.eta~ + x_d (|eta'|^2 - |eta''|^2)/(2 eta_1))} phi_1 phi_2 phi_3 d eta~
// with phi_1(t) = t^{-(d-2)/2} phi(t-1). phi^ = 1.5 (b^(t)/b^(0))^2 for a narrow bump b,
// and phi_2^, phi_3^ are products of one-dimensional self-convolutions of bumps,
// nonnegative and supported in balls of radius M/2.
struct ConeFamily {
  int d = 3;
  int k = 1;
  double M = 8.0;
  double lambda = 0.9;

  double phi_hat(double t) const;
  // phi_2^ phi_3^ at (y, z) in R^{d-2}.
  double profile_hat(const double* yz) const;
  // B = int phi_2^ phi_3^.
  double B() const;
  // Membership in U_lambda.
  bool in_U(std::span<const double> x) const;
  double aperture() const;  // 10^-3 lambda^-2
  double xd_min() const;    // 10^3 lambda^2
  // K through the exact reduction of the Fresnel integrals in eta', eta''.
  cplx K(std::span<const double> x) const;
  // K by direct oscillatory quadrature of its definition (d = 3 only).
  cplx K_direct(std::span<const double> x, const OscillatoryOptions& opts = {}) const;
  // int_{U_lambda slice at x_d} |K|^q dx~ for each q.
  RealVec slice_mass(double xd, const RealVec& qs) const;

  // Quadrature nodes of the (y, z) integral, set by make_cone_K.
  RealVec nodes;    // flattened, d-2 per node
  RealVec weights;  // includes phi_2^ phi_3^
};
ConeFamily make_cone_K(int d, int k, double M, double tail_tol = 1e-2);

// Shell masses int_{T_i}^{T_{i+1}} S(x_d) dx_d from a slice-mass function, by
// Gauss-Legendre in log x_d.
std::vector<RealVec> shell_masses(const std::function<RealVec(double)>& slice, const RealVec& edges,
                                  std::size_t nq, int order = 4);

// Lower bound for ||T^rho_lambda||_{2 -> q} from the test function
// f^ = tilde_chi conj(psi(lambda^-1 (eta_d - G))). Then T f = lambda I_2(x) Psi_2(-lambda x_d)
// with I_2 the oscillatory integral of tilde_chi^2 and Psi_2 the transform of |psi|^2.
struct TtStarOptions {
  double x_max = 64.0;   // |x_d| range kept in the q-norm (a truncation only lowers the bound)
  int x_order = 8;       // Gauss-Legendre nodes per dyadic x_d panel
  int pad = 6;           // lattice refinement so that |I_2|^q is integrated exactly for q <= pad
  double margin = 24.0;  // spatial margin around the stationary region
};
struct TtStarResult {
  double lambda = 0.0;
  double norm_q = 0.0;
  double norm_2 = 0.0;
  double ratio = 0.0;
};
class TtStarProbe {
 public:
  TtStarProbe(const GraphChart& chart, const PsiFunction& psi, double q, const TtStarOptions& opts = {});
  TtStarResult evaluate(double lambda) const;
  // int |I_2(x~, x_d)|^q dx~ at the x_d nodes.
  const RealVec& slice_nodes() const { return xs_; }
  const RealVec& slice_values() const { return J_; }

 private:
  double Psi2(double tau) const;
  GraphChart chart_;
  PsiFunction psi_;
  double q_;
  RealVec xs_, ws_, J_;
  double chi_l2sq_ = 0.0;
};

}  // namespace usol
