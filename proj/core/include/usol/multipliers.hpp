#pragma once

#include <span>

#include "usol/dyadic_decomp.hpp"
#include "usol/field.hpp"
#include "usol/graph_quadrature.hpp"
#include "usol/quadform.hpp"

namespace usol {

// z = a + ib.
struct SpectralParameter {
  double a = 0.0;
  double b = 0.0;

  double modulus() const;
  // The integer l0 with 2^{l0-1} < |b| <= 2^{l0}; requires b != 0.
  int l0() const;
};

// Symbol (Q(xi) + z)^{-1} sampled on the frequency lattice.
CplxVec resolvent_symbol(const Grid& grid, const QuadraticForm& form, SpectralParameter z);
SampledField resolvent_apply(const SampledField& f, const QuadraticForm& form, SpectralParameter z);

// 1/(t + ib) = t/(t^2+b^2) - i b/(t^2+b^2) with t = Q + a.
struct RealImagSplit {
  double a;
  double b;
  double real_part(double q) const;
  double imag_coeff(double q) const;  // the multiplier is real_part + i * imag_coeff
  cplx recombine(double q) const { return {real_part(q), imag_coeff(q)}; }
};
RealImagSplit split_real_imag(const QuadraticForm& form, SpectralParameter z);

struct LevelWindow {
  int lmin = 0;
  int lmax = 0;
};

enum class AbcKind { A, B, C };
struct AbcPiece {
  AbcKind kind;
  int l;
};

// The dyadic pieces of the real part in the variable t = Q + a:
//   A_l = t/(t^2+b^2) varphi(2^-l t) for l < l0,
//   B_l = (t/(t^2+b^2) - 1/t) varphi(2^-l t) and C_l = 2^-l psi(2^-l t) for l >= l0.
class AbcDecomposition {
 public:
  AbcDecomposition(SpectralParameter z, PsiFunction psi_pv, LevelWindow window);

  int l0() const { return l0_; }
  const LevelWindow& window() const { return window_; }
  const std::vector<AbcPiece>& pieces() const { return pieces_; }
  double piece(const AbcPiece& p, double t) const;
  // C_l through the alternative formula varphi(2^-l t)/t (t != 0).
  double c_piece_via_varphi(int l, double t) const;
  double sum(double t) const;
  double real_part(double t) const;
  // real_part - sum, i.e. the contribution of levels outside the window.
  double residual(double t) const { return real_part(t) - sum(t); }

 private:
  SpectralParameter z_;
  PsiFunction psi_;
  LevelWindow window_;
  int l0_;
  std::vector<AbcPiece> pieces_;
};

AbcDecomposition decompose_abc(const QuadraticForm& form, SpectralParameter z, const PsiFunction& psi_pv,
                               LevelWindow window);

// Smallest nonzero and largest |Q + a| over the frequency lattice.
std::pair<double, double> grid_range_of_symbol(const Grid& grid, const QuadraticForm& form, double a);
// Window from the grid range alone: [ceil log2 eps - 4, ceil log2 sup + 2].
LevelWindow nominal_window(double eps, double sup);
// Window wide enough that the telescoped partition of unity misses at most `tol`
// on [eps, sup]; always contains the nominal window.
LevelWindow default_window(double eps, double sup, const PsiFunction& psi_pv, double tol = 1e-12);

// sum over the window of 2^-l psi(2^-l t), t = Q + a, sampled on the lattice.
CplxVec pv_symbol(const Grid& grid, const QuadraticForm& form, double a, const PsiFunction& psi_pv,
                  LevelWindow window);
// F^{-1}(p.v. 1/(Q+a) f^). Throws DomainError when the window misses more than
// `tol` of the partition of unity at some nonzero lattice value of Q + a.
SampledField pv_apply(const SampledField& f, const QuadraticForm& form, double a, const PsiFunction& psi_pv,
                      LevelWindow window, double tol = 1e-9);

enum class MChoice { ConstantOne, TwoEta1 };

// chi~(eta~) psi(lambda^-1 m(eta~)(eta_d - G_rho(eta~))) in graph coordinates.
// TwoEta1 is realized as m = eta_1 with lambda halved, keeping m within [1/2, 2]
// on charts whose eta_1 range lies inside [1/2, 2].
struct LocalizedMultiplier {
  double lambda;
  MChoice m_choice;
  PsiFunction psi;
  GraphChart chart;

  double rho() const { return chart.rho(); }
  double lambda_eff() const { return m_choice == MChoice::TwoEta1 ? 0.5 * lambda : lambda; }
  double m(double eta1) const { return m_choice == MChoice::TwoEta1 ? eta1 : 1.0; }
  // Symbol at a Cartesian frequency.
  cplx symbol(std::span<const double> xi) const;
  // |x_d| interval outside which the kernel vanishes identically.
  std::pair<double, double> kernel_slab() const;
};

SampledField t_rho_lambda_apply(const SampledField& f, const LocalizedMultiplier& lm);

// Kernel in graph coordinates x = (x_tilde, x_d):
// lambda_eff int m^{-1} psi^(-lambda_eff x_d / m) e^{2 pi i (x~.eta~ + x_d G)} chi~ d eta~.
cplx kernel_K(const LocalizedMultiplier& lm, std::span<const double> x, OscillatoryResult* info = nullptr,
              const OscillatoryOptions& opts = {});

}  // namespace usol
