#pragma once

#include <functional>
#include <memory>

#include "usol/common.hpp"

namespace usol {

// Piecewise Chebyshev interpolant of a smooth function on [0, x_max].
class ChebTable {
 public:
  ChebTable() = default;
  // fn is called once per node with a batch of abscissae.
  ChebTable(double x_max, double panel_width, int degree,
            const std::function<void(const RealVec& x, RealVec& y)>& fn);
  double operator()(double x) const;  // x in [0, x_max]; zero beyond
  double x_max() const { return x_max_; }
  // max |f| over the last `span` units of the table.
  double tail_max(double span) const;

 private:
  double x_max_ = 0.0;
  double width_ = 1.0;
  int degree_ = 0;
  RealVec coeffs_;
  RealVec samples_;  // node values, kept for tail estimates
};

// The fixed bump functions used throughout.
//   phi   : even, supported in 1/2 <= |x| <= 2, sum_j phi(2^j x) = 1 for x != 0.
//   chi   : supported in [1,2], integral 1/2.
//   beta, beta0 : beta0(t) + sum_{j>=1} beta(2^-j t) = 1.
class BumpKit {
 public:
  BumpKit();
  static const BumpKit& standard();

  double phi(double x) const;
  double chi(double s) const;
  // int_{-inf}^t chi.
  double chi_cdf(double t) const;
  double beta(double t) const { return phi(t); }
  double beta0(double t) const;
  double chi_normalization() const { return chi_scale_; }

 private:
  double chi_scale_ = 1.0;
  RealVec cdf_edges_;  // cumulative integral at panel edges of [1,2]
};

enum class PsiKind { Delta, Pv };

// psi for the dyadic decompositions of delta (psi^ = phi) and p.v.(1/x)
// (psi = varphi(x)/x with varphi(x) = phi_pv(x/2) - phi_pv(x), phi_pv^ = chi(.) + chi(-.)).
class PsiFunction {
 public:
  PsiKind kind() const { return kind_; }
  double operator()(double x) const;
  cplx hat(double t) const;
  // pv only: phi_pv and varphi, evaluated from the same interpolant so that
  // sums of varphi telescope exactly.
  double phi_pv(double x) const;
  double varphi(double x) const;
  // Tabulation range and the largest |psi| over the final stretch of it.
  double x_max() const;
  double tail_bound() const;
  const BumpKit& kit() const { return *kit_; }

  struct Tables;  // opaque, shared between copies

 private:
  friend PsiFunction build_delta_psi(const BumpKit&);
  friend PsiFunction build_pv_psi(const BumpKit&);
  PsiKind kind_ = PsiKind::Delta;
  const BumpKit* kit_ = nullptr;
  std::shared_ptr<const Tables> tables_;
};

PsiFunction build_delta_psi(const BumpKit& kit);
PsiFunction build_pv_psi(const BumpKit& kit);

struct DyadicOptions {
  int j_min = -24;
  int j_max = 24;
  // Stop once |term| < rel_stop * max(|running sum|, peak |term|) for three consecutive j.
  bool early_stop = false;
  double rel_stop = 1e-12;
  int panel_order = 20;
};

struct DyadicSum {
  double value = 0.0;
  int j_lo = 0;
  int j_hi = 0;
  RealVec terms;        // terms[j - j_lo]
  double tail_estimate = 0.0;  // geometric extrapolation of the dropped terms
};

// sum_j 2^{-j} int psi(2^{-j} x) g(x) dx = sum_j int psi(y) g(2^j y) dy.
DyadicSum dyadic_pairing(const PsiFunction& psi, const std::function<double(double)>& g,
                         const DyadicOptions& opts = {});

}  // namespace usol
