#pragma once

#include <span>

#include "usol/common.hpp"

namespace usol {

// Q(xi) = -xi_1^2 - ... - xi_k^2 + xi_{k+1}^2 + ... + xi_d^2.
class QuadraticForm {
 public:
  QuadraticForm(int d, int k);

  int d() const { return d_; }
  int k() const { return k_; }
  bool non_elliptic() const { return k_ <= d_ - 1; }
  // Block sizes of the split xi = (xi_1, xi', xi'', xi_d).
  int dim_prime() const { return k_ - 1; }
  int dim_dprime() const { return d_ - k_ - 1; }

 private:
  int d_;
  int k_;
};

double eval_Q(const QuadraticForm& form, std::span<const double> xi);

// eta_1 = (xi_d + xi_1)/sqrt2, eta_d = (xi_d - xi_1)/sqrt2, other coordinates unchanged.
// In eta coordinates Q = 2 eta_1 eta_d - |eta'|^2 + |eta''|^2.
RealVec rotate_to_graph(const QuadraticForm& form, std::span<const double> xi);
RealVec rotate_from_graph(const QuadraticForm& form, std::span<const double> eta);
// 2 eta_1 eta_d - |eta'|^2 + |eta''|^2.
double graph_form(const QuadraticForm& form, std::span<const double> eta);

// Parameter box for eta_tilde = (eta_1, eta', eta''). The canonical domain is
// eta_1 in [1,2], |eta'| <= 1, |eta''| <= 1.
struct GraphDomain {
  double eta1_lo = 1.0;
  double eta1_hi = 2.0;
  double r_prime = 1.0;
  double r_dprime = 1.0;

  static GraphDomain canonical() { return {}; }
  double eta1_mid() const { return 0.5 * (eta1_lo + eta1_hi); }
};

inline constexpr double kChartTolerance = 1e-9;

// Local graph eta_d = G_rho(eta_tilde) = (|eta'|^2 - |eta''|^2 + rho)/(2 eta_1) of the
// quadric {Q = rho} over a GraphDomain, with the smooth cutoff tilde_chi.
class GraphChart {
 public:
  // cutoff_fraction sets the support of tilde_chi as a fraction of the domain.
  GraphChart(const QuadraticForm& form, double rho, GraphDomain domain = GraphDomain::canonical(),
             double cutoff_fraction = 0.9);

  const QuadraticForm& form() const { return form_; }
  double rho() const { return rho_; }
  const GraphDomain& domain() const { return domain_; }
  int param_dim() const { return form_.d() - 1; }
  double cutoff_fraction() const { return cutoff_; }

  // Unchecked evaluation; eta_tilde has length d-1.
  double height(const double* eta_tilde) const;
  void gradient(const double* eta_tilde, double* grad) const;
  double tilde_chi(const double* eta_tilde) const;

  bool contains(std::span<const double> eta_tilde, double tol = kChartTolerance) const;
  // Bounding box of supp tilde_chi (per coordinate lo/hi).
  void cutoff_box(RealVec& lo, RealVec& hi) const;

 private:
  QuadraticForm form_;
  double rho_;
  GraphDomain domain_;
  double cutoff_;
};

// Checked height: throws DomainError outside the chart domain.
double graph_height(const GraphChart& chart, std::span<const double> eta_tilde);

}  // namespace usol
