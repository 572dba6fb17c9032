#include "usol/quadform.hpp"

#include <cmath>

#include "usol/bump.hpp"

namespace usol {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_len(const QuadraticForm& form, std::size_t n, const char* what) {
  if (n != static_cast<std::size_t>(form.d())) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(form.d()) + ", got " +
                         std::to_string(n));
  }
}
}  // namespace

QuadraticForm::QuadraticForm(int d, int k) : d_(d), k_(k) {
  if (d < 3) throw DimensionError("QuadraticForm: d must be at least 3");
  if (k < 1 || k > d) throw DomainError("QuadraticForm: signature index k must satisfy 1 <= k <= d");
}

double eval_Q(const QuadraticForm& form, std::span<const double> xi) {
  check_len(form, xi.size(), "eval_Q");
  double neg = 0.0, pos = 0.0;
  for (int j = 0; j < form.k(); ++j) neg += xi[j] * xi[j];
  for (int j = form.k(); j < form.d(); ++j) pos += xi[j] * xi[j];
  return pos - neg;
}

RealVec rotate_to_graph(const QuadraticForm& form, std::span<const double> xi) {
  check_len(form, xi.size(), "rotate_to_graph");
  if (!form.non_elliptic()) throw DomainError("rotate_to_graph: form is elliptic, no real null directions");
  const int d = form.d();
  RealVec eta(xi.begin(), xi.end());
  eta[0] = (xi[d - 1] + xi[0]) * kInvSqrt2;
  eta[d - 1] = (xi[d - 1] - xi[0]) * kInvSqrt2;
  return eta;
}

RealVec rotate_from_graph(const QuadraticForm& form, std::span<const double> eta) {
  check_len(form, eta.size(), "rotate_from_graph");
  if (!form.non_elliptic()) throw DomainError("rotate_from_graph: form is elliptic");
  const int d = form.d();
  RealVec xi(eta.begin(), eta.end());
  xi[0] = (eta[0] - eta[d - 1]) * kInvSqrt2;
  xi[d - 1] = (eta[0] + eta[d - 1]) * kInvSqrt2;
  return xi;
}

double graph_form(const QuadraticForm& form, std::span<const double> eta) {
  check_len(form, eta.size(), "graph_form");
  const int d = form.d();
  double s = 2.0 * eta[0] * eta[d - 1];
  for (int j = 1; j < form.k(); ++j) s -= eta[j] * eta[j];
  for (int j = form.k(); j < d - 1; ++j) s += eta[j] * eta[j];
  return s;
}

GraphChart::GraphChart(const QuadraticForm& form, double rho, GraphDomain domain, double cutoff_fraction)
    : form_(form), rho_(rho), domain_(domain), cutoff_(cutoff_fraction) {
  if (!form.non_elliptic()) throw DomainError("GraphChart: form is elliptic");
  if (rho == 0.0 || !std::isfinite(rho)) throw DomainError("GraphChart: rho must be finite and nonzero");
  if (!(domain.eta1_lo > 0.0) || !(domain.eta1_hi > domain.eta1_lo))
    throw DomainError("GraphChart: eta_1 range must be positive and nonempty");
  if (!(domain.r_prime > 0.0) || !(domain.r_dprime > 0.0)) throw DomainError("GraphChart: radii must be positive");
  if (!(cutoff_fraction > 0.0 && cutoff_fraction <= 1.0))
    throw DomainError("GraphChart: cutoff fraction must lie in (0,1]");
}

double GraphChart::height(const double* et) const {
  double s = rho_;
  const int k = form_.k(), d = form_.d();
  for (int j = 1; j < k; ++j) s += et[j] * et[j];
  for (int j = k; j < d - 1; ++j) s -= et[j] * et[j];
  return s / (2.0 * et[0]);
}

void GraphChart::gradient(const double* et, double* g) const {
  const int k = form_.k(), d = form_.d();
  double inv = 1.0 / et[0];
  g[0] = -height(et) * inv;
  for (int j = 1; j < k; ++j) g[j] = et[j] * inv;
  for (int j = k; j < d - 1; ++j) g[j] = -et[j] * inv;
}

double GraphChart::tilde_chi(const double* et) const {
  const int k = form_.k(), d = form_.d();
  double half = 0.5 * (domain_.eta1_hi - domain_.eta1_lo) * cutoff_;
  double v = bump::bump((et[0] - domain_.eta1_mid()) / half);
  if (v == 0.0) return 0.0;
  if (k > 1) {
    double r2 = 0.0;
    for (int j = 1; j < k; ++j) r2 += et[j] * et[j];
    v *= bump::bump(std::sqrt(r2) / (cutoff_ * domain_.r_prime));
  }
  if (d - k - 1 > 0) {
    double r2 = 0.0;
    for (int j = k; j < d - 1; ++j) r2 += et[j] * et[j];
    v *= bump::bump(std::sqrt(r2) / (cutoff_ * domain_.r_dprime));
  }
  return v;
}

bool GraphChart::contains(std::span<const double> et, double tol) const {
  if (et.size() != static_cast<std::size_t>(form_.d() - 1)) return false;
  if (et[0] < domain_.eta1_lo - tol || et[0] > domain_.eta1_hi + tol) return false;
  const int k = form_.k(), d = form_.d();
  double rp = 0.0, rd = 0.0;
  for (int j = 1; j < k; ++j) rp += et[j] * et[j];
  for (int j = k; j < d - 1; ++j) rd += et[j] * et[j];
  return std::sqrt(rp) <= domain_.r_prime + tol && std::sqrt(rd) <= domain_.r_dprime + tol;
}

void GraphChart::cutoff_box(RealVec& lo, RealVec& hi) const {
  const int k = form_.k(), n = form_.d() - 1;
  lo.assign(n, 0.0);
  hi.assign(n, 0.0);
  double half = 0.5 * (domain_.eta1_hi - domain_.eta1_lo) * cutoff_;
  lo[0] = domain_.eta1_mid() - half;
  hi[0] = domain_.eta1_mid() + half;
  for (int j = 1; j < n; ++j) {
    double r = cutoff_ * (j < k ? domain_.r_prime : domain_.r_dprime);
    lo[j] = -r;
    hi[j] = r;
  }
}

double graph_height(const GraphChart& chart, std::span<const double> et) {
  if (et.size() != static_cast<std::size_t>(chart.param_dim()))
    throw DimensionError("graph_height: eta_tilde must have length d-1");
  if (!chart.contains(et)) throw DomainError("graph_height: point outside the chart domain");
  return chart.height(et.data());
}

}  // namespace usol
