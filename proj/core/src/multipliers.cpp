#include "usol/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace usol {

double SpectralParameter::modulus() const { return std::hypot(a, b); }

int SpectralParameter::l0() const {
  if (b == 0.0) throw DomainError("SpectralParameter: l0 is undefined for b = 0");
  int e;
  double m = std::frexp(std::abs(b), &e);  // |b| = m 2^e, m in [1/2, 1)
  return m == 0.5 ? e - 1 : e;
}

namespace {

RealVec lattice_Q(const Grid& grid, const QuadraticForm& form) {
  if (grid.d != form.d()) throw DimensionError("grid dimension does not match the quadratic form");
  RealVec q(grid.size());
  parallel_for(q.size(), [&](std::size_t b, std::size_t e) {
    RealVec c(grid.d);
    for (std::size_t i = b; i < e; ++i) {
      grid.coords(i, true, c.data());
      q[i] = eval_Q(form, c);
    }
  });
  return q;
}

}  // namespace

CplxVec resolvent_symbol(const Grid& grid, const QuadraticForm& form, SpectralParameter z) {
  RealVec q = lattice_Q(grid, form);
  CplxVec s(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    double t = q[i] + z.a;
    if (z.b == 0.0 && std::abs(t) <= 1e-12 * (1.0 + std::abs(z.a)))
      throw DomainError("resolvent_apply: Q(xi) + z vanishes on the grid; use pv_apply for real z");
    s[i] = 1.0 / cplx(t, z.b);
  }
  return s;
}

SampledField resolvent_apply(const SampledField& f, const QuadraticForm& form, SpectralParameter z) {
  if (f.space() != Space::Physical) throw DomainError("resolvent_apply: physical-space input required");
  return apply_multiplier(f, resolvent_symbol(f.grid(), form, z));
}

double RealImagSplit::real_part(double q) const {
  double t = q + a;
  return t / (t * t + b * b);
}

double RealImagSplit::imag_coeff(double q) const {
  double t = q + a;
  return -b / (t * t + b * b);
}

RealImagSplit split_real_imag(const QuadraticForm&, SpectralParameter z) {
  if (z.b == 0.0) throw DomainError("split_real_imag: requires b != 0");
  return {z.a, z.b};
}

AbcDecomposition::AbcDecomposition(SpectralParameter z, PsiFunction psi_pv, LevelWindow window)
    : z_(z), psi_(std::move(psi_pv)), window_(window), l0_(z.l0()) {
  if (psi_.kind() != PsiKind::Pv) throw DomainError("decompose_abc: needs the p.v. psi");
  if (window.lmax < window.lmin) throw DomainError("decompose_abc: empty window");
  for (int l = window.lmin; l <= window.lmax; ++l) {
    if (l < l0_) {
      pieces_.push_back({AbcKind::A, l});
    } else {
      pieces_.push_back({AbcKind::B, l});
      pieces_.push_back({AbcKind::C, l});
    }
  }
}

double AbcDecomposition::piece(const AbcPiece& p, double t) const {
  const double s = std::ldexp(1.0, -p.l);
  const double b2 = z_.b * z_.b;
  switch (p.kind) {
    case AbcKind::A:
      return t / (t * t + b2) * psi_.varphi(s * t);
    case AbcKind::B:
      // (t/(t^2+b^2) - 1/t) varphi(st) = -b^2/(t^2+b^2) * s psi(st)
      return -b2 / (t * t + b2) * s * psi_(s * t);
    case AbcKind::C:
      return s * psi_(s * t);
  }
  return 0.0;
}

double AbcDecomposition::c_piece_via_varphi(int l, double t) const {
  if (t == 0.0) throw DomainError("c_piece_via_varphi: t must be nonzero");
  return psi_.varphi(std::ldexp(t, -l)) / t;
}

double AbcDecomposition::sum(double t) const {
  double s = 0.0;
  for (const auto& p : pieces_) s += piece(p, t);
  return s;
}

double AbcDecomposition::real_part(double t) const { return t / (t * t + z_.b * z_.b); }

AbcDecomposition decompose_abc(const QuadraticForm&, SpectralParameter z, const PsiFunction& psi_pv,
                               LevelWindow window) {
  if (z.b == 0.0) throw DomainError("decompose_abc: requires b != 0");
  return AbcDecomposition(z, psi_pv, window);
}

std::pair<double, double> grid_range_of_symbol(const Grid& grid, const QuadraticForm& form, double a) {
  RealVec q = lattice_Q(grid, form);
  double eps = std::numeric_limits<double>::infinity(), sup = 0.0;
  for (double v : q) {
    double t = std::abs(v + a);
    if (t > 0.0) eps = std::min(eps, t);
    sup = std::max(sup, t);
  }
  if (sup == 0.0) throw DomainError("grid_range_of_symbol: Q + a vanishes identically");
  return {eps, sup};
}

LevelWindow nominal_window(double eps, double sup) {
  return {static_cast<int>(std::ceil(std::log2(eps))) - 4, static_cast<int>(std::ceil(std::log2(sup))) + 2};
}

LevelWindow default_window(double eps, double sup, const PsiFunction& psi, double tol) {
  if (psi.kind() != PsiKind::Pv) throw DomainError("default_window: needs the p.v. psi");
  // Below x_head the partition function phi_pv is within tol of 1.
  double lo = -40.0, hi = 0.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    (1.0 - psi.phi_pv(std::exp2(mid)) <= tol ? lo : hi) = mid;
  }
  const double x_head = std::exp2(lo);
  // Beyond x_tail |phi_pv| stays below tol.
  double x_tail = psi.x_max();
  while (x_tail > 0.05 && std::abs(psi.phi_pv(x_tail - 0.05)) <= tol) x_tail -= 0.05;
  LevelWindow w{static_cast<int>(std::floor(std::log2(eps / x_tail))),
                static_cast<int>(std::ceil(std::log2(sup / x_head))) - 1};
  LevelWindow n = nominal_window(eps, sup);
  return {std::min(w.lmin, n.lmin), std::max(w.lmax, n.lmax)};
}

CplxVec pv_symbol(const Grid& grid, const QuadraticForm& form, double a, const PsiFunction& psi, LevelWindow w) {
  RealVec q = lattice_Q(grid, form);
  CplxVec s(q.size());
  parallel_for(q.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double t = q[i] + a, acc = 0.0;
      for (int l = w.lmin; l <= w.lmax; ++l) {
        double sc = std::ldexp(1.0, -l);
        acc += sc * psi(sc * t);
      }
      s[i] = acc;
    }
  });
  return s;
}

SampledField pv_apply(const SampledField& f, const QuadraticForm& form, double a, const PsiFunction& psi,
                      LevelWindow w, double tol) {
  if (f.space() != Space::Physical) throw DomainError("pv_apply: physical-space input required");
  if (psi.kind() != PsiKind::Pv) throw DomainError("pv_apply: needs the p.v. psi");
  RealVec q = lattice_Q(f.grid(), form);
  double worst = 0.0;
  for (double v : q) {
    double t = std::abs(v + a);
    if (t == 0.0) continue;
    // Telescoped window sum of varphi(2^-l t).
    double cover = psi.phi_pv(std::ldexp(t, -w.lmax - 1)) - psi.phi_pv(std::ldexp(t, -w.lmin));
    worst = std::max(worst, std::abs(1.0 - cover));
  }
  if (worst > tol)
    throw DomainError("pv_apply: level window residual " + std::to_string(worst) + " above tolerance");
  return apply_multiplier(f, pv_symbol(f.grid(), form, a, psi, w));
}

cplx LocalizedMultiplier::symbol(std::span<const double> xi) const {
  RealVec eta = rotate_to_graph(chart.form(), xi);
  double c = chart.tilde_chi(eta.data());
  if (c == 0.0) return 0.0;
  const int d = chart.form().d();
  double g = chart.height(eta.data());
  return c * psi(m(eta[0]) * (eta[d - 1] - g) / lambda_eff());
}

std::pair<double, double> LocalizedMultiplier::kernel_slab() const {
  RealVec lo, hi;
  chart.cutoff_box(lo, hi);
  double mlo = m(lo[0]), mhi = m(hi[0]);
  return {0.5 * std::min(mlo, mhi) / lambda_eff(), 2.0 * std::max(mlo, mhi) / lambda_eff()};
}

SampledField t_rho_lambda_apply(const SampledField& f, const LocalizedMultiplier& lm) {
  if (f.space() != Space::Physical) throw DomainError("t_rho_lambda_apply: physical-space input required");
  const int d = f.grid().d;
  return apply_multiplier(f, [&](const double* xi) { return lm.symbol(std::span<const double>(xi, d)); });
}

cplx kernel_K(const LocalizedMultiplier& lm, std::span<const double> x, OscillatoryResult* info,
              const OscillatoryOptions& opts) {
  const int d = lm.chart.form().d();
  if (x.size() != static_cast<std::size_t>(d)) throw DimensionError("kernel_K: x must have length d");
  const double le = lm.lambda_eff(), xd = x[d - 1];
  auto a0 = [&](double eta1) {
    double m = lm.m(eta1);
    return (le / m) * lm.psi.hat(-le * xd / m);
  };
  auto a = [&](const double* et) { return lm.chart.tilde_chi(et); };
  // Where psi^ is at roundoff level int|A| is meaningless as a scale; use the
  // size of the full kernel amplitude instead.
  OscillatoryOptions o = opts;
  if (o.abs_scale == 0.0) {
    RealVec lo, hi;
    lm.chart.cutoff_box(lo, hi);
    double vol = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) vol *= hi[i] - lo[i];
    o.abs_scale = 2.0 * le * kPi * vol;
  }
  OscillatoryResult r = graph_oscillatory_integral(lm.chart, x, a0, a, o);
  if (info) *info = r;
  return r.value;
}

}  // namespace usol
