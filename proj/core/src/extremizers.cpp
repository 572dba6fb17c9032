#include "usol/extremizers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "usol/bump.hpp"

namespace usol {

std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::GLambda: return "glambda";
    case FamilyKind::Knapp: return "knapp";
    case FamilyKind::Stationary: return "stationary";
    case FamilyKind::Cone: return "cone";
  }
  return "?";
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

RealVec Box::midpoints(int per_axis) const {
  const int d = static_cast<int>(lo.size());
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= per_axis;
  RealVec out;
  out.reserve(total * d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    RealVec p(d);
    for (int i = d - 1; i >= 0; --i) {
      int j = static_cast<int>(r % per_axis);
      r /= per_axis;
      p[i] = lo[i] + (hi[i] - lo[i]) * (j + 0.5) / per_axis;
    }
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

double profile(double t) { return bump::bump(4.0 * t); }

double profile_dual_norm(double p) {
  static std::mutex mu;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  Grid g({2048}, {256.0});
  SampledField hat = SampledField::sample(g, Space::Frequency, [](const double* xi) { return cplx(profile(xi[0])); });
  double v = lp_norm(inv_fourier(hat), p);
  cache[p] = v;
  return v;
}

double box_norm_from_samples(const RealVec& a, double volume, double q) {
  if (a.empty()) throw DomainError("box_norm_from_samples: no samples");
  if (std::isinf(q)) return *std::max_element(a.begin(), a.end());
  double m = *std::max_element(a.begin(), a.end());
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : a) s += std::pow(v / m, q);
  return m * std::pow(volume * s / a.size(), 1.0 / q);
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("extremizer: lambda must lie in (0,1)");
}

void check_budget(const Grid& g) {
  if (g.size() > (std::size_t{1} << 25)) throw DomainError("extremizer: grid exceeds the memory budget");
}

}  // namespace

// ---- g_lambda -------------------------------------------------------------

GLambdaFamily make_glambda(int d, int k, double lambda) {
  check_lambda(lambda);
  QuadraticForm form(d, k);
  if (!form.non_elliptic()) throw DomainError("make_glambda: form is elliptic");
  GLambdaFamily f;
  f.d = d;
  f.k = k;
  f.lambda = lambda;
  const double l2 = lambda * lambda;
  f.R.lo.assign(d, 0.0);
  f.R.hi.assign(d, 0.0);
  f.R_dual.lo.assign(d, 0.0);
  f.R_dual.hi.assign(d, 0.0);
  f.R.lo[0] = 1.0 / l2 - 0.25 / l2;
  f.R.hi[0] = 1.0 / l2 + 0.25 / l2;
  f.R.lo[d - 1] = -0.25;
  f.R.hi[d - 1] = 0.25;
  f.R_dual.lo[0] = -l2 / (125.0 * d);
  f.R_dual.hi[0] = l2 / (125.0 * d);
  f.R_dual.lo[d - 1] = -1.0 / (20.0 * d);
  f.R_dual.hi[d - 1] = 1.0 / (20.0 * d);
  for (int j = 1; j < d - 1; ++j) {
    f.R.lo[j] = -0.25 / lambda;
    f.R.hi[j] = 0.25 / lambda;
    f.R_dual.lo[j] = -lambda / (25.0 * d);
    f.R_dual.hi[j] = lambda / (25.0 * d);
  }
  check_budget(f.grid());
  return f;
}

double GLambdaFamily::ghat_eta(const double* eta) const {
  const double l2 = lambda * lambda;
  double v = profile(l2 * (eta[0] - 1.0 / l2)) * profile(eta[d - 1]);
  for (int j = 1; j < d - 1 && v != 0.0; ++j) v *= profile(lambda * eta[j]);
  return v;
}

cplx GLambdaFamily::ghat_xi(const double* xi) const {
  RealVec eta = rotate_to_graph(QuadraticForm(d, k), std::span<const double>(xi, d));
  return ghat_eta(eta.data());
}

double GLambdaFamily::norm_p(double p) const {
  double e = std::isinf(p) ? -d : -d + d / p;
  return std::pow(lambda, e) * std::pow(profile_dual_norm(p), d);
}

Grid GLambdaFamily::grid() const {
  std::vector<int> n(d, 64);
  RealVec L(d), c(d, 0.0);
  L[0] = 64.0 * lambda * lambda;
  c[0] = 1.0 / (lambda * lambda);
  for (int j = 1; j < d - 1; ++j) L[j] = 64.0 * lambda;
  L[d - 1] = 64.0;
  return Grid(n, L, c);
}

SampledField GLambdaFamily::field() const {
  return SampledField::sample(grid(), Space::Frequency, [&](const double* eta) { return cplx(ghat_eta(eta)); });
}

SurfaceAtlas GLambdaFamily::atlas() const {
  QuadraticForm form(d, k);
  const double l2 = lambda * lambda;
  double rp = k > 1 ? std::sqrt(double(k - 1)) * 0.25 / lambda : 1.0;
  double rd = d - k - 1 > 0 ? std::sqrt(double(d - k - 1)) * 0.25 / lambda : 1.0;
  GraphChart chart(form, 1.0, GraphDomain{0.75 / l2, 1.25 / l2, rp, rd}, 1.0);
  return SurfaceAtlas::single(SurfaceChart::null_frame(chart, ChartWeight::Indicator));
}

// ---- Knapp ----------------------------------------------------------------

KnappFamily make_knapp(int d, int k, double lambda, double c) {
  check_lambda(lambda);
  if (!(c > 0.0)) throw ConfigError("make_knapp: c must be positive");
  QuadraticForm form(d, k);
  if (!form.non_elliptic()) throw DomainError("make_knapp: form is elliptic");
  KnappFamily f;
  f.d = d;
  f.k = k;
  f.lambda = lambda;
  f.c = c;
  f.dual_box.lo.assign(d, -c / lambda);
  f.dual_box.hi.assign(d, c / lambda);
  f.dual_box.lo[d - 1] = -c / (lambda * lambda);
  f.dual_box.hi[d - 1] = c / (lambda * lambda);
  check_budget(f.grid());
  return f;
}

cplx KnappFamily::fhat(const double* xi) const {
  double v = profile((xi[d - 1] - 1.0) / (lambda * lambda));
  for (int j = 0; j < d - 1 && v != 0.0; ++j) v *= profile(xi[j] / lambda);
  return v;
}

double KnappFamily::norm_p(double p) const {
  double e = std::isinf(p) ? d + 1.0 : (d + 1.0) * (1.0 - 1.0 / p);
  return std::pow(lambda, e) * std::pow(profile_dual_norm(p), d);
}

Grid KnappFamily::grid() const {
  std::vector<int> n(d, 64);
  RealVec L(d, 64.0 / lambda), cen(d, 0.0);
  L[d - 1] = 64.0 / (lambda * lambda);
  cen[d - 1] = 1.0;
  return Grid(n, L, cen);
}

SampledField KnappFamily::field() const {
  return SampledField::sample(grid(), Space::Frequency, [&](const double* xi) { return fhat(xi); });
}

SurfaceAtlas KnappFamily::atlas() const {
  RealVec lo(d - 1, -0.25 * lambda), hi(d - 1, 0.25 * lambda);
  return SurfaceAtlas::single(SurfaceChart::vertical(QuadraticForm(d, k), 1.0, lo, hi, 1));
}

// ---- stationary -------------------------------------------------------------

StationaryFamily make_stationary(int d, int k) {
  QuadraticForm form(d, k);
  if (!form.non_elliptic()) throw DomainError("make_stationary: form is elliptic");
  StationaryFamily f;
  f.d = d;
  f.k = k;
  return f;
}

cplx StationaryFamily::fhat(const double* xi) const {
  double r2 = 0.0;
  for (int j = 0; j < d - 1; ++j) r2 += xi[j] * xi[j];
  return bump::plateau(std::sqrt(r2), inner, outer) * bump::plateau(xi[d - 1] - 1.0, 0.2, 0.3);
}

SurfaceAtlas StationaryFamily::atlas() const {
  RealVec lo(d - 1, -outer), hi(d - 1, outer);
  return SurfaceAtlas::single(SurfaceChart::vertical(QuadraticForm(d, k), 1.0, lo, hi, 1));
}

double StationaryFamily::axis_value(double xd) const {
  RealVec x(d, 0.0);
  x[d - 1] = xd;
  return std::abs(restrict_extend_at([&](const double* xi) { return fhat(xi); }, atlas(), x));
}

RealVec StationaryFamily::slice_mass(double xd, const RealVec& qs) const {
  const int n = d - 1;
  const double Lt = 1.2 * std::abs(xd) + 40.0;
  const double W = std::max(1.1, 64.0 / std::abs(xd));
  int m = static_cast<int>(std::ceil(W * Lt));
  m += m & 1;
  Grid g(std::vector<int>(n, m), RealVec(n, Lt));
  QuadraticForm form(d, k);
  SampledField F = SampledField::sample(g, Space::Frequency, [&](const double* u) -> cplx {
    RealVec xi(d);
    double qt = 0.0;
    for (int j = 0; j < n; ++j) {
      xi[j] = u[j];
      qt += (j < k ? -1.0 : 1.0) * u[j] * u[j];
    }
    double s = 1.0 - qt;
    if (s <= 0.0) return 0.0;
    xi[d - 1] = std::sqrt(s);
    cplx a = fhat(xi.data());
    if (a == 0.0) return 0.0;
    double ph = xd * xi[d - 1];
    ph -= std::floor(ph);
    return a * cplx(std::cos(kTwoPi * ph), std::sin(kTwoPi * ph)) / (2.0 * xi[d - 1]);
  });
  SampledField E = inv_fourier(F);
  RealVec out;
  for (double q : qs) {
    double s = 0.0;
    for (const cplx& v : E.values()) s += std::pow(std::abs(v), q);
    out.push_back(s * g.cell_volume());
  }
  return out;
}

// ---- cone ---------------------------------------------------------------------

namespace {

constexpr double kConeEps = 0.005;

// int_{-1}^{1} bump(s) cos(2 pi s tau) ds.
double bump_hat(double tau) {
  static const QuadRule r = composite_gl(-1.0, 1.0, 4, 16);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * bump::bump(r.x[i]) * std::cos(kTwoPi * r.x[i] * tau);
  return s;
}

// (bump * bump)(sigma), supported in |sigma| <= 2.
double bump_selfconv(double sigma) {
  double a = std::max(-1.0, sigma - 1.0), b = std::min(1.0, sigma + 1.0);
  if (b <= a) return 0.0;
  QuadRule r = composite_gl(a, b, 2, 24);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * bump::bump(r.x[i]) * bump::bump(sigma - r.x[i]);
  return s;
}

double cone_half_width(const ConeFamily& f) {
  // Product profile inside the ball of radius M/2.
  int m = f.d - 2;
  return 0.5 * f.M / std::sqrt(double(m));
}

}  // namespace

ConeFamily make_cone_K(int d, int k, double M, double tail_tol) {
  QuadraticForm form(d, k);
  if (!form.non_elliptic()) throw DomainError("make_cone_K: form is elliptic");
  if (!(M > 0.0)) throw ConfigError("make_cone_K: M must be positive");
  if (!(tail_tol > 0.0)) throw ConfigError("make_cone_K: tail tolerance must be positive");
  ConeFamily f;
  f.d = d;
  f.k = k;
  f.M = M;
  // On U_lambda the cross term of w is at most 1e-3 lambda^-2 M/2 and the quadratic term at
  // most (M/2)^2/(2e3 lambda^2); lambda is the smallest value keeping both below tail_tol.
  double l2 = std::max(1e-3 * 0.5 * M / tail_tol, 0.125 * M * M * 1e-3 / tail_tol);
  if (l2 >= 1.0) throw DomainError("make_cone_K: no lambda in (0,1) meets the tail tolerance for this M");
  f.lambda = std::sqrt(l2);
  const int m = d - 2;
  const double hw = cone_half_width(f), r = 0.5 * hw;
  QuadRule q = composite_gl(-hw, hw, 4, 12);
  RealVec c1(q.x.size());
  for (std::size_t i = 0; i < q.x.size(); ++i) c1[i] = r * bump_selfconv(q.x[i] / r);
  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= q.x.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rr = idx;
    double w = 1.0;
    RealVec p(m);
    for (int i = m - 1; i >= 0; --i) {
      std::size_t j = rr % q.x.size();
      rr /= q.x.size();
      p[i] = q.x[j];
      w *= q.w[j] * c1[j];
    }
    if (w == 0.0) continue;
    f.nodes.insert(f.nodes.end(), p.begin(), p.end());
    f.weights.push_back(w);
  }
  return f;
}

double ConeFamily::phi_hat(double t) const {
  static const double b0 = bump_hat(0.0);
  double v = bump_hat(kConeEps * t) / b0;
  return 1.5 * v * v;
}

double ConeFamily::profile_hat(const double* yz) const {
  const double hw = cone_half_width(*this), r = 0.5 * hw;
  double v = 1.0;
  for (int i = 0; i < d - 2; ++i) v *= r * bump_selfconv(yz[i] / r);
  return v;
}

double ConeFamily::B() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double ConeFamily::aperture() const { return 1e-3 / (lambda * lambda); }
double ConeFamily::xd_min() const { return 1e3 * lambda * lambda; }

bool ConeFamily::in_U(std::span<const double> x) const {
  const double xd = x[d - 1];
  if (xd < xd_min()) return false;
  double rp = 0.0, rd = 0.0;
  for (int j = 1; j < k; ++j) rp += x[j] * x[j];
  for (int j = k; j < d - 1; ++j) rd += x[j] * x[j];
  if (std::sqrt(rp) > aperture() * xd || std::sqrt(rd) > aperture() * xd) return false;
  return std::abs(x[0] - (rp - rd) / (2.0 * xd)) <= 0.5;
}

cplx ConeFamily::K(std::span<const double> x) const {
  const double xd = x[d - 1];
  if (xd == 0.0) throw DomainError("ConeFamily::K: x_d must be nonzero");
  const int m = d - 2;
  cplx acc = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    const double* yz = &nodes[n * m];
    double P = 0.0;
    for (int j = 0; j < m; ++j) {
      double t = x[j + 1] + yz[j];
      P += (j < k - 1 ? 1.0 : -1.0) * t * t;
    }
    double w = x[0] - P / (2.0 * xd);
    double ph = w - std::floor(w);
    acc += weights[n] * phi_hat(-w) * cplx(std::cos(kTwoPi * ph), std::sin(kTwoPi * ph));
  }
  double sg = xd > 0 ? 1.0 : -1.0;
  double pre = kPi * sg * (2.0 * k - d) / 4.0;
  return std::pow(std::abs(xd), -0.5 * m) * cplx(std::cos(pre), std::sin(pre)) * acc;
}

cplx ConeFamily::K_direct(std::span<const double> x, const OscillatoryOptions& opts) const {
  if (d != 3 || k != 1) throw DimensionError("ConeFamily::K_direct: implemented for d = 3, k = 1");
  const double hw = cone_half_width(*this), r = 0.5 * hw;
  const double b0 = bump_hat(0.0);
  // phi(s) = 1.5/b0^2 (beta*beta)(s), beta = eps^-1 bump(./eps).
  auto phi = [&](double s) { return 1.5 / (b0 * b0) * bump_selfconv(s / kConeEps) / kConeEps; };
  // phi_3 = (r b^(r eta))^2 is the inverse transform of r bump_selfconv(./r).
  auto phi3 = [&](double e) {
    double v = r * bump_hat(r * e);
    return v * v;
  };
  const double H = 6.0;
  RealVec lo{1.0 - 2.0 * kConeEps, -H}, hi{1.0 + 2.0 * kConeEps, H};
  auto height = [](const double* e) { return -e[1] * e[1] / (2.0 * e[0]); };
  RealVec gb{H * H / (2.0 * lo[0] * lo[0]), H / lo[0]};
  auto amp = [&](const double* e) -> cplx { return std::pow(e[0], -0.5) * phi(e[0] - 1.0) * phi3(e[1]); };
  return box_oscillatory_integral(lo, hi, x, height, gb, amp, opts).value;
}

RealVec ConeFamily::slice_mass(double xd, const RealVec& qs) const {
  // x~ = (x_1, x', x'') with x_1 = (|x'|^2 - |x''|^2)/(2 x_d) + s, |s| <= 1/2, and x', x'' in balls.
  const int mp = k - 1, md = d - k - 1;
  const double R = aperture() * xd;
  auto ball = [&](int m) {
    HyperbolicRule b;
    b.d = m;
    if (m == 0) {
      b.weights = {1.0};
      return b;
    }
    HyperbolicRule s = sphere_rule(m, 8);
    QuadRule rr = composite_gl(0.0, R, 1, 6);
    for (std::size_t i = 0; i < rr.x.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) {
        for (int c = 0; c < m; ++c) b.points.push_back(rr.x[i] * s.points[j * m + c]);
        b.weights.push_back(rr.w[i] * std::pow(rr.x[i], m - 1) * s.weights[j]);
      }
    return b;
  };
  HyperbolicRule bp = ball(mp), bd = ball(md);
  QuadRule qs_rule = composite_gl(-0.5, 0.5, 1, 8);
  RealVec out(qs.size(), 0.0);
  RealVec x(d);
  x[d - 1] = xd;
  for (std::size_t a = 0; a < bp.size(); ++a)
    for (std::size_t b = 0; b < bd.size(); ++b) {
      double rp = 0.0, rd = 0.0;
      for (int c = 0; c < mp; ++c) {
        x[1 + c] = bp.points[a * mp + c];
        rp += x[1 + c] * x[1 + c];
      }
      for (int c = 0; c < md; ++c) {
        x[k + c] = bd.points[b * md + c];
        rd += x[k + c] * x[k + c];
      }
      for (std::size_t i = 0; i < qs_rule.x.size(); ++i) {
        x[0] = (rp - rd) / (2.0 * xd) + qs_rule.x[i];
        double v = std::abs(K(x));
        double w = bp.weights[a] * bd.weights[b] * qs_rule.w[i];
        for (std::size_t j = 0; j < qs.size(); ++j) out[j] += w * std::pow(v, qs[j]);
      }
    }
  return out;
}

std::vector<RealVec> shell_masses(const std::function<RealVec(double)>& slice, const RealVec& edges,
                                  std::size_t nq, int order) {
  std::vector<RealVec> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    QuadRule r = composite_gl(std::log(edges[i]), std::log(edges[i + 1]), 1, order);
    RealVec acc(nq, 0.0);
    for (std::size_t j = 0; j < r.x.size(); ++j) {
      double x = std::exp(r.x[j]);
      RealVec s = slice(x);
      for (std::size_t c = 0; c < nq; ++c) acc[c] += r.w[j] * x * s[c];
    }
    out.push_back(acc);
  }
  return out;
}

// ---- T^rho_lambda lower bound -----------------------------------------------

TtStarProbe::TtStarProbe(const GraphChart& chart, const PsiFunction& psi, double q, const TtStarOptions& opts)
    : chart_(chart), psi_(psi), q_(q) {
  if (psi.kind() != PsiKind::Delta) throw DomainError("TtStarProbe: needs the delta psi");
  if (!(q >= 2.0) || q > opts.pad) throw DomainError("TtStarProbe: q must lie in [2, pad]");
  const int n = chart.param_dim();
  RealVec lo, hi;
  chart.cutoff_box(lo, hi);
  RealVec gb = SurfaceChart::null_frame(chart).gradient_bound();
  double gmax = 0.0;
  for (double v : gb) gmax += v * v;
  gmax = std::sqrt(gmax);

  // ||tilde_chi||_2^2.
  {
    std::vector<QuadRule> r(n);
    for (int i = 0; i < n; ++i) r[i] = composite_gl(lo[i], hi[i], 4, 16);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= r[i].x.size();
    RealVec et(n);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rr = idx;
      double w = 1.0;
      for (int i = n - 1; i >= 0; --i) {
        std::size_t j = rr % r[i].x.size();
        rr /= r[i].x.size();
        et[i] = r[i].x[j];
        w *= r[i].w[j];
      }
      double c = chart.tilde_chi(et.data());
      chi_l2sq_ += w * c * c;
    }
  }

  RealVec edges{0.0};
  for (double e = 1.0; e <= opts.x_max * (1 + 1e-12); e *= 2.0) edges.push_back(e);
  QuadRule xr = composite_gl_edges(edges, opts.x_order);
  xs_ = xr.x;
  ws_ = xr.w;
  J_.assign(xs_.size(), 0.0);
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const double xd = xs_[i];
    const double Lt = 2.0 * (xd * gmax + opts.margin);
    std::vector<int> nn(n);
    RealVec L(n, Lt), c(n);
    for (int a = 0; a < n; ++a) {
      int v = static_cast<int>(std::ceil(opts.pad * (hi[a] - lo[a]) * Lt));
      nn[a] = v + (v & 1);
      c[a] = 0.5 * (lo[a] + hi[a]);
    }
    Grid g(nn, L, c);
    SampledField F = SampledField::sample(g, Space::Frequency, [&](const double* et) -> cplx {
      double ch = chart.tilde_chi(et);
      if (ch == 0.0) return 0.0;
      double ph = xd * chart.height(et);
      ph -= std::floor(ph);
      return ch * ch * cplx(std::cos(kTwoPi * ph), std::sin(kTwoPi * ph));
    });
    SampledField E = inv_fourier(F);
    double s = 0.0;
    for (const cplx& v : E.values()) s += std::pow(std::abs(v), q);
    J_[i] = s * g.cell_volume();
  }
}

double TtStarProbe::Psi2(double tau) const {
  static const QuadRule r = composite_gl(-2.0, 2.0, 32, 16);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * psi_.hat(r.x[i]).real() * psi_.hat(r.x[i] - tau).real();
  return s;
}

TtStarResult TtStarProbe::evaluate(double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("TtStarProbe: lambda must be positive");
  TtStarResult res;
  res.lambda = lambda;
  double s = 0.0;
  for (std::size_t i = 0; i < xs_.size(); ++i) s += ws_[i] * std::pow(std::abs(Psi2(lambda * xs_[i])), q_) * J_[i];
  // J is even in x_d.
  res.norm_q = lambda * std::pow(2.0 * s, 1.0 / q_);
  res.norm_2 = std::sqrt(lambda * chi_l2sq_ * Psi2(0.0));
  res.ratio = res.norm_q / res.norm_2;
  return res;
}

}  // namespace usol
