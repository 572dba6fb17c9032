#include "usol/surface_ops.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "usol/bump.hpp"

namespace usol {

namespace {

inline cplx unit(double phase) { return {std::cos(phase), std::sin(phase)}; }

// Householder reflection of R^m taking e_{pivot} to u.
RealVec householder(const RealVec& u, int pivot) {
  const int m = static_cast<int>(u.size());
  RealVec w(u.size());
  double nu = 0.0;
  for (double v : u) nu += v * v;
  nu = std::sqrt(nu);
  if (nu == 0.0) throw DomainError("BlockRotation: zero direction");
  double ww = 0.0;
  for (int i = 0; i < m; ++i) {
    w[i] = (i == pivot ? 1.0 : 0.0) - u[i] / nu;
    ww += w[i] * w[i];
  }
  RealVec H(m * m, 0.0);
  for (int i = 0; i < m; ++i) H[i * m + i] = 1.0;
  if (ww > 1e-30)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) H[i * m + j] -= 2.0 * w[i] * w[j] / ww;
  return H;
}

double q_tilde(const QuadraticForm& form, const double* u) {
  double s = 0.0;
  for (int j = 0; j < form.d() - 1; ++j) s += (j < form.k() ? -1.0 : 1.0) * u[j] * u[j];
  return s;
}

}  // namespace

BlockRotation BlockRotation::identity(int d) {
  BlockRotation r;
  r.d_ = d;
  r.m_.assign(d * d, 0.0);
  for (int i = 0; i < d; ++i) r.m_[i * d + i] = 1.0;
  return r;
}

BlockRotation BlockRotation::aligning(const QuadraticForm& form, const RealVec& u, const RealVec& v) {
  const int d = form.d(), k = form.k();
  if (static_cast<int>(u.size()) != k || static_cast<int>(v.size()) != d - k)
    throw DimensionError("BlockRotation: block directions have the wrong length");
  RealVec A = householder(u, 0), B = householder(v, d - k - 1);
  BlockRotation r;
  r.d_ = d;
  r.m_.assign(d * d, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) r.m_[i * d + j] = A[i * k + j];
  const int m = d - k;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r.m_[(k + i) * d + (k + j)] = B[i * m + j];
  return r;
}

void BlockRotation::apply(const double* a, double* out) const {
  for (int i = 0; i < d_; ++i) {
    double s = 0.0;
    for (int j = 0; j < d_; ++j) s += m_[i * d_ + j] * a[j];
    out[i] = s;
  }
}

void BlockRotation::apply_transpose(const double* a, double* out) const {
  for (int i = 0; i < d_; ++i) {
    double s = 0.0;
    for (int j = 0; j < d_; ++j) s += m_[j * d_ + i] * a[j];
    out[i] = s;
  }
}

SurfaceChart SurfaceChart::null_frame(const GraphChart& chart, ChartWeight weight, BlockRotation rot) {
  SurfaceChart c;
  c.kind_ = ChartKind::NullFrame;
  c.weight_ = weight;
  c.form_ = chart.form();
  c.rho_ = chart.rho();
  c.graph_ = chart;
  c.rot_ = rot.d() == 0 ? BlockRotation::identity(chart.form().d()) : rot;
  if (c.rot_.d() != chart.form().d()) throw DimensionError("SurfaceChart: rotation dimension mismatch");
  if (weight == ChartWeight::Bump) {
    chart.cutoff_box(c.lo_, c.hi_);
  } else {
    GraphChart full(chart.form(), chart.rho(), chart.domain(), 1.0);
    full.cutoff_box(c.lo_, c.hi_);
  }
  return c;
}

SurfaceChart SurfaceChart::vertical(const QuadraticForm& form, double rho, RealVec lo, RealVec hi, int sign,
                                    ChartWeight weight, BlockRotation rot) {
  const int n = form.d() - 1;
  if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
    throw DimensionError("SurfaceChart::vertical: box must have d-1 coordinates");
  if (sign != 1 && sign != -1) throw DomainError("SurfaceChart::vertical: sign must be +-1");
  // rho - Q~ must stay positive on the box.
  double qmax = 0.0;
  for (int j = 0; j < n; ++j) {
    if (!(hi[j] > lo[j])) throw DomainError("SurfaceChart::vertical: empty box");
    double big = std::max(lo[j] * lo[j], hi[j] * hi[j]);
    double small = (lo[j] <= 0.0 && hi[j] >= 0.0) ? 0.0 : std::min(lo[j] * lo[j], hi[j] * hi[j]);
    qmax += j < form.k() ? -small : big;
  }
  if (!(rho - qmax > 0.0)) throw DomainError("SurfaceChart::vertical: the box leaves the graph region");
  SurfaceChart c;
  c.kind_ = ChartKind::Vertical;
  c.weight_ = weight;
  c.form_ = form;
  c.rho_ = rho;
  c.sign_ = sign;
  c.rot_ = rot.d() == 0 ? BlockRotation::identity(form.d()) : rot;
  c.lo_ = std::move(lo);
  c.hi_ = std::move(hi);
  return c;
}

double SurfaceChart::height(const double* u) const {
  if (kind_ == ChartKind::NullFrame) return graph_->height(u);
  double s = rho_ - q_tilde(form_, u);
  return s > 0.0 ? sign_ * std::sqrt(s) : std::nan("");
}

RealVec SurfaceChart::gradient_bound() const {
  const int n = param_dim();
  RealVec gb(n);
  if (kind_ == ChartKind::NullFrame) {
    const int k = form_.k();
    double rp = 0.0, rd = 0.0;
    for (int i = 1; i < n; ++i) (i < k ? rp : rd) = std::max(i < k ? rp : rd, std::abs(hi_[i]));
    gb[0] = (rp * rp + rd * rd + std::abs(rho_)) / (2.0 * lo_[0] * lo_[0]);
    for (int i = 1; i < n; ++i) gb[i] = std::max(std::abs(lo_[i]), std::abs(hi_[i])) / lo_[0];
    return gb;
  }
  double qmax = 0.0;
  for (int j = 0; j < n; ++j) {
    double big = std::max(lo_[j] * lo_[j], hi_[j] * hi_[j]);
    double small = (lo_[j] <= 0.0 && hi_[j] >= 0.0) ? 0.0 : std::min(lo_[j] * lo_[j], hi_[j] * hi_[j]);
    qmax += j < form_.k() ? -small : big;
  }
  double hmin = std::sqrt(rho_ - qmax);
  for (int j = 0; j < n; ++j) gb[j] = std::max(std::abs(lo_[j]), std::abs(hi_[j])) / hmin;
  return gb;
}

bool SurfaceChart::lift(const double* u, double* xi, double* density) const {
  const int d = form_.d();
  for (int j = 0; j < d - 1; ++j)
    if (u[j] < lo_[j] || u[j] > hi_[j]) return false;
  double h = height(u);
  if (!std::isfinite(h)) return false;
  double loc[16];
  RealVec big;
  double* p = loc;
  if (d > 16) {
    big.resize(d);
    p = big.data();
  }
  if (kind_ == ChartKind::NullFrame) {
    const double s = 1.0 / std::sqrt(2.0);
    for (int j = 1; j < d - 1; ++j) p[j] = u[j];
    p[0] = s * (u[0] - h);
    p[d - 1] = s * (u[0] + h);
    *density = 0.5 / u[0];
  } else {
    for (int j = 0; j < d - 1; ++j) p[j] = u[j];
    p[d - 1] = h;
    *density = 0.5 / std::abs(h);
  }
  rot_.apply(p, xi);
  return true;
}

bool SurfaceChart::project(const double* xi, double* u) const {
  const int d = form_.d();
  RealVec loc(d);
  rot_.apply_transpose(xi, loc.data());
  if (kind_ == ChartKind::NullFrame) {
    const double s = 1.0 / std::sqrt(2.0);
    u[0] = s * (loc[d - 1] + loc[0]);
    for (int j = 1; j < d - 1; ++j) u[j] = loc[j];
    if (u[0] < lo_[0] || u[0] > hi_[0]) return false;
    const int k = form_.k();
    double rp = 0.0, rd = 0.0;
    for (int j = 1; j < k; ++j) rp += u[j] * u[j];
    for (int j = k; j < d - 1; ++j) rd += u[j] * u[j];
    double Rp = k > 1 ? hi_[1] : 0.0, Rd = d - k - 1 > 0 ? hi_[k] : 0.0;
    return std::sqrt(rp) <= Rp + kChartTolerance && std::sqrt(rd) <= Rd + kChartTolerance;
  }
  if (loc[d - 1] * sign_ <= 0.0) return false;
  for (int j = 0; j < d - 1; ++j) {
    u[j] = loc[j];
    if (u[j] < lo_[j] || u[j] > hi_[j]) return false;
  }
  return true;
}

double SurfaceChart::weight(const double* u) const {
  const int n = param_dim();
  if (kind_ == ChartKind::NullFrame) {
    if (weight_ == ChartWeight::Bump) return graph_->tilde_chi(u);
    return 1.0;
  }
  if (weight_ == ChartWeight::Indicator) return 1.0;
  double v = 1.0;
  for (int j = 0; j < n; ++j) v *= bump::interval_bump(u[j], lo_[j], hi_[j]);
  return v;
}

void SurfaceChart::local_dual(const double* x, double* y) const {
  const int d = form_.d();
  RealVec loc(d);
  rot_.apply_transpose(x, loc.data());
  if (kind_ == ChartKind::NullFrame) {
    const double s = 1.0 / std::sqrt(2.0);
    y[0] = s * (loc[d - 1] + loc[0]);
    y[d - 1] = s * (loc[d - 1] - loc[0]);
    for (int j = 1; j < d - 1; ++j) y[j] = loc[j];
  } else {
    for (int j = 0; j < d; ++j) y[j] = loc[j];
  }
}

SurfaceAtlas::SurfaceAtlas(std::vector<SurfaceChart> charts, bool normalize)
    : charts_(std::move(charts)), normalize_(normalize) {
  if (charts_.empty()) throw DomainError("SurfaceAtlas: no charts");
  for (const auto& c : charts_)
    if (c.form().d() != charts_.front().form().d() || c.form().k() != charts_.front().form().k() ||
        c.rho() != charts_.front().rho())
      throw DomainError("SurfaceAtlas: charts describe different quadrics");
}

SurfaceAtlas SurfaceAtlas::single(SurfaceChart chart) { return SurfaceAtlas({std::move(chart)}, false); }

namespace {

// Direction set on S^{m-1} used by the band atlas.
std::vector<RealVec> directions(int m, int angular) {
  std::vector<RealVec> out;
  if (m == 1) return {{1.0}, {-1.0}};
  if (m == 2) {
    for (int i = 0; i < angular; ++i) out.push_back({std::cos(kTwoPi * i / angular), std::sin(kTwoPi * i / angular)});
    return out;
  }
  for (int i = 0; i < m; ++i)
    for (int s : {1, -1}) {
      RealVec v(m, 0.0);
      v[i] = s;
      out.push_back(v);
    }
  for (int mask = 0; mask < (1 << m); ++mask) {
    RealVec v(m);
    for (int i = 0; i < m; ++i) v[i] = ((mask >> i) & 1 ? -1.0 : 1.0) / std::sqrt(double(m));
    out.push_back(v);
  }
  return out;
}

}  // namespace

SurfaceAtlas SurfaceAtlas::band(const QuadraticForm& form, double rho, int angular) {
  if (std::abs(std::abs(rho) - 1.0) > 1e-12) throw DomainError("SurfaceAtlas::band: rho must be +1 or -1");
  const int d = form.d(), k = form.k();
  // On the band, eta_1 = e^{+-t}/sqrt2 with |t| <= acosh(4)/2; the domain leaves margin
  // for the angular mismatch between a point and its nearest chart.
  GraphDomain dom{0.2, 2.6, 1.2, 1.2};
  GraphChart base(form, rho, dom, 1.0);
  std::vector<SurfaceChart> charts;
  for (const auto& u : directions(k, angular))
    for (const auto& v : directions(d - k, angular))
      charts.push_back(SurfaceChart::null_frame(base, ChartWeight::Bump, BlockRotation::aligning(form, u, v)));
  return SurfaceAtlas(std::move(charts), true);
}

double SurfaceAtlas::coverage(const double* xi) const {
  RealVec u(form().d() - 1);
  double s = 0.0;
  for (const auto& c : charts_)
    if (c.project(xi, u.data())) s += c.weight(u.data());
  return s;
}

double SurfaceAtlas::weight(std::size_t c, const double* u, const double* xi) const {
  double nu = charts_[c].weight(u);
  if (!normalize_ || nu == 0.0) return nu;
  return nu / coverage(xi);
}

HyperbolicRule sphere_rule(int m, int n_angle) {
  HyperbolicRule r;
  r.d = m;
  if (m < 1) throw DimensionError("sphere_rule: m must be positive");
  if (m == 1) {
    r.points = {1.0, -1.0};
    r.weights = {1.0, 1.0};
    return r;
  }
  if (m == 2) {
    for (int i = 0; i < n_angle; ++i) {
      double a = kTwoPi * (i + 0.5) / n_angle;
      r.points.push_back(std::cos(a));
      r.points.push_back(std::sin(a));
      r.weights.push_back(kTwoPi / n_angle);
    }
    return r;
  }
  // x = (sin a * w, cos a), dsigma = sin^{m-2} a da dsigma_{m-2}.
  HyperbolicRule sub = sphere_rule(m - 1, n_angle);
  QuadRule ga = composite_gl(0.0, kPi, 1, std::max(8, n_angle / 2));
  for (std::size_t i = 0; i < ga.x.size(); ++i) {
    double sa = std::sin(ga.x[i]), ca = std::cos(ga.x[i]);
    for (std::size_t j = 0; j < sub.size(); ++j) {
      for (int c = 0; c < m - 1; ++c) r.points.push_back(sa * sub.points[j * (m - 1) + c]);
      r.points.push_back(ca);
      r.weights.push_back(ga.w[i] * std::pow(sa, m - 2) * sub.weights[j]);
    }
  }
  return r;
}

HyperbolicRule hyperbolic_rule(const QuadraticForm& form, int sign, double t_max, int t_panels, int t_order,
                               int n_angle) {
  const int d = form.d(), k = form.k();
  if (!form.non_elliptic()) throw DomainError("hyperbolic_rule: form is elliptic");
  if (sign != 1 && sign != -1) throw DomainError("hyperbolic_rule: sign must be +-1");
  HyperbolicRule su = sphere_rule(k, n_angle), sv = sphere_rule(d - k, n_angle);
  QuadRule gt = composite_gl(0.0, t_max, t_panels, t_order);
  HyperbolicRule r;
  r.d = d;
  for (std::size_t it = 0; it < gt.x.size(); ++it) {
    double sh = std::sinh(gt.x[it]), ch = std::cosh(gt.x[it]);
    double a = sign > 0 ? sh : ch, b = sign > 0 ? ch : sh;
    double wt = gt.w[it] * std::pow(a, k - 1) * std::pow(b, d - k - 1);
    for (std::size_t i = 0; i < su.size(); ++i)
      for (std::size_t j = 0; j < sv.size(); ++j) {
        for (int c = 0; c < k; ++c) r.points.push_back(a * su.points[i * k + c]);
        for (int c = 0; c < d - k; ++c) r.points.push_back(b * sv.points[j * (d - k) + c]);
        r.weights.push_back(wt * su.weights[i] * sv.weights[j]);
      }
  }
  return r;
}

double surface_integral(const std::function<double(const double*)>& F, const QuadraticForm& form, double rho,
                        double t_max, int t_panels, int t_order, int n_angle) {
  if (rho == 0.0) throw DomainError("surface_integral: rho must be nonzero");
  const int d = form.d();
  HyperbolicRule r = hyperbolic_rule(form, rho > 0 ? 1 : -1, t_max, t_panels, t_order, n_angle);
  const double s = std::sqrt(std::abs(rho));
  // delta(Q - rho) dxi = s^{d-2} delta(Q(theta) -+ 1) dtheta = s^{d-2} dsigma / 2.
  double total = 0.0;
  RealVec xi(d);
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (int c = 0; c < d; ++c) xi[c] = s * r.points[i * d + c];
    total += r.weights[i] * F(xi.data());
  }
  return 0.5 * std::pow(s, d - 2) * total;
}

double atlas_leakage(const SurfaceAtlas& atlas, const FrequencyFn& fhat, double radius) {
  const QuadraticForm& form = atlas.form();
  const double rho = atlas.rho(), s = std::sqrt(std::abs(rho));
  if (radius <= s) return 0.0;
  double t_max = 0.5 * std::acosh(radius * radius / (s * s));
  HyperbolicRule r = hyperbolic_rule(form, rho > 0 ? 1 : -1, t_max, 16, 12, 64);
  const int d = form.d();
  double total = 0.0, leaked = 0.0;
  RealVec xi(d);
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (int c = 0; c < d; ++c) xi[c] = s * r.points[i * d + c];
    double m = r.weights[i] * std::abs(fhat(xi.data()));
    if (m == 0.0) continue;
    total += m;
    if (atlas.coverage(xi.data()) <= 0.0) leaked += m;
  }
  return total > 0.0 ? leaked / total : 0.0;
}

namespace {

void check_leakage(const SurfaceAtlas& atlas, const FrequencyFn& fhat, const RestrictOptions& opts) {
  if (!opts.check_leakage) return;
  double leak = atlas_leakage(atlas, fhat, opts.leakage_radius);
  if (leak > opts.leakage_tol)
    throw DomainError("restrict_extend_chart: f^ mass outside the atlas coverage is " + std::to_string(leak));
}

// Per-axis phase tables e^{2 pi i x_j xi} on the physical lattice.
void axis_phases(const Grid& g, const double* xi, std::vector<CplxVec>& ph) {
  for (int i = 0; i < g.d; ++i) {
    ph[i].resize(g.n[i]);
    for (int j = 0; j < g.n[i]; ++j) {
      double p = g.x(i, j) * xi[i];
      ph[i][j] = unit(kTwoPi * (p - std::floor(p)));
    }
  }
}

// out += A * prod_i ph[i][j_i] over the whole lattice.
void accumulate(const Grid& g, const std::vector<CplxVec>& ph, cplx A, CplxVec& out, CplxVec& scratch) {
  const int d = g.d;
  // Build the tensor product axis by axis.
  scratch.assign(1, A);
  for (int i = 0; i < d; ++i) {
    CplxVec next(scratch.size() * g.n[i]);
    for (std::size_t o = 0; o < scratch.size(); ++o)
      for (int j = 0; j < g.n[i]; ++j) next[o * g.n[i] + j] = scratch[o] * ph[i][j];
    scratch.swap(next);
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += scratch[i];
}

}  // namespace

SampledField restrict_extend_chart(const FrequencyFn& fhat, const SurfaceAtlas& atlas, const Grid& grid,
                                   const RestrictOptions& opts) {
  const int d = atlas.form().d();
  if (grid.d != d) throw DimensionError("restrict_extend_chart: grid dimension mismatch");
  check_leakage(atlas, fhat, opts);
  double xmax = 0.0;
  for (int i = 0; i < d; ++i) xmax += 0.25 * grid.L[i] * grid.L[i];
  xmax = std::sqrt(xmax);

  CplxVec out(grid.size(), 0.0);
  std::mutex mu;
  for (std::size_t c = 0; c < atlas.charts().size(); ++c) {
    const SurfaceChart& ch = atlas.charts()[c];
    const int n = ch.param_dim();
    RealVec gb = ch.gradient_bound();
    std::vector<QuadRule> rules(n);
    std::size_t inner = 1;
    for (int i = 0; i < n; ++i) {
      double len = ch.box_hi()[i] - ch.box_lo()[i];
      double cycles = xmax * std::sqrt(1.0 + gb[i] * gb[i]) * len;
      int N = std::max(opts.min_nodes, static_cast<int>(std::ceil(1.6 * cycles + 24.0)));
      rules[i] = composite_gl(ch.box_lo()[i], ch.box_hi()[i], 1, N);
      if (i > 0) inner *= rules[i].x.size();
    }
    parallel_for(rules[0].x.size(), [&](std::size_t b, std::size_t e) {
      CplxVec local(grid.size(), 0.0), scratch;
      std::vector<CplxVec> ph(d);
      RealVec u(n), xi(d);
      std::vector<std::size_t> mi(n, 0);
      for (std::size_t i0 = b; i0 < e; ++i0) {
        u[0] = rules[0].x[i0];
        std::fill(mi.begin(), mi.end(), 0);
        for (std::size_t r = 0; r < inner; ++r) {
          double w = rules[0].w[i0];
          for (int i = 1; i < n; ++i) {
            u[i] = rules[i].x[mi[i]];
            w *= rules[i].w[mi[i]];
          }
          for (int i = n - 1; i >= 1; --i) {
            if (++mi[i] < rules[i].x.size()) break;
            mi[i] = 0;
          }
          double dens;
          if (!ch.lift(u.data(), xi.data(), &dens)) continue;
          double nu = atlas.weight(c, u.data(), xi.data());
          if (nu == 0.0) continue;
          cplx A = fhat(xi.data());
          if (A == 0.0) continue;
          axis_phases(grid, xi.data(), ph);
          accumulate(grid, ph, w * nu * dens * A, local, scratch);
        }
      }
      std::lock_guard<std::mutex> lock(mu);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += local[i];
    });
  }
  return SampledField(grid, Space::Physical, std::move(out));
}

SampledField restrict_extend_chart(const SampledField& f, const SurfaceAtlas& atlas, const Grid& grid,
                                   const RestrictOptions& opts) {
  if (f.space() != Space::Physical) throw DomainError("restrict_extend_chart: physical-space input required");
  return restrict_extend_chart([&](const double* xi) { return band_limited_interpolant(f, xi); }, atlas, grid, opts);
}

cplx restrict_extend_at(const FrequencyFn& fhat, const SurfaceAtlas& atlas, std::span<const double> x,
                        const OscillatoryOptions& opts) {
  const int d = atlas.form().d();
  if (x.size() != static_cast<std::size_t>(d)) throw DimensionError("restrict_extend_at: x must have length d");
  cplx total = 0.0;
  RealVec y(d);
  for (std::size_t c = 0; c < atlas.charts().size(); ++c) {
    const SurfaceChart& ch = atlas.charts()[c];
    ch.local_dual(x.data(), y.data());
    auto height = [&](const double* u) { return ch.height(u); };
    auto amp = [&](const double* u) -> cplx {
      RealVec xi(d);
      double dens;
      if (!ch.lift(u, xi.data(), &dens)) return 0.0;
      double nu = atlas.weight(c, u, xi.data());
      if (nu == 0.0) return 0.0;
      return nu * dens * fhat(xi.data());
    };
    total += box_oscillatory_integral(ch.box_lo(), ch.box_hi(), y, height, ch.gradient_bound(), amp, opts).value;
  }
  return total;
}

SampledField restrict_extend_mollified(const SampledField& f, const QuadraticForm& form, double rho, double eps) {
  if (f.space() != Space::Physical) throw DomainError("restrict_extend_mollified: physical-space input required");
  if (!(eps > 0.0)) throw DomainError("restrict_extend_mollified: eps must be positive");
  const Grid& g = f.grid();
  double res = 0.0;
  for (int i = 0; i < g.d; ++i) {
    double ximax = std::abs(g.centre[i]) + 0.5 * g.n[i] / g.L[i];
    res = std::max(res, 2.0 * ximax / g.L[i]);
  }
  if (eps < res)
    log_warn("restrict_extend_mollified: eps " + std::to_string(eps) + " is below the lattice resolution " +
             std::to_string(res) + " of Q");
  const int d = g.d;
  return apply_multiplier(f, [&](const double* xi) {
    double t = eval_Q(form, std::span<const double>(xi, d)) - rho;
    return cplx(eps / (kPi * (t * t + eps * eps)));
  });
}

std::vector<SampledField> restrict_extend_mollified_pointwise(const FrequencyFn& fhat, const QuadraticForm& form,
                                                              double rho, const RealVec& eps_list, const RealVec& lo,
                                                              const RealVec& hi, double zd_lo, double zd_hi,
                                                              const Grid& grid, const MollifiedOptions& opts) {
  const int d = form.d(), n = d - 1;
  if (grid.d != d || static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
    throw DimensionError("restrict_extend_mollified_pointwise: inconsistent dimensions");
  if (!(zd_lo > 0.0 && zd_hi > zd_lo)) throw DomainError("restrict_extend_mollified_pointwise: need 0 < zd_lo < zd_hi");
  std::vector<QuadRule> rules(n);
  std::size_t inner = 1;
  for (int i = 0; i < n; ++i) {
    rules[i] = composite_gl(lo[i], hi[i], 1, opts.xi_nodes);
    if (i > 0) inner *= rules[i].x.size();
  }
  // u range swept by the support.
  double qmin = 0.0, qmax = 0.0;
  for (int j = 0; j < n; ++j) {
    double big = std::max(lo[j] * lo[j], hi[j] * hi[j]);
    double small = (lo[j] <= 0.0 && hi[j] >= 0.0) ? 0.0 : std::min(lo[j] * lo[j], hi[j] * hi[j]);
    if (j < form.k()) {
      qmin -= big;
      qmax -= small;
    } else {
      qmin += small;
      qmax += big;
    }
  }
  const double u_lo = zd_lo * zd_lo + qmin - rho, u_hi = zd_hi * zd_hi + qmax - rho;
  if (!(u_lo < 0.0 && u_hi > 0.0)) throw DomainError("restrict_extend_mollified_pointwise: support misses the quadric");

  // Chebyshev points of the second kind on [u_lo, u_hi].
  const int M = opts.u_nodes;
  RealVec un(M + 1);
  for (int m = 0; m <= M; ++m) un[m] = 0.5 * (u_lo + u_hi) + 0.5 * (u_hi - u_lo) * std::cos(kPi * m / M);

  // Phi(u_m; x) for every lattice point x.
  std::vector<CplxVec> phi(M + 1, CplxVec(grid.size(), 0.0));
  for (int m = 0; m <= M; ++m) {
    std::mutex mu;
    parallel_for(rules[0].x.size(), [&](std::size_t b, std::size_t e) {
      CplxVec local(grid.size(), 0.0), scratch;
      std::vector<CplxVec> ph(d);
      RealVec xi(d);
      std::vector<std::size_t> mi(n, 0);
      for (std::size_t i0 = b; i0 < e; ++i0) {
        xi[0] = rules[0].x[i0];
        std::fill(mi.begin(), mi.end(), 0);
        for (std::size_t r = 0; r < inner; ++r) {
          double w = rules[0].w[i0];
          for (int i = 1; i < n; ++i) {
            xi[i] = rules[i].x[mi[i]];
            w *= rules[i].w[mi[i]];
          }
          for (int i = n - 1; i >= 1; --i) {
            if (++mi[i] < rules[i].x.size()) break;
            mi[i] = 0;
          }
          double s = un[m] + rho - q_tilde(form, xi.data());
          if (s <= 0.0) continue;
          xi[d - 1] = std::sqrt(s);
          if (xi[d - 1] < zd_lo || xi[d - 1] > zd_hi) continue;
          cplx A = fhat(xi.data());
          if (A == 0.0) continue;
          axis_phases(grid, xi.data(), ph);
          accumulate(grid, ph, w * A / (2.0 * xi[d - 1]), local, scratch);
        }
      }
      std::lock_guard<std::mutex> lock(mu);
      for (std::size_t i = 0; i < local.size(); ++i) phi[m][i] += local[i];
    });
  }

  std::vector<SampledField> out;
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw DomainError("restrict_extend_mollified_pointwise: eps must be positive");
    // Geometric panels around u = 0, refined at the Lorentzian scale.
    RealVec edges{u_lo};
    RealVec pos;
    for (double s = eps / 16.0; s < std::max(-u_lo, u_hi); s *= 2.0) pos.push_back(s);
    for (auto it = pos.rbegin(); it != pos.rend(); ++it)
      if (-*it > u_lo) edges.push_back(-*it);
    edges.push_back(0.0);
    for (double s : pos)
      if (s < u_hi) edges.push_back(s);
    edges.push_back(u_hi);
    QuadRule q = composite_gl_edges(edges, opts.u_order);
    // c_m = sum_q w_q L_eps(u_q) ell_m(u_q) with barycentric Lagrange basis ell_m.
    RealVec c(M + 1, 0.0), bw(M + 1);
    for (int m = 0; m <= M; ++m) bw[m] = ((m & 1) ? -1.0 : 1.0) * ((m == 0 || m == M) ? 0.5 : 1.0);
    for (std::size_t iq = 0; iq < q.x.size(); ++iq) {
      double u = q.x[iq];
      double L = eps / (kPi * (u * u + eps * eps)) * q.w[iq];
      int hit = -1;
      double den = 0.0;
      RealVec t(M + 1);
      for (int m = 0; m <= M; ++m) {
        double diff = u - un[m];
        if (diff == 0.0) {
          hit = m;
          break;
        }
        t[m] = bw[m] / diff;
        den += t[m];
      }
      if (hit >= 0) {
        c[hit] += L;
        continue;
      }
      for (int m = 0; m <= M; ++m) c[m] += L * t[m] / den;
    }
    CplxVec v(grid.size(), 0.0);
    for (int m = 0; m <= M; ++m)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += c[m] * phi[m][i];
    out.emplace_back(grid, Space::Physical, std::move(v));
  }
  return out;
}

PolarResult polar_integrate(const std::function<double(const double*)>& g, const QuadraticForm& form,
                            const PolarOptions& opts) {
  const int d = form.d();
  QuadRule rr = composite_gl(0.0, opts.radius, opts.r_panels, opts.r_order);
  const std::size_t last = rr.x.size() - opts.r_order;
  PolarResult res;
  double tail = 0.0, scale = 0.0;
  for (int sign : {1, -1}) {
    HyperbolicRule h = hyperbolic_rule(form, sign, opts.t_max, opts.t_panels, opts.t_order, opts.n_angle);
    std::mutex mu;
    double branch = 0.0;
    parallel_for(h.size(), [&](std::size_t b, std::size_t e) {
      double acc = 0.0, tl = 0.0, sc = 0.0;
      RealVec dir(d), xi(d);
      for (std::size_t i = b; i < e; ++i) {
        double nrm = 0.0;
        for (int c = 0; c < d; ++c) nrm += h.points[i * d + c] * h.points[i * d + c];
        nrm = std::sqrt(nrm);
        for (int c = 0; c < d; ++c) dir[c] = h.points[i * d + c] / nrm;
        // int_0^inf r^{d-1} g(r theta) dr = |theta|^{-d} int s^{d-1} g(s theta^) ds.
        double rad = 0.0, rtail = 0.0, rabs = 0.0;
        for (std::size_t j = 0; j < rr.x.size(); ++j) {
          double s = rr.x[j];
          for (int c = 0; c < d; ++c) xi[c] = s * dir[c];
          double v = rr.w[j] * std::pow(s, d - 1) * g(xi.data());
          rad += v;
          rabs += std::abs(v);
          if (j >= last) rtail += std::abs(v);
        }
        double w = h.weights[i] * std::pow(nrm, -d);
        acc += w * rad;
        tl += w * rtail;
        sc += w * rabs;
      }
      std::lock_guard<std::mutex> lock(mu);
      branch += acc;
      tail += tl;
      scale += sc;
    });
    (sign > 0 ? res.plus : res.minus) = branch;
  }
  res.value = res.plus + res.minus;
  res.radial_tail = scale > 0.0 ? tail / scale : 0.0;
  if (res.radial_tail > opts.tail_tol)
    throw ConvergenceError("polar_integrate: radial truncation leaves " + std::to_string(res.radial_tail) +
                           " of the mass in the outermost panel");
  return res;
}

double cartesian_integrate(const std::function<double(const double*)>& g, int d, double half_width, int n) {
  const double h = 2.0 * half_width / n;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  std::mutex mu;
  double sum = 0.0;
  parallel_for(total, [&](std::size_t b, std::size_t e) {
    RealVec x(d);
    double acc = 0.0;
    for (std::size_t idx = b; idx < e; ++idx) {
      std::size_t r = idx;
      for (int i = d - 1; i >= 0; --i) {
        x[i] = -half_width + (r % n) * h;
        r /= n;
      }
      acc += g(x.data());
    }
    std::lock_guard<std::mutex> lock(mu);
    sum += acc;
  });
  return sum * std::pow(h, d);
}

SampledField evolution_U(const SampledField& g, const GraphChart& chart, double t) {
  if (g.space() != Space::Physical) throw DomainError("evolution_U: physical-space input required");
  if (g.grid().d != chart.param_dim()) throw DimensionError("evolution_U: g must live in d-1 dimensions");
  return apply_multiplier(g, [&](const double* et) -> cplx {
    double c = chart.tilde_chi(et);
    if (c == 0.0) return 0.0;
    double ph = t * chart.height(et);
    return c * unit(kTwoPi * (ph - std::floor(ph)));
  });
}

cplx evolution_U_at(const FrequencyFn& ghat, const GraphChart& chart, double t, std::span<const double> x_tilde,
                    const OscillatoryOptions& opts) {
  const int n = chart.param_dim();
  if (x_tilde.size() != static_cast<std::size_t>(n)) throw DimensionError("evolution_U_at: x_tilde has length d-1");
  RealVec x(x_tilde.begin(), x_tilde.end());
  x.push_back(t);
  RealVec lo, hi;
  chart.cutoff_box(lo, hi);
  SurfaceChart sc = SurfaceChart::null_frame(chart);
  auto height = [&](const double* et) { return chart.height(et); };
  auto amp = [&](const double* et) -> cplx {
    double c = chart.tilde_chi(et);
    return c == 0.0 ? cplx(0.0) : c * ghat(et);
  };
  return box_oscillatory_integral(lo, hi, x, height, sc.gradient_bound(), amp, opts).value;
}

cplx oscillatory_I(std::span<const double> x, const GraphChart& chart, OscillatoryResult* info,
                   const OscillatoryOptions& opts) {
  auto a = [&](const double* et) { return chart.tilde_chi(et); };
  OscillatoryResult r = graph_oscillatory_integral(chart, x, nullptr, a, opts);
  if (info) *info = r;
  return r.value;
}

}  // namespace usol
