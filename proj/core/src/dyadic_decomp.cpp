#include "usol/dyadic_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "usol/bump.hpp"

namespace usol {

// ---------------------------------------------------------------- ChebTable

ChebTable::ChebTable(double x_max, double panel_width, int degree,
                     const std::function<void(const RealVec&, RealVec&)>& fn)
    : x_max_(x_max), width_(panel_width), degree_(degree) {
  const int panels = static_cast<int>(std::ceil(x_max / panel_width - 1e-12));
  x_max_ = panels * panel_width;
  const int N = degree;
  RealVec nodes(N);
  for (int k = 0; k < N; ++k) nodes[k] = std::cos(kPi * (k + 0.5) / N);

  RealVec xs(static_cast<std::size_t>(panels) * N);
  for (int p = 0; p < panels; ++p)
    for (int k = 0; k < N; ++k) xs[p * N + k] = (p + 0.5 * (nodes[k] + 1.0)) * panel_width;
  samples_.assign(xs.size(), 0.0);
  parallel_for(static_cast<std::size_t>(panels), [&](std::size_t b, std::size_t e) {
    RealVec x(xs.begin() + b * N, xs.begin() + e * N), y(x.size());
    fn(x, y);
    std::copy(y.begin(), y.end(), samples_.begin() + b * N);
  });

  coeffs_.assign(samples_.size(), 0.0);
  for (int p = 0; p < panels; ++p) {
    for (int j = 0; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k) s += samples_[p * N + k] * std::cos(kPi * j * (k + 0.5) / N);
      coeffs_[p * N + j] = (j == 0 ? 1.0 : 2.0) * s / N;
    }
  }
}

double ChebTable::operator()(double x) const {
  if (!(x >= 0.0) || x >= x_max_) return 0.0;
  int p = static_cast<int>(x / width_);
  double s = 2.0 * (x - p * width_) / width_ - 1.0;
  const double* c = &coeffs_[static_cast<std::size_t>(p) * degree_];
  double b1 = 0.0, b2 = 0.0;
  for (int j = degree_ - 1; j >= 1; --j) {
    double b0 = c[j] + 2.0 * s * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + s * b1 - b2;
}

double ChebTable::tail_max(double span) const {
  double m = 0.0;
  const int panels = static_cast<int>(std::ceil(span / width_));
  const std::size_t start = samples_.size() - std::min<std::size_t>(samples_.size(), static_cast<std::size_t>(panels) * degree_);
  for (std::size_t i = start; i < samples_.size(); ++i) m = std::max(m, std::abs(samples_[i]));
  return m;
}

// ---------------------------------------------------------------- BumpKit

namespace {
constexpr int kCdfPanels = 64;

double chi_shape(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  return std::exp(-1.0 / ((s - 1.0) * (2.0 - s)));
}
}  // namespace

BumpKit::BumpKit() {
  QuadRule r = composite_gl(1.0, 2.0, 64, 20);
  double mass = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) mass += r.w[i] * chi_shape(r.x[i]);
  chi_scale_ = 0.5 / mass;

  cdf_edges_.assign(kCdfPanels + 1, 0.0);
  const QuadRule& g = gauss_legendre(24);
  const double w = 1.0 / kCdfPanels;
  for (int p = 0; p < kCdfPanels; ++p) {
    double a = 1.0 + p * w, s = 0.0;
    for (int i = 0; i < 24; ++i) s += 0.5 * w * g.w[i] * chi(a + 0.5 * w * (g.x[i] + 1.0));
    cdf_edges_[p + 1] = cdf_edges_[p] + s;
  }
}

const BumpKit& BumpKit::standard() {
  static const BumpKit kit;
  return kit;
}

double BumpKit::phi(double x) const {
  if (x == 0.0) return 0.0;
  double t = std::log2(std::abs(x));
  if (t <= -1.0 || t >= 1.0) return 0.0;
  return bump::smooth_step(t + 1.0) - bump::smooth_step(t);
}

double BumpKit::chi(double s) const { return chi_scale_ * chi_shape(s); }

double BumpKit::chi_cdf(double t) const {
  if (t <= 1.0) return 0.0;
  if (t >= 2.0) return 0.5;
  const double w = 1.0 / kCdfPanels;
  int p = std::min(kCdfPanels - 1, static_cast<int>((t - 1.0) / w));
  double a = 1.0 + p * w;
  const QuadRule& g = gauss_legendre(24);
  double half = 0.5 * (t - a), s = 0.0;
  for (int i = 0; i < 24; ++i) s += half * g.w[i] * chi(a + half * (g.x[i] + 1.0));
  return cdf_edges_[p] + s;
}

double BumpKit::beta0(double t) const {
  if (t == 0.0) return 1.0;
  return 1.0 - bump::smooth_step(std::log2(std::abs(t)));
}

// ---------------------------------------------------------------- PsiFunction

struct PsiFunction::Tables {
  ChebTable psi;
  ChebTable phi_pv;  // pv only
};

namespace {

constexpr double kDeltaXmax = 256.0;
constexpr double kPvXmax = 128.0;
constexpr double kPanelWidth = 0.5;
constexpr int kChebDegree = 24;

// Nodes and weights on an interval at several resolutions, with the weight
// already multiplied by the amplitude.
struct LevelledRule {
  std::vector<int> subpanels;
  std::vector<QuadRule> rules;

  LevelledRule(double a, double b, const std::function<double(double)>& amp) {
    for (int m : {48, 96, 192, 384, 768}) {
      QuadRule r = composite_gl(a, b, m, 16);
      for (std::size_t i = 0; i < r.x.size(); ++i) r.w[i] *= amp(r.x[i]);
      subpanels.push_back(m);
      rules.push_back(std::move(r));
    }
  }
  // Rule with at most ~1.2 oscillations of frequency `freq` per subpanel.
  const QuadRule& for_frequency(double freq, double length) const {
    for (std::size_t i = 0; i < rules.size(); ++i)
      if (subpanels[i] >= freq * length / 1.2) return rules[i];
    return rules.back();
  }
};

std::shared_ptr<const PsiFunction::Tables> delta_tables(const BumpKit& kit) {
  LevelledRule rule(0.5, 2.0, [&](double xi) { return 2.0 * kit.phi(xi); });
  auto t = std::make_shared<PsiFunction::Tables>();
  t->psi = ChebTable(kDeltaXmax, kPanelWidth, kChebDegree, [&](const RealVec& xs, RealVec& ys) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const QuadRule& r = rule.for_frequency(xs[i], 1.5);
      double s = 0.0;
      for (std::size_t k = 0; k < r.x.size(); ++k) s += r.w[k] * std::cos(kTwoPi * xs[i] * r.x[k]);
      ys[i] = s;
    }
  });
  return t;
}

std::shared_ptr<const PsiFunction::Tables> pv_tables(const BumpKit& kit) {
  LevelledRule rule(1.0, 2.0, [&](double xi) { return kit.chi(xi); });
  auto t = std::make_shared<PsiFunction::Tables>();
  // phi_pv(x) = 2 int chi(xi) cos(2 pi x xi) dxi.
  t->phi_pv = ChebTable(kPvXmax, kPanelWidth, kChebDegree, [&](const RealVec& xs, RealVec& ys) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const QuadRule& r = rule.for_frequency(xs[i], 1.0);
      double s = 0.0;
      for (std::size_t k = 0; k < r.x.size(); ++k) s += r.w[k] * std::cos(kTwoPi * xs[i] * r.x[k]);
      ys[i] = 2.0 * s;
    }
  });
  // psi(x) = 4 int chi(xi) sin(3 pi x xi / 2) sin(pi x xi / 2) dxi / x, free of cancellation near 0.
  t->psi = ChebTable(kPvXmax, kPanelWidth, kChebDegree, [&](const RealVec& xs, RealVec& ys) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      const QuadRule& r = rule.for_frequency(x, 1.0);
      double s = 0.0;
      for (std::size_t k = 0; k < r.x.size(); ++k)
        s += r.w[k] * std::sin(1.5 * kPi * x * r.x[k]) * std::sin(0.5 * kPi * x * r.x[k]);
      ys[i] = 4.0 * s / x;
    }
  });
  return t;
}

}  // namespace

PsiFunction build_delta_psi(const BumpKit& kit) {
  static std::once_flag once;
  static std::shared_ptr<const PsiFunction::Tables> cached;
  std::call_once(once, [&] { cached = delta_tables(BumpKit::standard()); });
  PsiFunction f;
  f.kind_ = PsiKind::Delta;
  f.kit_ = &kit;
  f.tables_ = cached;
  return f;
}

PsiFunction build_pv_psi(const BumpKit& kit) {
  static std::once_flag once;
  static std::shared_ptr<const PsiFunction::Tables> cached;
  std::call_once(once, [&] { cached = pv_tables(BumpKit::standard()); });
  PsiFunction f;
  f.kind_ = PsiKind::Pv;
  f.kit_ = &kit;
  f.tables_ = cached;
  return f;
}

double PsiFunction::operator()(double x) const {
  double v = tables_->psi(std::abs(x));
  return (kind_ == PsiKind::Pv && x < 0.0) ? -v : v;
}

cplx PsiFunction::hat(double t) const {
  if (kind_ == PsiKind::Delta) return kit_->phi(t);
  const BumpKit& k = *kit_;
  double s = k.chi_cdf(2.0 * t) - k.chi_cdf(t) - k.chi_cdf(-2.0 * t) + k.chi_cdf(-t);
  return {0.0, -kTwoPi * s};
}

double PsiFunction::phi_pv(double x) const {
  if (kind_ != PsiKind::Pv) throw DomainError("phi_pv: only defined for the p.v. decomposition");
  return tables_->phi_pv(std::abs(x));
}

double PsiFunction::varphi(double x) const { return phi_pv(0.5 * x) - phi_pv(x); }

double PsiFunction::x_max() const { return tables_->psi.x_max(); }

double PsiFunction::tail_bound() const { return tables_->psi.tail_max(8.0); }

// ---------------------------------------------------------------- pairing

DyadicSum dyadic_pairing(const PsiFunction& psi, const std::function<double(double)>& g, const DyadicOptions& opts) {
  if (opts.j_max < opts.j_min) throw DomainError("dyadic_pairing: empty window");
  // Positive half-line nodes: geometric panels near 0, uniform ones beyond 1.
  RealVec edges;
  for (int e = -45; e <= 0; ++e) edges.push_back(std::ldexp(1.0, e));
  for (double y = 1.0 + kPanelWidth; y <= psi.x_max() + 1e-9; y += kPanelWidth) edges.push_back(y);
  QuadRule r = composite_gl_edges(edges, opts.panel_order);
  const double parity = psi.kind() == PsiKind::Pv ? -1.0 : 1.0;
  RealVec wpsi(r.x.size());
  for (std::size_t i = 0; i < r.x.size(); ++i) wpsi[i] = r.w[i] * psi(r.x[i]);

  auto term = [&](int j) {
    const double s = std::ldexp(1.0, j);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      if (wpsi[i] == 0.0) continue;
      double y = s * r.x[i];
      acc += wpsi[i] * (g(y) + parity * g(-y));
    }
    return acc;
  };

  DyadicSum out;
  out.j_lo = opts.j_min;
  out.j_hi = opts.j_max;
  const int n = opts.j_max - opts.j_min + 1;
  RealVec terms(n, 0.0);
  std::vector<bool> done(n, false);

  if (!opts.early_stop) {
    for (int j = opts.j_min; j <= opts.j_max; ++j) {
      terms[j - opts.j_min] = term(j);
      done[j - opts.j_min] = true;
    }
  } else {
    double running = 0.0, peak = 0.0;
    int lo = opts.j_max + 1, hi = opts.j_min - 1;
    auto sweep = [&](int start, int step, int stop) {
      int quiet = 0;
      for (int j = start; step > 0 ? j <= stop : j >= stop; j += step) {
        double t = term(j);
        terms[j - opts.j_min] = t;
        done[j - opts.j_min] = true;
        lo = std::min(lo, j);
        hi = std::max(hi, j);
        running += t;
        peak = std::max(peak, std::abs(t));
        if (std::abs(t) < opts.rel_stop * std::max(std::abs(running), peak)) {
          if (++quiet >= 3) break;
        } else {
          quiet = 0;
        }
      }
    };
    int mid = std::clamp(0, opts.j_min, opts.j_max);
    sweep(mid, 1, opts.j_max);
    if (mid - 1 >= opts.j_min) sweep(mid - 1, -1, opts.j_min);
    out.j_lo = lo;
    out.j_hi = hi;
  }

  for (int j = out.j_lo; j <= out.j_hi; ++j) {
    out.terms.push_back(terms[j - opts.j_min]);
    out.value += terms[j - opts.j_min];
  }
  auto tail = [](double last, double prev) {
    double a = std::abs(last), b = std::abs(prev);
    if (b > 0.0 && a < b) {
      double ratio = a / b;
      return a * ratio / (1.0 - ratio);
    }
    return a;
  };
  const auto& t = out.terms;
  if (t.size() >= 2) out.tail_estimate = tail(t.front(), t[1]) + tail(t.back(), t[t.size() - 2]);
  return out;
}

}  // namespace usol
