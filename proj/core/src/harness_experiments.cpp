#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "usol/bump.hpp"
#include "usol/extremizers.hpp"
#include "usol/harness.hpp"
#include "usol/surface_ops.hpp"

namespace usol::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Check check(std::string label, std::string kind, std::string column, double lo, double hi, std::string anchor,
            std::string filter_column = "", std::string filter_value = "", std::string x_column = "") {
  Check c;
  c.label = std::move(label);
  c.kind = std::move(kind);
  c.column = std::move(column);
  c.x_column = std::move(x_column);
  c.filter_column = std::move(filter_column);
  c.filter_value = std::move(filter_value);
  c.lo = lo;
  c.hi = hi;
  c.anchor = std::move(anchor);
  return c;
}

// Slope check with a symmetric band; the band half-width can be overridden by tol.<label>.
Check slope_check(const ExperimentConfig& cfg, const std::string& label, const std::string& x, const std::string& y,
                  double target, double band, const std::string& anchor, const std::string& fcol = "",
                  const std::string& fval = "") {
  double b = cfg.tol(label, band);
  return check(label, "slope", y, target - b, target + b, anchor, fcol, fval, x);
}

Check upper_check(const ExperimentConfig& cfg, const std::string& label, const std::string& kind,
                  const std::string& column, double bound, const std::string& anchor, const std::string& fcol = "",
                  const std::string& fval = "") {
  return check(label, kind, column, -kInf, cfg.tol(label, bound), anchor, fcol, fval);
}

void require_d3(const ExperimentConfig& cfg, const std::string& name) {
  if (cfg.d != 3 || cfg.k != 1) throw ConfigError(name + ": implemented for dim 3, signature-k 1");
}

RealVec lambdas_or(const ExperimentConfig& cfg, int e_lo, int e_hi_quick, int e_hi_full) {
  if (!cfg.lambdas.empty()) return cfg.lambdas;
  RealVec out;
  int e_hi = cfg.profile == Profile::Full ? e_hi_full : e_hi_quick;
  for (int e = e_lo; e <= e_hi; ++e) out.push_back(std::ldexp(1.0, -e));
  return out;
}

const PsiFunction& psi_delta() {
  static const PsiFunction p = build_delta_psi(BumpKit::standard());
  return p;
}
const PsiFunction& psi_pv() {
  static const PsiFunction p = build_pv_psi(BumpKit::standard());
  return p;
}

// ---- 1: dyadic delta identity ---------------------------------------------

ExperimentReport dyadic_delta(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.table.columns = {"test", "g0", "dyadic_sum", "error", "tail_estimate"};
  struct T {
    const char* name;
    std::function<double(double)> g;
  };
  std::vector<T> tests{
      {"gaussian", [](double x) { return std::exp(-kPi * x * x); }},
      {"shifted_gaussian", [](double x) { return std::exp(-kPi * (x - 0.3) * (x - 0.3)); }},
      {"modulated_gaussian", [](double x) { return std::cos(kTwoPi * x) * std::exp(-kPi * x * x); }},
  };
  DyadicOptions o;
  o.j_min = -24;
  o.j_max = 24;
  for (const auto& t : tests) {
    DyadicSum s = dyadic_pairing(psi_delta(), t.g, o);
    double g0 = t.g(0.0);
    r.table.add_row({t.name, fmt(g0), fmt(s.value), fmt(std::abs(s.value - g0)), fmt(s.tail_estimate)});
  }
  r.checks.push_back(upper_check(cfg, "identity_error", "max", "error", 1e-7,
                                 "g(0) = sum_j 2^-j int psi(2^-j x) g(x) dx over j in [-24, 24]"));
  return r;
}

// ---- 2: principal value identity and support --------------------------------

ExperimentReport pv_identity(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.table.columns = {"quantity", "value"};
  const PsiFunction& psi = psi_pv();
  DyadicOptions o;
  o.j_min = -24;
  o.j_max = 24;
  // p.v. int g(x)/x dx for odd g(x) = x h(x) equals int h.
  auto g1 = [](double x) { return x * std::exp(-kPi * x * x); };
  auto g2 = [](double x) { return (x + x * x * x) * std::exp(-kPi * x * x); };
  double e1 = std::abs(dyadic_pairing(psi, g1, o).value - 1.0);
  double e2 = std::abs(dyadic_pairing(psi, g2, o).value - (1.0 + 1.0 / (2.0 * kPi)));
  double even = std::abs(dyadic_pairing(psi, [](double x) { return std::exp(-kPi * x * x); }, o).value);
  double inner = 0.0, outer = 0.0;
  for (int i = 0; i <= 4900; ++i) {
    double t = i * 1e-4;
    inner = std::max({inner, std::abs(psi.hat(t)), std::abs(psi.hat(-t))});
  }
  for (double t = 2.01; t <= 64.0; t += 1e-3) outer = std::max({outer, std::abs(psi.hat(t)), std::abs(psi.hat(-t))});
  double odd = 0.0;
  for (double x = 1e-3; x < psi.x_max(); x *= 1.01) odd = std::max(odd, std::abs(psi(x) + psi(-x)));
  r.table.add_row({"identity_error_gaussian", fmt(e1)});
  r.table.add_row({"identity_error_cubic", fmt(e2)});
  r.table.add_row({"even_pairing", fmt(even)});
  r.table.add_row({"hat_sup_inner", fmt(inner)});
  r.table.add_row({"hat_sup_outer", fmt(outer)});
  r.table.add_row({"oddness_defect", fmt(odd)});
  const std::string pv = "p.v. int g(x)/x dx = sum_j int psi(y) g(2^j y) dy";
  r.checks.push_back(upper_check(cfg, "identity_gaussian", "value", "value", 1e-7, pv, "quantity", "identity_error_gaussian"));
  r.checks.push_back(upper_check(cfg, "identity_cubic", "value", "value", 1e-7, pv, "quantity", "identity_error_cubic"));
  r.checks.push_back(upper_check(cfg, "even_vanishes", "value", "value", 1e-7, "p.v. pairing of an even function is 0",
                                 "quantity", "even_pairing"));
  r.checks.push_back(upper_check(cfg, "hat_inner", "value", "value", 1e-10, "psi^(t) = 0 for |t| <= 1/2", "quantity",
                                 "hat_sup_inner"));
  r.checks.push_back(upper_check(cfg, "hat_outer", "value", "value", 1e-10, "psi^(t) = 0 for |t| >= 2", "quantity",
                                 "hat_sup_outer"));
  r.checks.push_back(check("oddness", "value", "value", 0.0, 0.0, "psi(-x) = -psi(x)", "quantity", "oddness_defect"));
  return r;
}

// ---- 3: ABC completeness --------------------------------------------------------

ExperimentReport abc_completeness(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.table.columns = {"re_z", "im_z", "l0", "lmin", "lmax", "max_residual"};
  QuadraticForm form(cfg.d, cfg.k);
  Grid g = Grid::cubic(cfg.d, cfg.n, cfg.L);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  int made = 0;
  RealVec xi(cfg.d);
  while (made < 5) {
    double th = ang(rng);
    SpectralParameter z{std::cos(th), std::sin(th)};
    if (std::abs(z.b) < 0.1) continue;
    ++made;
    auto [eps, sup] = grid_range_of_symbol(g, form, z.a);
    LevelWindow w = default_window(eps, sup, psi_pv());
    AbcDecomposition abc = decompose_abc(form, z, psi_pv(), w);
    double mx = 0.0;
    for (int i = 0; i < 1000; ++i) {
      g.coords(pick(rng), true, xi.data());
      double t = eval_Q(form, xi) + z.a;
      mx = std::max(mx, std::abs(abc.residual(t)));
    }
    r.table.add_row({fmt(z.a), fmt(z.b), fmt(abc.l0()), fmt(w.lmin), fmt(w.lmax), fmt(mx)});
  }
  r.checks.push_back(upper_check(cfg, "residual", "max", "max_residual", 1e-9,
                                 "t/(t^2+b^2) = sum_{l<l0} A_l + sum_{l>=l0} (B_l + C_l)"));
  return r;
}

// ---- 4, 5: kernel support and decay -------------------------------------------------

RealVec stationary_point(const GraphChart& ch, double eta1, double xd) {
  const int n = ch.param_dim();
  RealVec et(n, 0.0), gr(n);
  et[0] = eta1;
  ch.gradient(et.data(), gr.data());
  RealVec x(n + 1);
  for (int i = 0; i < n; ++i) x[i] = -xd * gr[i];
  x[n] = xd;
  return x;
}

// kernel_K with the evaluation point attached to convergence failures.
double abs_kernel(const LocalizedMultiplier& lm, const RealVec& x) {
  try {
    return std::abs(kernel_K(lm, x));
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string(e.what()) + " (kernel at lambda=" + fmt(lm.lambda) + ", rho=" + fmt(lm.rho()) +
                           ", x=(" + fmt(x[0]) + ", " + fmt(x[1]) + ", " + fmt(x[2]) + "))");
  }
}

ExperimentReport kernel_support(const ExperimentConfig& cfg) {
  require_d3(cfg, "kernel-support");
  ExperimentReport r;
  r.table.columns = {"rho", "lambda", "m", "region", "x1", "x2", "x3", "abs_K", "ratio_to_peak", "slab_lo", "slab_hi"};
  QuadraticForm form(3, 1);
  RealVec lams = cfg.lambdas.empty() ? RealVec{0.125, 1.0 / 32, 1.0 / 128} : cfg.lambdas;
  for (double rho : {1.0, std::ldexp(1.0, -12)})
    for (double lam : lams)
      for (MChoice mc : {MChoice::ConstantOne, MChoice::TwoEta1}) {
        LocalizedMultiplier lm{lam, mc, psi_pv(), GraphChart(form, rho)};
        auto [s_lo, s_hi] = lm.kernel_slab();
        std::vector<std::pair<RealVec, double>> inside, outside;
        double peak = 0.0;
        // Interior samples stay away from the slab edges, where the amplitude cutoff is steep.
        for (double xd : log_spaced(s_lo * 1.5, s_hi / 1.5, 8))
          for (double e1 : {1.3, 1.6}) {
            RealVec x = stationary_point(lm.chart, e1, xd);
            double v = abs_kernel(lm, x);
            peak = std::max(peak, v);
            inside.emplace_back(x, v);
          }
        for (double f : {0.1, 0.5, 0.9, 0.99})
          for (double s : {1.0, -1.0}) {
            RealVec x = stationary_point(lm.chart, 1.5, s * f * s_lo);
            outside.emplace_back(x, abs_kernel(lm, x));
          }
        for (double f : {1.01, 1.5, 3.0})
          for (double s : {1.0, -1.0}) {
            RealVec x = stationary_point(lm.chart, 1.5, s * f * s_hi);
            outside.emplace_back(x, abs_kernel(lm, x));
          }
        const std::string ms = mc == MChoice::ConstantOne ? "one" : "two_eta1";
        for (auto* set : {&inside, &outside})
          for (const auto& [x, v] : *set)
            r.table.add_row({fmt(rho), fmt(lam), ms, set == &inside ? "inside" : "outside", fmt(x[0]), fmt(x[1]),
                             fmt(x[2]), fmt(v), fmt(v / peak), fmt(s_lo), fmt(s_hi)});
      }
  r.checks.push_back(upper_check(cfg, "outside_slab", "max", "ratio_to_peak", 1e-12,
                                 "K(x) = 0 unless m_min/(2 lambda) <= |x_d| <= 2 m_max/lambda", "region", "outside"));
  r.checks.push_back(check("peak_positive", "min", "abs_K", 1e-300, kInf, "K does not vanish on the slab", "region",
                           "inside"));
  return r;
}

ExperimentReport kernel_decay(const ExperimentConfig& cfg) {
  require_d3(cfg, "kernel-decay");
  ExperimentReport r;
  r.table.columns = {"rho", "lambda", "sup_abs_K", "x1", "x2", "x3"};
  QuadraticForm form(3, 1);
  RealVec lams = lambdas_or(cfg, 3, 7, 8);
  const double small = std::ldexp(1.0, -12);
  for (double rho : {1.0, small})
    for (double lam : lams) {
      LocalizedMultiplier lm{lam, MChoice::ConstantOne, psi_pv(), GraphChart(form, rho)};
      double best = 0.0;
      RealVec bx;
      for (double xd : log_spaced(0.5 / lam * 1.02, 2.0 / lam * 0.98, 12))
        for (double e1 : {1.3, 1.45, 1.6, 1.75}) {
          RealVec x = stationary_point(lm.chart, e1, xd);
          double v = abs_kernel(lm, x);
          if (v > best) {
            best = v;
            bx = x;
          }
        }
      MaxResult m = nelder_mead_max([&](const RealVec& x) { return std::abs(kernel_K(lm, x)); }, bx,
                                    {0.5, 0.5, 0.1 / lam}, 150, 1e-3);
      if (m.value < best) m = {bx, best, 0};
      r.table.add_row({fmt(rho), fmt(lam), fmt(m.value), fmt(m.x[0]), fmt(m.x[1]), fmt(m.x[2])});
    }
  r.checks.push_back(slope_check(cfg, "slope_rho_1", "lambda", "sup_abs_K", 2.0, 0.15,
                                 "sup|K| <= C lambda^{(d+1)/2} |rho|^{-1/2}", "rho", fmt(1.0)));
  r.checks.push_back(slope_check(cfg, "slope_rho_small", "lambda", "sup_abs_K", 1.5, 0.15,
                                 "sup|K| <= C lambda^{d/2} for |rho| << lambda", "rho", fmt(small)));
  return r;
}

// ---- 6: oscillatory decay -------------------------------------------------------------

ExperimentReport oscillatory_decay(const ExperimentConfig& cfg) {
  require_d3(cfg, "oscillatory-decay");
  ExperimentReport r;
  r.table.columns = {"rho", "x_d", "abs_I"};
  QuadraticForm form(3, 1);
  for (double rho : {1.0, 1e-4}) {
    GraphChart ch(form, rho);
    for (double xd : log_spaced(10.0, 1000.0, cfg.profile == Profile::Full ? 13 : 9)) {
      RealVec x = stationary_point(ch, 1.5, xd);
      r.table.add_row({fmt(rho), fmt(xd), fmt(std::abs(oscillatory_I(x, ch)))});
    }
  }
  r.checks.push_back(slope_check(cfg, "slope_rho_1", "x_d", "abs_I", -1.0, 0.1,
                                 "|I(x)| <= C |x_d|^{-(d-1)/2} for |rho| ~ 1", "rho", fmt(1.0)));
  r.checks.push_back(slope_check(cfg, "slope_rho_small", "x_d", "abs_I", -0.5, 0.1,
                                 "|I(x)| <= C |x_d|^{-(d-2)/2} uniformly in rho", "rho", fmt(1e-4)));
  return r;
}

// ---- 7: T lambda scaling --------------------------------------------------------------

ExperimentReport tt_scaling(const ExperimentConfig& cfg) {
  require_d3(cfg, "tt-scaling");
  ExperimentReport r;
  r.table.columns = {"lambda", "norm_q", "norm_2", "ratio"};
  const double sigma = 0.5 * (cfg.d - 2), q = 2.0 * (sigma + 1.0) / sigma;
  GraphChart ch(QuadraticForm(3, 1), 1.0);
  TtStarProbe probe(ch, psi_delta(), q);
  for (double lam : lambdas_or(cfg, 3, 7, 9)) {
    TtStarResult t = probe.evaluate(lam);
    r.table.add_row({fmt(lam), fmt(t.norm_q), fmt(t.norm_2), fmt(t.ratio)});
  }
  r.notes.push_back("q = 2(s+1)/s with s = (d-2)/2; the ratio is a lower bound for the L^2 -> L^q norm");
  r.checks.push_back(slope_check(cfg, "lambda_slope", "lambda", "ratio", 0.5, 0.15,
                                 "||T f||_{2(s+1)/s} <= C lambda^{1/2} ||f||_2 with s = (d-2)/2"));
  return r;
}

// ---- 8: polar coordinates -------------------------------------------------------------

ExperimentReport polar_identity(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.table.columns = {"test", "polar", "cartesian", "rel_error"};
  const int d = cfg.d;
  QuadraticForm form(d, cfg.k);
  std::vector<std::pair<std::string, std::function<double(const double*)>>> tests;
  tests.emplace_back("gaussian", [d](const double* x) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += x[i] * x[i];
    return std::exp(-kPi * s);
  });
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ua(0.6, 3.0), uc(-0.5, 0.5), uw(-0.6, 0.6);
  for (int t = 0; t < 2; ++t) {
    RealVec a(d), c(d), w(d);
    for (int i = 0; i < d; ++i) {
      a[i] = ua(rng);
      c[i] = uc(rng);
      w[i] = uw(rng);
    }
    tests.emplace_back("random_" + std::to_string(t + 1), [d, a, c, w](const double* x) {
      double s = 0.0, p = 0.0;
      for (int i = 0; i < d; ++i) {
        s += a[i] * (x[i] - c[i]) * (x[i] - c[i]);
        p += w[i] * x[i];
      }
      return std::exp(-s) * (1.0 + 0.5 * std::cos(kTwoPi * p));
    });
  }
  const int n_cart = d == 3 ? 96 : 40;
  for (const auto& [name, g] : tests) {
    PolarResult p = polar_integrate(g, form);
    double c = cartesian_integrate(g, d, 9.0, n_cart);
    r.table.add_row({name, fmt(p.value), fmt(c), fmt(std::abs(p.value - c) / std::abs(c))});
  }
  r.checks.push_back(upper_check(cfg, "polar_vs_cartesian", "max", "rel_error", 1e-3,
                                 "int g = sum_+- int_0^inf int g(r theta) r^{d-1} dsigma_+-(theta) dr"));
  return r;
}

// ---- 9: chart vs mollified restriction-extension ----------------------------------

ExperimentReport chart_vs_mollified(const ExperimentConfig& cfg) {
  require_d3(cfg, "chart-vs-mollified");
  ExperimentReport r;
  r.table.columns = {"eps", "rel_l2_diff", "has_ratio", "halving_ratio"};
  QuadraticForm form(3, 1);
  const double s = 1.0 / std::sqrt(2.0), e1 = 1.5, ed = 1.0 / 3.0;
  const RealVec x0{s * (e1 - ed), 0.0, s * (e1 + ed)};
  FrequencyFn fh = [&](const double* x) -> cplx {
    double q = 0.0;
    for (int c = 0; c < 3; ++c) q += (x[c] - x0[c]) * (x[c] - x0[c]);
    return bump::bump(std::sqrt(q) / 0.3);
  };
  GraphChart gc(form, 1.0, GraphDomain{1.15, 1.85, 1.0, 0.35}, 1.0);
  SurfaceAtlas atlas = SurfaceAtlas::single(SurfaceChart::null_frame(gc, ChartWeight::Indicator));
  Grid g = Grid::cubic(3, 16, 8.0);
  SampledField E = restrict_extend_chart(fh, atlas, g);
  RealVec eps{1e-3, 5e-4, 2.5e-4, 1.25e-4};
  auto M = restrict_extend_mollified_pointwise(fh, form, 1.0, eps, {x0[0] - 0.3, -0.3}, {x0[0] + 0.3, 0.3},
                                               x0[2] - 0.3, x0[2] + 0.3, g);
  double nE = 0.0;
  for (const auto& v : E.values()) nE += std::norm(v);
  double prev = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    double dsum = 0.0;
    for (std::size_t j = 0; j < E.size(); ++j) dsum += std::norm(E[j] - M[i][j]);
    double rel = std::sqrt(dsum / nE);
    r.table.add_row({fmt(eps[i]), fmt(rel), i ? "1" : "0", i ? fmt(rel / prev) : "nan"});
    prev = rel;
  }
  r.checks.push_back(upper_check(cfg, "diff_at_1e-3", "value", "rel_l2_diff", 0.02,
                                 "(1/pi) eps/((Q-rho)^2+eps^2) -> delta(Q-rho) as eps -> 0"));
  double band = cfg.tol("halving", 0.1);
  r.checks.push_back(check("halving", "min", "halving_ratio", 0.5 - band, 0.5 + band,
                           "difference is O(eps): halving eps halves it", "has_ratio", "1"));
  r.checks.push_back(check("halving_max", "max", "halving_ratio", 0.5 - band, 0.5 + band,
                           "difference is O(eps): halving eps halves it", "has_ratio", "1"));
  return r;
}

// ---- 10, 11: Knapp and g_lambda regressions ---------------------------------------------

std::vector<std::pair<std::string, ExponentPair>> pairs_with(const ExperimentConfig& cfg,
                                                             std::vector<std::pair<std::string, ExponentPair>> base) {
  if (cfg.pair) base.emplace_back("config", *cfg.pair);
  return base;
}

ExperimentReport sharpness_knapp(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.table.columns = {"pair", "lambda", "norm_q", "norm_p", "ratio", "min_abs_Ef_over_lambda2"};
  const int d = cfg.d;
  auto pairs = pairs_with(cfg, {{"1/2,1/2", {Rational(1, 2), Rational(1, 2)}}, {"F", vertex(d, 'F')}});
  RealVec lams = lambdas_or(cfg, 3, 7, 9);
  for (double lam : lams) {
    KnappFamily f = make_knapp(d, cfg.k, lam);
    SurfaceAtlas at = f.atlas();
    RealVec pts = f.dual_box.midpoints(5);
    RealVec a;
    for (std::size_t i = 0; i < pts.size() / d; ++i)
      a.push_back(std::abs(restrict_extend_at([&](const double* xi) { return f.fhat(xi); }, at,
                                              std::span<const double>(&pts[d * i], d))));
    double mn = *std::min_element(a.begin(), a.end()) / std::pow(lam, d - 1);
    for (const auto& [name, pr] : pairs) {
      double nq = box_norm_from_samples(a, f.dual_box.volume(), pr.q()), np = f.norm_p(pr.p());
      r.table.add_row({name, fmt(lam), fmt(nq), fmt(np), fmt(nq / np), fmt(mn)});
    }
  }
  for (const auto& [name, pr] : pairs) {
    double target = predicted_slopes(d, pr).knapp_slope;
    r.checks.push_back(slope_check(cfg, "slope_" + name, "lambda", "ratio", target, 0.1,
                                   "||Ef||_q/||f||_p ~ lambda^{(d+1)(1/p-1/q)-2} on the dual slab", "pair", name));
  }
  return r;
}

ExperimentReport sharpness_glambda(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.table.columns = {"pair", "lambda", "norm_q", "norm_p", "ratio", "min_abs_Eg_over_lambda2_R"};
  const int d = cfg.d;
  auto pairs = pairs_with(cfg, {{"1,1/4", {Rational(1), Rational(1, 4)}}, {"F", vertex(d, 'F')}});
  QuadraticForm form(d, cfg.k);
  for (double lam : lambdas_or(cfg, 3, 7, 9)) {
    GLambdaFamily f = make_glambda(d, cfg.k, lam);
    SurfaceAtlas at = f.atlas();
    RealVec pts = f.R_dual.midpoints(5);
    RealVec a;
    for (std::size_t i = 0; i < pts.size() / d; ++i) {
      RealVec x = rotate_from_graph(form, std::span<const double>(&pts[d * i], d));
      a.push_back(std::abs(restrict_extend_at([&](const double* xi) { return f.ghat_xi(xi); }, at, x)));
    }
    double mn = *std::min_element(a.begin(), a.end()) / (lam * lam * f.R.volume());
    for (const auto& [name, pr] : pairs) {
      double nq = box_norm_from_samples(a, f.R_dual.volume(), pr.q()), np = f.norm_p(pr.p());
      r.table.add_row({name, fmt(lam), fmt(nq), fmt(np), fmt(nq / np), fmt(mn)});
    }
  }
  for (const auto& [name, pr] : pairs) {
    double target = predicted_slopes(d, pr).glambda_slope;
    r.checks.push_back(slope_check(cfg, "slope_" + name, "lambda", "ratio", target, 0.1,
                                   "lambda^{2-d+d/q} <= C lambda^{-d+d/p}: ratio ~ lambda^{2-d/p+d/q}", "pair", name));
  }
  return r;
}

// ---- 12: stationary and cone necessity ------------------------------------------------

void add_shells(ExperimentReport& r, const std::vector<RealVec>& sh, const RealVec& edges, const RealVec& qs) {
  for (std::size_t i = 0; i < sh.size(); ++i)
    for (std::size_t j = 0; j < qs.size(); ++j)
      r.table.add_row({"shell_q" + fmt(qs[j]), fmt(std::sqrt(edges[i] * edges[i + 1])), fmt(sh[i][j])});
}

ExperimentReport sharpness_stationary(const ExperimentConfig& cfg) {
  require_d3(cfg, "sharpness-stationary");
  ExperimentReport r;
  r.table.columns = {"series", "x_d", "value"};
  StationaryFamily st = make_stationary(3, 1);
  for (double x : log_spaced(10.0, 1000.0, 9)) r.table.add_row({"axis", fmt(x), fmt(st.axis_value(x))});
  const RealVec qs{2.5, 4.0};
  RealVec edges = log_spaced(10.0, 1000.0, 8);
  add_shells(r, shell_masses([&](double x) { return st.slice_mass(x, qs); }, edges, qs.size()), edges, qs);
  const double d = 3;
  r.checks.push_back(slope_check(cfg, "axis_decay", "x_d", "value", -(d - 1) / 2, 0.1,
                                 "|Ef(0, x_d)| ~ |x_d|^{-(d-1)/2}", "series", "axis"));
  r.checks.push_back(slope_check(cfg, "shell_q2.5", "x_d", "value", d - 2.5 * (d - 1) / 2, 0.15,
                                 "int_{T<x_d<2T} |Ef|^q ~ T^{d - q(d-1)/2}", "series", "shell_q2.5"));
  r.checks.push_back(check("shell_q4", "slope", "value", -kInf, 0.0,
                           "int_{T<x_d<2T} |Ef|^q ~ T^{d - q(d-1)/2} decays for q > 2d/(d-1)", "series", "shell_q4",
                           "x_d"));
  return r;
}

ExperimentReport sharpness_cone(const ExperimentConfig& cfg) {
  require_d3(cfg, "sharpness-cone");
  ExperimentReport r;
  r.table.columns = {"series", "x_d", "value"};
  ConeFamily cone = make_cone_K(3, 1, 8.0);
  for (double x : log_spaced(1e4, 1e6, 9)) {
    double p[3] = {0.0, 0.0, x};
    r.table.add_row({"axis", fmt(x), fmt(std::abs(cone.K(std::span<const double>(p, 3))))});
  }
  const RealVec qs{4.0, 5.0};
  RealVec edges = log_spaced(1e4, 1e6, 8);
  add_shells(r, shell_masses([&](double x) { return cone.slice_mass(x, qs); }, edges, qs.size()), edges, qs);
  for (double xd : {20.0, 40.0}) {
    double p[3] = {0.1 - 0.25 / (2.0 * xd), 0.5, xd};
    cplx a = cone.K(std::span<const double>(p, 3)), b = cone.K_direct(std::span<const double>(p, 3));
    r.table.add_row({"reduction_check", fmt(xd), fmt(std::abs(a - b) / std::abs(b))});
  }
  const double d = 3;
  r.notes.push_back("lambda = " + fmt(cone.lambda) + ", aperture = " + fmt(cone.aperture()) + ", B = " + fmt(cone.B()));
  r.checks.push_back(slope_check(cfg, "axis_decay", "x_d", "value", -(d - 2) / 2, 0.1, "|K(0, x_d)| ~ |x_d|^{-(d-2)/2}",
                                 "series", "axis"));
  r.checks.push_back(slope_check(cfg, "shell_q4", "x_d", "value", (d - 1) - 4.0 * (d - 2) / 2, 0.1,
                                 "int_{U, T<x_d<2T} |K|^q ~ T^{(d-1) - q(d-2)/2}; zero at q = 2(d-1)/(d-2)", "series",
                                 "shell_q4"));
  r.checks.push_back(slope_check(cfg, "shell_q5", "x_d", "value", (d - 1) - 5.0 * (d - 2) / 2, 0.15,
                                 "int_{U, T<x_d<2T} |K|^q ~ T^{(d-1) - q(d-2)/2}", "series", "shell_q5"));
  r.checks.push_back(upper_check(cfg, "reduction", "max", "value", 1e-6,
                                 "Fresnel reduction of K agrees with direct quadrature", "series", "reduction_check"));
  return r;
}

// ---- 13: uniform sweep ----------------------------------------------------------------

ExperimentReport uniform_sweep_experiment(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.table.columns = {"mode", "pair", "re_z", "im_z", "abs_b", "lower_bound", "best_start"};
  QuadraticForm form(cfg.d, cfg.k);
  auto zs = parse_z_sweep(cfg.z_sweep);
  struct Run {
    std::string mode;
    ExponentPair pair;
    Grid grid;
    NormMode nm;
    double threshold;
  };
  const int n_lor = std::max(8, cfg.n / 2);
  std::vector<Run> runs{
      {"lebesgue", cfg.pair.value_or(vertex(cfg.d, 'F')), Grid::cubic(cfg.d, cfg.n, cfg.L), NormMode::Lebesgue,
       cfg.tol("ratio_lebesgue", 5.0)},
      {"lorentz", vertex(cfg.d, 'B'), Grid::cubic(cfg.d, n_lor, cfg.L / 2), NormMode::Lorentz,
       cfg.tol("ratio_lorentz", 8.0)},
  };
  for (const auto& run : runs) {
    NormProbe probe;
    probe.mode = run.nm;
    probe.iterations = run.nm == NormMode::Lebesgue ? 30 : 20;
    probe.seed = cfg.seed;
    SweepOptions so;
    so.grid = run.grid;
    so.threshold = run.threshold;
    SweepReport rep = uniform_sweep(form, run.pair, zs, probe, so);
    for (const auto& e : rep.entries)
      r.table.add_row({run.mode, run.pair.to_string(), fmt(e.z.a), fmt(e.z.b), fmt(std::abs(e.z.b)),
                       fmt(e.lower_bound), e.best_start});
  }
  r.notes.push_back("ratio thresholds are acceptance settings; the uniform constant itself is not quantified");
  const std::string th = "||(Q(D)+z)^{-1}||_{p->q} <= C independent of z, |z| >= 1";
  r.checks.push_back(check("ratio_lebesgue", "ratio", "lower_bound", 0.0, cfg.tol("ratio_lebesgue", 5.0), th, "mode",
                           "lebesgue"));
  r.checks.push_back(check("ratio_lorentz", "ratio", "lower_bound", 0.0, cfg.tol("ratio_lorentz", 8.0),
                           "||(Q(D)+z)^{-1}||_{L^{p,1}->L^{q,inf}} <= C at the vertex B", "mode", "lorentz"));
  if (cfg.z_sweep.rfind("circle:", 0) == 0) {
    const double floor_b = std::sin(kPi / static_cast<double>(zs.size()));
    r.checks.push_back(check("abs_b_floor", "min", "abs_b", floor_b * (1 - 1e-12), kInf,
                             "angles (2j+1) pi/N keep |b| >= sin(pi/N)"));
  }
  r.checks.push_back(check("lorentz_finite", "max", "lower_bound", 0.0, 1e300, "restricted weak type bound is finite",
                           "mode", "lorentz"));
  return r;
}

// ---- 14: estimator sanity ------------------------------------------------------------

ExperimentReport normest_sanity(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.table.columns = {"test", "estimate", "exact", "abs_error", "iterations"};
  Grid g = Grid::cubic(3, 16, 4.0);
  NormProbe pr;
  pr.seed = cfg.seed;
  pr.iterations = 10;
  NormEstimate e = opnorm_lower(identity_operator(g), pr);
  r.table.add_row({"identity", fmt(e.value), fmt(1.0), fmt(std::abs(e.value - 1.0)), fmt(int(e.trace.size()))});

  CplxVec m(g.size());
  RealVec c(3);
  double sup = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.coords(i, true, c.data());
    double r2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    m[i] = std::exp(-r2) * cplx(0.6, 0.8) * (1.0 + 0.3 * c[0]);
    sup = std::max(sup, std::abs(m[i]));
  }
  pr.iterations = 400;
  e = opnorm_lower(multiplier_operator(g, m, "gaussian-multiplier"), pr);
  r.table.add_row({"diagonal", fmt(e.value), fmt(sup), fmt(std::abs(e.value - sup)), fmt(int(e.trace.size()))});

  auto u = SampledField::sample(g, Space::Physical, [](const double* x) {
    return cplx(std::abs(x[0]) < 0.5 && std::abs(x[1]) < 1.0 ? 1.0 : 0.0);
  });
  auto v = SampledField::sample(g, Space::Physical, [](const double* x) {
    return cplx(x[2] > 0.0 && x[2] < 1.0 ? 1.0 : 0.0);
  });
  pr.p = 1.2;
  pr.q = 6.0;
  pr.iterations = 30;
  e = opnorm_lower(rank_one_operator(u, v), pr);
  // Equality in Hoelder: ||v||_q ||u||_{p'}, evaluated from the indicator measures.
  double mu = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    mu += std::abs(u[i]);
    mv += std::abs(v[i]);
  }
  const double cell = g.cell_volume(), pd = pr.p / (pr.p - 1.0);
  double exact = std::pow(mv * cell, 1.0 / pr.q) * std::pow(mu * cell, 1.0 / pd);
  r.table.add_row({"rank_one", fmt(e.value), fmt(exact), fmt(std::abs(e.value - exact)), fmt(int(e.trace.size()))});
  r.checks.push_back(upper_check(cfg, "identity", "value", "abs_error", 1e-10, "||I||_{2->2} = 1", "test", "identity"));
  r.checks.push_back(upper_check(cfg, "diagonal", "value", "abs_error", 1e-8, "||m(D)||_{2->2} = sup |m|", "test",
                                 "diagonal"));
  r.checks.push_back(upper_check(cfg, "rank_one", "value", "abs_error", 1e-6, "||<., u> v||_{p->q} = ||v||_q ||u||_{p'}",
                                 "test", "rank_one"));
  return r;
}

// ---- 15: region classifier -------------------------------------------------------------

ExperimentReport region(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.table.columns = {"name", "ip", "iq", "ip_value", "iq_value", "status", "expected"};
  const int d = cfg.d;
  auto rs = [](const Rational& q) {
    std::string s = std::to_string(q.numerator());
    return q.denominator() == 1 ? s : s + "/" + std::to_string(q.denominator());
  };
  // Expected statuses: corners B, B', C, C' are restricted weak type, F is interior
  // to the edge BB', every other named point lies outside the trapezoid.
  const std::map<std::string, RegionStatus> expected{
      {"A", RegionStatus::Fails},  {"B", RegionStatus::RestrictedWeakType},
      {"C", RegionStatus::RestrictedWeakType}, {"D", RegionStatus::Fails},
      {"E", RegionStatus::Fails},  {"F", RegionStatus::StrongType},
      {"G", RegionStatus::Fails},  {"O", RegionStatus::Fails},
      {"A'", RegionStatus::Fails}, {"B'", RegionStatus::RestrictedWeakType},
      {"C'", RegionStatus::RestrictedWeakType}, {"D'", RegionStatus::Fails},
  };
  std::vector<std::pair<std::string, ExponentPair>> pts;
  for (char c : std::string("ABCDEFGO")) pts.emplace_back(std::string(1, c), vertex(d, c));
  for (char c : std::string("ABCD")) pts.emplace_back(std::string(1, c) + "'", dual(vertex(d, c)));
  for (const auto& [name, p] : pts)
    r.table.add_row({name, rs(p.ip), rs(p.iq), fmt(p.ip_value()), fmt(p.iq_value()),
                     to_string(classify(d, p).status), to_string(expected.at(name))});
  r.checks.push_back(check("row_count", "count", "name", 12, 12, "eight named points and four duals"));
  r.checks.push_back(check("classification", "mismatches", "status", 0, 0,
                           "restricted weak type exactly at B, B', C, C'; strong type on the rest of the closed trapezoid",
                           "", "", "expected"));
  return r;
}

struct Entry {
  const char* name;
  int criterion;
  double budget;
  ExperimentReport (*fn)(const ExperimentConfig&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {"dyadic-delta", 1, 5, dyadic_delta},
      {"pv-identity", 2, 5, pv_identity},
      {"abc-completeness", 3, 10, abc_completeness},
      {"kernel-support", 4, 30, kernel_support},
      {"kernel-decay", 5, 300, kernel_decay},
      {"oscillatory-decay", 6, 300, oscillatory_decay},
      {"tt-scaling", 7, 300, tt_scaling},
      {"polar-identity", 8, 60, polar_identity},
      {"chart-vs-mollified", 9, 120, chart_vs_mollified},
      {"sharpness-knapp", 10, 300, sharpness_knapp},
      {"sharpness-glambda", 11, 300, sharpness_glambda},
      {"sharpness-stationary", 12, 300, sharpness_stationary},
      {"sharpness-cone", 12, 300, sharpness_cone},
      {"uniform-sweep", 13, 900, uniform_sweep_experiment},
      {"normest-sanity", 14, 30, normest_sanity},
      {"region", 15, 1, region},
  };
  return r;
}

const Entry& find_entry(const std::string& name) {
  for (const auto& e : registry())
    if (name == e.name) return e;
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.emplace_back(e.name);
  return out;
}

double experiment_budget(const std::string& name) { return find_entry(name).budget; }

int experiment_criterion(const std::string& name) { return find_entry(name).criterion; }

ExperimentReport run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  validate(cfg);
  const Entry& e = find_entry(name);
  auto t0 = std::chrono::steady_clock::now();
  ExperimentReport r = e.fn(cfg);
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.name = e.name;
  r.criterion = e.criterion;
  r.budget_s = e.budget;
  r.config = cfg.echo();
  evaluate_all(r);
  return r;
}

std::vector<std::string> subcommand_experiments(const std::string& sub) {
  static const std::map<std::string, std::vector<std::string>> m{
      {"region", {"region"}},
      {"dyadic-check", {"dyadic-delta"}},
      {"pv-check", {"pv-identity", "abc-completeness"}},
      {"kernel", {"kernel-support", "kernel-decay", "tt-scaling"}},
      {"oscillatory", {"oscillatory-decay"}},
      {"restrict-extend", {"chart-vs-mollified"}},
      {"polar-check", {"polar-identity"}},
      {"sharpness-glambda", {"sharpness-glambda"}},
      {"sharpness-knapp", {"sharpness-knapp"}},
      {"sharpness-stationary", {"sharpness-stationary"}},
      {"sharpness-cone", {"sharpness-cone"}},
      {"sweep", {"uniform-sweep"}},
      {"normest", {"normest-sanity"}},
  };
  if (sub == "all") return experiment_names();
  auto it = m.find(sub);
  if (it == m.end()) throw ConfigError("unknown subcommand '" + sub + "'");
  return it->second;
}

}  // namespace usol::harness
