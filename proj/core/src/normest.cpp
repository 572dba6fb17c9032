#include "usol/normest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "usol/bump.hpp"

namespace usol {

namespace {

cplx inner(const SampledField& f, const SampledField& g) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
  return s * f.grid().cell_volume();
}

SampledField random_field(const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  SampledField f(grid, Space::Physical);
  for (auto& v : f.values()) v = cplx(nd(rng), nd(rng));
  return f;
}

// |v|^{e-1} sgn(v), zeroing magnitudes below 1e-300.
void duality_map(SampledField& v, double e) {
  for (auto& c : v.values()) {
    double a = std::abs(c);
    c = a < 1e-300 ? cplx(0.0) : c * std::pow(a, e - 2.0);
  }
}

void normalize_p(SampledField& f, double p) {
  double n = lp_norm(f, p);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("opnorm_lower: zero iterate");
  for (auto& c : f.values()) c /= n;
}

void check_exponents(double p, double q) {
  if (!(p > 1.0 && p <= 2.0)) throw DomainError("opnorm_lower: p must lie in (1, 2]");
  if (!(q >= 2.0) || std::isinf(q)) throw DomainError("opnorm_lower: q must lie in [2, inf)");
}

void mark_monotone(NormEstimate& est) {
  est.monotone = true;
  for (std::size_t i = 1; i < est.trace.size(); ++i)
    if (est.trace[i] < est.trace[i - 1] * (1.0 - 1e-9)) est.monotone = false;
}

NormEstimate boyd(const LinearOperator& T, double p, double q, SampledField f, int iterations) {
  const double pd = p / (p - 1.0);
  NormEstimate est;
  normalize_p(f, p);
  int flat = 0;
  for (int it = 0; it < iterations; ++it) {
    SampledField u = T.apply(f);
    double r = lp_norm(u, q);
    est.trace.push_back(r);
    if (r > est.value) {
      est.value = r;
      est.best = f;
    }
    if (est.trace.size() > 1 && std::abs(r - est.trace[est.trace.size() - 2]) <= 1e-15 * r) {
      if (++flat >= 3) break;
    } else {
      flat = 0;
    }
    duality_map(u, q);
    SampledField v = T.adjoint(u);
    duality_map(v, pd);
    f = std::move(v);
    normalize_p(f, p);
  }
  mark_monotone(est);
  return est;
}

// ||sum c_i 1_{E_i}||_{p,1} for nested E_1 c E_2 c ... is sum c_i |E_i|^{1/p}.
NormEstimate lorentz_ascent(const LinearOperator& T, const NormProbe& probe, const SampledField& start) {
  const Grid& g = T.grid;
  const double cell = g.cell_volume();
  const std::size_t N = start.size();
  double mx = 0.0;
  for (const auto& v : start.values()) mx = std::max(mx, std::abs(v));
  if (!(mx > 0.0)) throw DomainError("opnorm_lower: zero iterate");

  const int L = std::max(1, probe.levels);
  RealVec thr(L);
  for (int i = 0; i < L; ++i) thr[i] = mx * std::pow(0.5, i);
  std::vector<SampledField> comp;
  RealVec measure;
  for (int i = 0; i < L; ++i) {
    SampledField e(g, Space::Physical);
    std::size_t count = 0;
    for (std::size_t j = 0; j < N; ++j) {
      double a = std::abs(start[j]);
      if (a >= thr[i]) {
        e[j] = start[j] / a;
        ++count;
      }
    }
    comp.push_back(std::move(e));
    measure.push_back(count * cell);
  }
  std::vector<SampledField> images;
  for (const auto& e : comp) images.push_back(T.apply(e));

  auto objective = [&](const RealVec& c) {
    double den = 0.0;
    for (int i = 0; i < L; ++i) den += c[i] * std::pow(measure[i], 1.0 / probe.p);
    if (!(den > 0.0)) return 0.0;
    RealVec mag(N);
    for (std::size_t j = 0; j < N; ++j) {
      cplx s = 0.0;
      for (int i = 0; i < L; ++i)
        if (c[i] != 0.0) s += c[i] * images[i][j];
      mag[j] = std::abs(s);
    }
    std::sort(mag.begin(), mag.end(), std::greater<>());
    return lorentz_qinf_sorted(mag, cell, probe.q) / den;
  };

  NormEstimate est;
  RealVec c(L);
  for (int i = 0; i < L; ++i) c[i] = i + 1 < L ? thr[i] - thr[i + 1] : thr[i];
  double best = objective(c);
  for (int i = 0; i < L; ++i) {
    RealVec e(L, 0.0);
    e[i] = 1.0;
    double v = objective(e);
    if (v > best) {
      best = v;
      c = e;
    }
  }
  est.trace.push_back(best);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int sweep = 0; sweep < probe.sweeps; ++sweep) {
    for (int i = 0; i < L; ++i) {
      double cmax = *std::max_element(c.begin(), c.end());
      double a = 0.0, b = std::max(4.0 * c[i], cmax);
      RealVec t = c;
      auto at = [&](double x) {
        t[i] = x;
        return objective(t);
      };
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = at(x1), f2 = at(x2);
      for (int it = 0; it < 24; ++it) {
        if (f1 < f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = at(x2);
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = at(x1);
        }
      }
      double xb = f1 > f2 ? x1 : x2, fb = std::max(f1, f2);
      if (fb > best) {
        best = fb;
        c[i] = xb;
      }
      est.trace.push_back(best);
    }
  }
  est.value = best;
  SampledField f(g, Space::Physical);
  for (int i = 0; i < L; ++i)
    for (std::size_t j = 0; j < N; ++j) f[j] += c[i] * comp[i][j];
  est.best = std::move(f);
  mark_monotone(est);
  return est;
}

}  // namespace

LinearOperator identity_operator(const Grid& grid) {
  auto id = [](const SampledField& f) { return f; };
  return {grid, id, id, "identity"};
}

LinearOperator multiplier_operator(const Grid& grid, CplxVec symbol, std::string name) {
  if (symbol.size() != grid.size()) throw DimensionError("multiplier_operator: symbol size mismatch");
  CplxVec conj_symbol(symbol.size());
  for (std::size_t i = 0; i < symbol.size(); ++i) conj_symbol[i] = std::conj(symbol[i]);
  auto fwd = [s = std::move(symbol)](const SampledField& f) { return apply_multiplier(f, s); };
  auto adj = [s = std::move(conj_symbol)](const SampledField& f) { return apply_multiplier(f, s); };
  return {grid, fwd, adj, std::move(name)};
}

LinearOperator rank_one_operator(const SampledField& u, const SampledField& v) {
  if (u.size() != v.size()) throw DimensionError("rank_one_operator: u and v live on different grids");
  auto fwd = [u, v](const SampledField& f) {
    cplx c = inner(f, u);
    SampledField out = v;
    for (auto& x : out.values()) x *= c;
    return out;
  };
  auto adj = [u, v](const SampledField& g) {
    cplx c = inner(g, v);
    SampledField out = u;
    for (auto& x : out.values()) x *= c;
    return out;
  };
  return {u.grid(), fwd, adj, "rank-one"};
}

LinearOperator resolvent_operator(const Grid& grid, const QuadraticForm& form, SpectralParameter z) {
  if (z.b == 0.0) throw DomainError("resolvent_operator: b = 0 needs the principal value route");
  return multiplier_operator(grid, resolvent_symbol(grid, form, z), "resolvent");
}

LinearOperator pv_operator(const Grid& grid, const QuadraticForm& form, double a, const PsiFunction& psi_pv) {
  auto [eps, sup] = grid_range_of_symbol(grid, form, a);
  LevelWindow w = default_window(eps, sup, psi_pv);
  return multiplier_operator(grid, pv_symbol(grid, form, a, psi_pv, w), "pv-resolvent");
}

bool is_linear(const LinearOperator& T, std::uint64_t seed, double tol) {
  SampledField f = random_field(T.grid, seed), g = random_field(T.grid, seed + 1);
  const cplx a(0.7, -1.3), b(-0.4, 2.1);
  SampledField h(T.grid, Space::Physical);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = a * f[i] + b * g[i];
  SampledField Th = T.apply(h), Tf = T.apply(f), Tg = T.apply(g);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    cplx rhs = a * Tf[i] + b * Tg[i];
    err = std::max(err, std::abs(Th[i] - rhs));
    scale = std::max(scale, std::abs(rhs));
  }
  return err <= tol * std::max(scale, 1e-300);
}

NormEstimate opnorm_lower(const LinearOperator& T, const NormProbe& probe) {
  check_exponents(probe.p, probe.q);
  if (probe.iterations < 1) throw ConfigError("opnorm_lower: iterations must be positive");
  if (!is_linear(T, probe.seed + 101)) throw DomainError("opnorm_lower: operator failed the superposition test");
  SampledField start = probe.warm_start ? *probe.warm_start : random_field(T.grid, probe.seed);
  if (start.size() != T.grid.size()) throw DimensionError("opnorm_lower: warm start lives on another grid");
  if (probe.mode == NormMode::Lebesgue) {
    NormEstimate est = boyd(T, probe.p, probe.q, std::move(start), probe.iterations);
    if (!est.monotone) log_warn("opnorm_lower: Rayleigh quotients decreased on " + T.name + "; keeping the best");
    return est;
  }
  if (std::isinf(probe.q)) throw DomainError("opnorm_lower: Lorentz mode needs finite q");
  NormEstimate warm = boyd(T, probe.p, probe.q, std::move(start), probe.iterations);
  return lorentz_ascent(T, probe, warm.best);
}

std::string to_string(WarmStart w) {
  switch (w) {
    case WarmStart::TtStar: return "tts";
    case WarmStart::Knapp: return "knapp";
    case WarmStart::Random: return "random";
  }
  return "?";
}

SampledField warm_start(WarmStart kind, const Grid& grid, const QuadraticForm& form, SpectralParameter z,
                        std::uint64_t seed) {
  const int d = grid.d;
  switch (kind) {
    case WarmStart::Random:
      return random_field(grid, seed);
    case WarmStart::TtStar: {
      // f^ = conj(m) times a Gaussian weight: the adjoint applied to a concentrated input.
      SampledField hat = SampledField::sample(grid, Space::Frequency, [&](const double* xi) -> cplx {
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) r2 += xi[i] * xi[i];
        cplx m = cplx(eval_Q(form, std::span<const double>(xi, d)) + z.a, z.b);
        return std::exp(-0.5 * r2) / std::conj(m);
      });
      return inv_fourier(hat);
    }
    case WarmStart::Knapp: {
      // Cap centred on a point of {Q = -a}.
      RealVec c(d, 0.0);
      double s = std::sqrt(std::abs(z.a));
      if (-z.a >= 0.0)
        c[d - 1] = s;
      else
        c[0] = s;
      double r = 0.25;
      for (int i = 0; i < d; ++i) r = std::max(r, 4.0 / grid.L[i]);
      SampledField hat = SampledField::sample(grid, Space::Frequency, [&](const double* xi) -> cplx {
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) r2 += (xi[i] - c[i]) * (xi[i] - c[i]);
        return bump::bump(std::sqrt(r2) / r);
      });
      return inv_fourier(hat);
    }
  }
  throw DomainError("warm_start: unknown kind");
}

std::vector<SpectralParameter> circle_sweep(int n) {
  if (n < 1) throw ConfigError("circle_sweep: need at least one point");
  std::vector<SpectralParameter> out;
  for (int j = 0; j < n; ++j) {
    double th = (2.0 * j + 1.0) * kPi / n;
    out.push_back({std::cos(th), std::sin(th)});
  }
  return out;
}

SweepReport uniform_sweep(const QuadraticForm& form, const ExponentPair& pair, const std::vector<SpectralParameter>& zs,
                          const NormProbe& probe, const SweepOptions& opts) {
  if (zs.empty()) throw ConfigError("uniform_sweep: empty z list");
  if (opts.grid.d != form.d()) throw DimensionError("uniform_sweep: grid and form dimensions differ");
  for (const auto& z : zs)
    if (z.modulus() < 1.0 - 1e-12) throw DomainError("uniform_sweep: every z must satisfy |z| >= 1");
  NormProbe base = probe;
  base.p = pair.p();
  base.q = pair.q();
  check_exponents(base.p, base.q);
  SweepReport rep;
  rep.threshold = opts.threshold;
  rep.entries.resize(zs.size());
  std::optional<PsiFunction> psi_pv;
  for (const auto& z : zs)
    if (z.b == 0.0 && !psi_pv) psi_pv = build_pv_psi(BumpKit::standard());
  parallel_for(zs.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const SpectralParameter z = zs[i];
      LinearOperator T = z.b == 0.0 ? pv_operator(opts.grid, form, z.a, *psi_pv)
                                    : resolvent_operator(opts.grid, form, z);
      SweepEntry e;
      e.z = z;
      for (WarmStart w : opts.starts) {
        NormProbe pr = base;
        pr.warm_start = warm_start(w, opts.grid, form, z, probe.seed + i);
        double v = opnorm_lower(T, pr).value;
        if (v > e.lower_bound) {
          e.lower_bound = v;
          e.best_start = to_string(w);
        }
      }
      rep.entries[i] = e;
    }
  });
  rep.max = 0.0;
  rep.min = std::numeric_limits<double>::infinity();
  for (const auto& e : rep.entries) {
    rep.max = std::max(rep.max, e.lower_bound);
    rep.min = std::min(rep.min, e.lower_bound);
  }
  rep.ratio = rep.min > 0.0 ? rep.max / rep.min : std::numeric_limits<double>::infinity();
  rep.pass = std::isfinite(rep.max) && rep.ratio < rep.threshold;
  return rep;
}

}  // namespace usol
