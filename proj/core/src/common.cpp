#include "usol/common.hpp"

#include <gsl/gsl_fit.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

namespace usol {

const QuadRule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: order must be positive");
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  if (!t) throw Error("gauss_legendre: table allocation failed");
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &r.x[i], &r.w[i], t);
  }
  gsl_integration_glfixed_table_free(t);
  return cache.emplace(n, std::move(r)).first->second;
}

QuadRule composite_gl(double a, double b, int panels, int order) {
  if (panels < 1) throw DomainError("composite_gl: need at least one panel");
  RealVec edges(panels + 1);
  for (int i = 0; i <= panels; ++i) edges[i] = a + (b - a) * i / panels;
  return composite_gl_edges(edges, order);
}

QuadRule composite_gl_edges(const RealVec& edges, int order) {
  const QuadRule& base = gauss_legendre(order);
  QuadRule r;
  r.x.reserve((edges.size() - 1) * order);
  r.w.reserve((edges.size() - 1) * order);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    double a = edges[p], b = edges[p + 1];
    if (!(b > a)) continue;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      r.x.push_back(mid + half * base.x[i]);
      r.w.push_back(half * base.w[i]);
    }
  }
  return r;
}

LineFit fit_line(const RealVec& x, const RealVec& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need two or more paired samples");
  LineFit f;
  double c00, c01, c11, sumsq;
  gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &f.intercept, &f.slope, &c00, &c01, &c11, &sumsq);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double sst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    f.residual = std::max(f.residual, std::abs(r));
    sst += (y[i] - mean) * (y[i] - mean);
  }
  f.r2 = sst > 0 ? 1.0 - sumsq / sst : 1.0;
  return f;
}

LineFit fit_loglog(const RealVec& x, const RealVec& y) {
  RealVec lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw DomainError("fit_loglog: non-positive sample");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

namespace {
struct NmContext {
  const std::function<double(const RealVec&)>* f;
  int evals = 0;
  RealVec buf;
};

double nm_trampoline(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<NmContext*>(params);
  for (std::size_t i = 0; i < ctx->buf.size(); ++i) ctx->buf[i] = gsl_vector_get(v, i);
  ++ctx->evals;
  return -(*ctx->f)(ctx->buf);
}
}  // namespace

MaxResult nelder_mead_max(const std::function<double(const RealVec&)>& f, const RealVec& x0, const RealVec& step,
                          int max_iter, double size_tol) {
  const std::size_t n = x0.size();
  if (n == 0 || step.size() != n) throw DimensionError("nelder_mead_max: bad dimensions");
  NmContext ctx{&f, 0, RealVec(n)};
  gsl_multimin_function fn{&nm_trampoline, n, &ctx};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, x0[i]);
    gsl_vector_set(ss, i, step[i]);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, ss);
  for (int it = 0; it < max_iter; ++it) {
    if (gsl_multimin_fminimizer_iterate(s)) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol) == GSL_SUCCESS) break;
  }
  MaxResult r;
  r.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.x[i] = gsl_vector_get(s->x, i);
  r.value = -s->fval;
  r.evaluations = ctx.evals;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(ss);
  return r;
}

int worker_count() {
  static const int n = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("USOL_WORKERS")) {
      int v = std::atoi(env);
      if (v >= 1) return std::min(v, std::max(hw, 1) * 4);
    }
    return hw;
  }();
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  std::exception_ptr err;
  std::mutex err_mu;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t b = w * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

RealVec geometric_sequence(double start, double ratio, int count) {
  RealVec v(count);
  double x = start;
  for (int i = 0; i < count; ++i, x *= ratio) v[i] = x;
  return v;
}

RealVec log_spaced(double lo, double hi, int count) {
  RealVec v(count);
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) v[i] = std::exp(a + (b - a) * i / (count - 1));
  return v;
}

void log_warn(const std::string& msg) { std::cerr << "usol: warning: " << msg << "\n"; }

}  // namespace usol
