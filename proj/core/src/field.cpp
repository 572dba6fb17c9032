#include "usol/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

namespace usol {

Grid::Grid(std::vector<int> n_axes, RealVec L_axes, RealVec centre_axes)
    : d(static_cast<int>(n_axes.size())), n(std::move(n_axes)), L(std::move(L_axes)), centre(std::move(centre_axes)) {
  if (d < 1) throw DimensionError("Grid: need at least one axis");
  if (L.size() != n.size()) throw DimensionError("Grid: n and L must have the same length");
  if (centre.empty()) centre.assign(d, 0.0);
  if (centre.size() != n.size()) throw DimensionError("Grid: centre must have one entry per axis");
  for (int i = 0; i < d; ++i) {
    if (n[i] < 2 || n[i] % 2 != 0) throw ConfigError("Grid: samples per axis must be even and at least 2");
    if (!(L[i] > 0.0)) throw ConfigError("Grid: box length must be positive");
  }
}

Grid Grid::cubic(int d, int n, double L) { return Grid(std::vector<int>(d, n), RealVec(d, L)); }

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int v : n) s *= static_cast<std::size_t>(v);
  return s;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= h(i);
  return v;
}

bool Grid::isotropic() const {
  for (int i = 0; i < d; ++i)
    if (n[i] != n[0] || L[i] != L[0] || centre[i] != 0.0) return false;
  return true;
}

void Grid::coords(std::size_t idx, bool frequency, double* out) const {
  for (int i = d - 1; i >= 0; --i) {
    int j = static_cast<int>(idx % n[i]);
    idx /= n[i];
    out[i] = frequency ? xi(i, j) : x(i, j);
  }
}

SampledField::SampledField(Grid grid, Space space) : grid_(std::move(grid)), space_(space), values_(grid_.size()) {}

SampledField::SampledField(Grid grid, Space space, CplxVec values)
    : grid_(std::move(grid)), space_(space), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DimensionError("SampledField: value count does not match grid");
}

SampledField SampledField::sample(const Grid& grid, Space space, const std::function<cplx(const double*)>& fn) {
  SampledField f(grid, space);
  const bool freq = space == Space::Frequency;
  parallel_for(f.size(), [&](std::size_t b, std::size_t e) {
    RealVec c(grid.d);
    for (std::size_t i = b; i < e; ++i) {
      grid.coords(i, freq, c.data());
      f.values_[i] = fn(c.data());
    }
  });
  return f;
}

namespace {

std::mutex g_plan_mutex;

fftw_plan get_plan(const std::vector<int>& n, int sign) {
  static std::map<std::pair<std::vector<int>, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::size_t total = 1;
  for (int v : n) total *= static_cast<std::size_t>(v);
  fftw_complex* a = fftw_alloc_complex(total);
  fftw_complex* b = fftw_alloc_complex(total);
  fftw_plan p = fftw_plan_dft(static_cast<int>(n.size()), n.data(), a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  if (!p) throw Error("fftw plan creation failed");
  cache.emplace(key, p);
  return p;
}

// values[idx] *= prod_i factors[i][multi-index_i].
void apply_axis_factors(CplxVec& values, const Grid& g, const std::vector<CplxVec>& factors) {
  const int d = g.d;
  parallel_for(values.size(), [&](std::size_t b, std::size_t e) {
    std::vector<int> mi(d);
    std::size_t r = b;
    for (int i = d - 1; i >= 0; --i) {
      mi[i] = static_cast<int>(r % g.n[i]);
      r /= g.n[i];
    }
    for (std::size_t idx = b; idx < e; ++idx) {
      cplx f = factors[0][mi[0]];
      for (int i = 1; i < d; ++i) f *= factors[i][mi[i]];
      values[idx] *= f;
      for (int i = d - 1; i >= 0; --i) {
        if (++mi[i] < g.n[i]) break;
        mi[i] = 0;
      }
    }
  });
}

cplx unit(double phase) { return {std::cos(phase), std::sin(phase)}; }

SampledField transform(const SampledField& in, bool forward) {
  const Grid& g = in.grid();
  std::vector<CplxVec> pre(g.d), post(g.d);
  for (int i = 0; i < g.d; ++i) {
    const int n = g.n[i];
    pre[i].resize(n);
    post[i].resize(n);
    const double half_turn = kPi * (n / 2);
    for (int j = 0; j < n; ++j) {
      double sgn = (j % 2 == 0) ? 1.0 : -1.0;
      if (forward) {
        pre[i][j] = sgn * unit(-kTwoPi * g.x(i, j) * g.centre[i]);
        post[i][j] = g.h(i) * sgn * unit(-half_turn);
      } else {
        pre[i][j] = sgn;
        post[i][j] = (sgn / g.L[i]) * unit(half_turn + kTwoPi * g.x(i, j) * g.centre[i]);
      }
    }
  }
  CplxVec buf = in.values();
  apply_axis_factors(buf, g, pre);
  CplxVec out(buf.size());
  fftw_plan p = get_plan(g.n, forward ? FFTW_FORWARD : FFTW_BACKWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf.data()), reinterpret_cast<fftw_complex*>(out.data()));
  apply_axis_factors(out, g, post);
  return SampledField(g, forward ? Space::Frequency : Space::Physical, std::move(out));
}

}  // namespace

SampledField fourier(const SampledField& f) {
  if (f.space() != Space::Physical) throw DomainError("fourier: field is already in frequency space");
  return transform(f, true);
}

SampledField inv_fourier(const SampledField& f) {
  if (f.space() != Space::Frequency) throw DomainError("inv_fourier: field is already in physical space");
  return transform(f, false);
}

SampledField apply_multiplier(const SampledField& f, const std::function<cplx(const double*)>& symbol) {
  SampledField F = fourier(f);
  const Grid& g = F.grid();
  parallel_for(F.size(), [&](std::size_t b, std::size_t e) {
    RealVec c(g.d);
    for (std::size_t i = b; i < e; ++i) {
      g.coords(i, true, c.data());
      F[i] *= symbol(c.data());
    }
  });
  return inv_fourier(F);
}

SampledField apply_multiplier(const SampledField& f, const CplxVec& symbol) {
  if (symbol.size() != f.size()) throw DimensionError("apply_multiplier: symbol size mismatch");
  SampledField F = fourier(f);
  for (std::size_t i = 0; i < F.size(); ++i) F[i] *= symbol[i];
  return inv_fourier(F);
}

namespace {
// Lattice cell measure in the field's own space: h^d physically, prod 1/L_i in frequency.
double cell_measure(const SampledField& f) {
  const Grid& g = f.grid();
  if (f.space() == Space::Physical) return g.cell_volume();
  double v = 1.0;
  for (double L : g.L) v /= L;
  return v;
}
}  // namespace

double lp_norm(const SampledField& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  if (p < 1.0) throw DomainError("lp_norm: p must be at least 1");
  // Scale by the max to keep |f|^p in range for large p.
  double m = 0.0;
  for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (const cplx& v : f.values()) s += std::pow(std::abs(v) / m, p);
  return m * std::pow(s * cell_measure(f), 1.0 / p);
}

RealVec decreasing_rearrangement(const SampledField& f) {
  RealVec a(f.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f[i]);
  std::sort(a.begin(), a.end(), std::greater<double>());
  for (std::size_t i = 1; i < a.size(); ++i)
    if (a[i] > a[i - 1]) throw Error("decreasing_rearrangement: distribution function not monotone");
  return a;
}

double lorentz_p1_sorted(const RealVec& a, double cell, double p) {
  // int_0^inf mu(t)^{1/p} dt with mu = j*cell on (a_{j+1}, a_j].
  double s = 0.0;
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    double next = (j + 1 < n) ? a[j + 1] : 0.0;
    double step = a[j] - next;
    if (step > 0.0) s += step * std::pow(static_cast<double>(j + 1) * cell, 1.0 / p);
  }
  return s;
}

double lorentz_qinf_sorted(const RealVec& a, double cell, double q) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    m = std::max(m, a[j] * std::pow(static_cast<double>(j + 1) * cell, 1.0 / q));
  return m;
}

double lorentz_p1(const SampledField& f, double p) {
  if (!(p > 1.0) || std::isinf(p)) throw DomainError("lorentz_p1: need 1 < p < inf");
  return lorentz_p1_sorted(decreasing_rearrangement(f), cell_measure(f), p);
}

double lorentz_qinf(const SampledField& f, double q) {
  if (!(q > 1.0) || std::isinf(q)) throw DomainError("lorentz_qinf: need 1 < q < inf");
  return lorentz_qinf_sorted(decreasing_rearrangement(f), cell_measure(f), q);
}

double outer_mass_fraction(const SampledField& f) {
  if (f.space() != Space::Physical) throw DomainError("outer_mass_fraction: physical field required");
  const Grid& g = f.grid();
  double total = 0.0, outer = 0.0;
  RealVec c(g.d);
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.coords(i, false, c.data());
    double m = std::norm(f[i]);
    total += m;
    for (int a = 0; a < g.d; ++a) {
      if (std::abs(c[a]) > 0.25 * g.L[a]) {
        outer += m;
        break;
      }
    }
  }
  return total > 0.0 ? outer / total : 0.0;
}

cplx band_limited_interpolant(const SampledField& f, const double* xi) {
  if (f.space() != Space::Physical) throw DomainError("band_limited_interpolant: physical samples required");
  const Grid& g = f.grid();
  std::vector<CplxVec> ph(g.d);
  for (int i = 0; i < g.d; ++i) {
    ph[i].resize(g.n[i]);
    for (int j = 0; j < g.n[i]; ++j) ph[i][j] = g.h(i) * unit(-kTwoPi * g.x(i, j) * xi[i]);
  }
  // Contract the last axis first.
  CplxVec cur = f.values();
  std::size_t len = cur.size();
  for (int i = g.d - 1; i >= 0; --i) {
    const std::size_t n = g.n[i], outer = len / n;
    CplxVec next(outer);
    for (std::size_t o = 0; o < outer; ++o) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += cur[o * n + j] * ph[i][j];
      next[o] = s;
    }
    cur.swap(next);
    len = outer;
  }
  return cur[0];
}

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    v = std::bit_cast<T>(bytes);
  }
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("load_field: truncated input");
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    v = std::bit_cast<T>(bytes);
  }
  return v;
}

constexpr std::uint32_t kFormatVersion = 1;

}  // namespace

void save_field(const SampledField& f, std::ostream& os) {
  const Grid& g = f.grid();
  if (!g.isotropic()) throw DomainError("save_field: binary format v1 stores isotropic, uncentred grids only");
  os.write("USOL", 4);
  put<std::uint32_t>(os, kFormatVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.d));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n[0]));
  put<double>(os, g.L[0]);
  put<std::uint8_t>(os, f.space() == Space::Frequency ? 1 : 0);
  for (const cplx& v : f.values()) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
  if (!os) throw Error("save_field: write failed");
}

SampledField load_field(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "USOL", 4) != 0) throw Error("load_field: bad magic");
  auto version = get<std::uint32_t>(is);
  if (version != kFormatVersion) throw Error("load_field: unsupported version " + std::to_string(version));
  auto d = get<std::uint32_t>(is);
  auto n = get<std::uint32_t>(is);
  auto L = get<double>(is);
  auto space = get<std::uint8_t>(is);
  if (d < 1 || d > 8) throw Error("load_field: implausible dimension");
  Grid g = Grid::cubic(static_cast<int>(d), static_cast<int>(n), L);
  SampledField f(g, space ? Space::Frequency : Space::Physical);
  for (auto& v : f.values()) {
    double re = get<double>(is);
    double im = get<double>(is);
    v = {re, im};
  }
  return f;
}

void save_field(const SampledField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("save_field: cannot open " + path);
  save_field(f, os);
}

SampledField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("load_field: cannot open " + path);
  return load_field(is);
}

}  // namespace usol
