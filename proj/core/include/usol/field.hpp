#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "usol/common.hpp"

namespace usol {

// Uniform torus grid, per-axis sizes and box lengths. Physical samples sit at
// x_j = -L/2 + j*L/n, frequencies at xi_m = c + (m - n/2)/L where c is an
// optional per-axis frequency centre (zero by default).
struct Grid {
  int d = 0;
  std::vector<int> n;
  RealVec L;
  RealVec centre;

  Grid() = default;
  Grid(std::vector<int> n_axes, RealVec L_axes, RealVec centre_axes = {});
  static Grid cubic(int d, int n, double L);

  std::size_t size() const;
  double h(int axis) const { return L[axis] / n[axis]; }
  double cell_volume() const;
  double x(int axis, int j) const { return -0.5 * L[axis] + j * h(axis); }
  double xi(int axis, int m) const { return centre[axis] + (m - n[axis] / 2) / L[axis]; }
  bool isotropic() const;
  // Coordinates of flat index `idx` (row-major, last axis fastest).
  void coords(std::size_t idx, bool frequency, double* out) const;
};

enum class Space { Physical, Frequency };

class SampledField {
 public:
  SampledField() = default;
  SampledField(Grid grid, Space space);
  SampledField(Grid grid, Space space, CplxVec values);

  // Samples fn at the physical or frequency lattice.
  static SampledField sample(const Grid& grid, Space space, const std::function<cplx(const double*)>& fn);

  const Grid& grid() const { return grid_; }
  Space space() const { return space_; }
  const CplxVec& values() const { return values_; }
  CplxVec& values() { return values_; }
  std::size_t size() const { return values_.size(); }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

 private:
  Grid grid_;
  Space space_ = Space::Physical;
  CplxVec values_;
};

// Discrete approximations of f^(xi) = int e^{-2 pi i x.xi} f(x) dx and its inverse.
SampledField fourier(const SampledField& f);
SampledField inv_fourier(const SampledField& f);
// F^{-1}(symbol * F f) for a physical-space field.
SampledField apply_multiplier(const SampledField& f, const std::function<cplx(const double*)>& symbol);
// Same with the symbol pre-sampled on the frequency lattice.
SampledField apply_multiplier(const SampledField& f, const CplxVec& symbol);

// Norms use the cell measure of the field's space (h^d physically, 1/prod L in frequency).
double lp_norm(const SampledField& f, double p);
// Magnitudes sorted in decreasing order.
RealVec decreasing_rearrangement(const SampledField& f);
double lorentz_p1(const SampledField& f, double p);
double lorentz_qinf(const SampledField& f, double q);
// Sorted-magnitude variants, reused by the Lorentz-mode optimizer.
double lorentz_p1_sorted(const RealVec& sorted, double cell, double p);
double lorentz_qinf_sorted(const RealVec& sorted, double cell, double q);

// Fraction of L2 mass outside [-L/4, L/4]^d (physical space).
double outer_mass_fraction(const SampledField& f);

// DTFT of the physical samples at an arbitrary frequency: exact band-limited
// evaluation of f^ for fields synthesized from lattice data.
cplx band_limited_interpolant(const SampledField& physical, const double* xi);

// Flat binary format: "USOL", u32 version, u32 d, u32 n, f64 L, u8 space,
// then little-endian f64 (re, im) pairs in row-major order.
void save_field(const SampledField& f, std::ostream& os);
SampledField load_field(std::istream& is);
void save_field(const SampledField& f, const std::string& path);
SampledField load_field(const std::string& path);

}  // namespace usol
