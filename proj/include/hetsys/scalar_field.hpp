#pragma once

#include <vector>

#include "hetsys/grid.hpp"

namespace hetsys {

// Complex function on the periodic grid.  Keeps both the sample values and
// the Fourier coefficients, synchronizing lazily; all operations return new
// fields, existing ones are never mutated.
//
// Transform normalization: f(x) = sum_k c_k exp(2*pi*i k.x), so the zero
// mode equals the mean of the samples.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& g) : grid_(g) {
    values_.assign(g.size(), cplx(0.0));
    has_values_ = true;
  }

  static ScalarField from_values(const GridSpec& g, std::vector<cplx> v);
  static ScalarField from_spectrum(const GridSpec& g, std::vector<cplx> c);
  static ScalarField constant(const GridSpec& g, cplx value);

  const GridSpec& grid() const { return grid_; }
  bool empty() const { return !has_values_ && !has_spec_; }

  const std::vector<cplx>& values() const { sync_values(); return values_; }
  const std::vector<cplx>& spectrum() const { sync_spectrum(); return spec_; }

  cplx mean() const { return spectrum()[0]; }
  double norm() const;      // L2 norm, sqrt(sum_k |c_k|^2)
  double max_abs() const;

  ScalarField conj() const;
  ScalarField real_part() const;
  ScalarField imag_part() const;

  ScalarField operator-() const;
  ScalarField operator+(const ScalarField& o) const;
  ScalarField operator-(const ScalarField& o) const;
  ScalarField operator*(cplx s) const;
  friend ScalarField operator*(cplx s, const ScalarField& f) { return f * s; }

  ScalarField& operator+=(const ScalarField& o) { *this = *this + o; return *this; }
  ScalarField& operator-=(const ScalarField& o) { *this = *this - o; return *this; }
  ScalarField& operator*=(cplx s) { *this = *this * s; return *this; }

 private:
  friend ScalarField mul(const ScalarField&, const ScalarField&);
  friend ScalarField mul_raw(const ScalarField&, const ScalarField&);
  friend ScalarField pointwise_div(const ScalarField&, const ScalarField&);
  friend ScalarField apply_multiplier(const ScalarField&,
                                      const std::vector<cplx>&);
  friend class SpectralOps;

  void sync_values() const;
  void sync_spectrum() const;

  GridSpec grid_;
  mutable std::vector<cplx> values_;
  mutable std::vector<cplx> spec_;
  mutable bool has_values_ = false;
  mutable bool has_spec_ = false;
};

// Pointwise product, dealiased per the grid policy.
ScalarField mul(const ScalarField& a, const ScalarField& b);
// Pointwise product without dealiasing (used by the oracle paths).
ScalarField mul_raw(const ScalarField& a, const ScalarField& b);
// Pointwise quotient (no dealiasing; caller guarantees the divisor is safe).
ScalarField pointwise_div(const ScalarField& a, const ScalarField& b);
// Multiply the spectrum by a per-mode multiplier table.
ScalarField apply_multiplier(const ScalarField& f, const std::vector<cplx>& m);

}  // namespace hetsys
