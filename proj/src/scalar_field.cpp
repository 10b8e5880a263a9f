#include "hetsys/scalar_field.hpp"

#include <cmath>
#include <stdexcept>

#include "hetsys/fft.hpp"
#include "hetsys/spectral.hpp"

namespace hetsys {

ScalarField ScalarField::from_values(const GridSpec& g, std::vector<cplx> v) {
  if (v.size() != g.size()) throw std::invalid_argument("value buffer size mismatch");
  ScalarField f;
  f.grid_ = g;
  f.values_ = std::move(v);
  f.has_values_ = true;
  return f;
}

ScalarField ScalarField::from_spectrum(const GridSpec& g, std::vector<cplx> c) {
  if (c.size() != g.size()) throw std::invalid_argument("spectrum buffer size mismatch");
  ScalarField f;
  f.grid_ = g;
  f.spec_ = std::move(c);
  f.has_spec_ = true;
  return f;
}

ScalarField ScalarField::constant(const GridSpec& g, cplx value) {
  std::vector<cplx> c(g.size(), cplx(0.0));
  c[0] = value;
  return from_spectrum(g, std::move(c));
}

void ScalarField::sync_values() const {
  if (has_values_) return;
  if (!has_spec_) throw std::logic_error("empty field");
  values_.resize(spec_.size());
  fft6(grid_, spec_.data(), values_.data(), +1);
  has_values_ = true;
}

void ScalarField::sync_spectrum() const {
  if (has_spec_) return;
  if (!has_values_) throw std::logic_error("empty field");
  spec_.resize(values_.size());
  fft6(grid_, values_.data(), spec_.data(), -1);
  const double inv = 1.0 / static_cast<double>(values_.size());
  for (auto& c : spec_) c *= inv;
  has_spec_ = true;
}

double ScalarField::norm() const {
  double s = 0.0;
  for (const auto& c : spectrum()) s += std::norm(c);
  return std::sqrt(s);
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values()) m = std::max(m, std::abs(v));
  return m;
}

ScalarField ScalarField::conj() const {
  const auto& v = values();
  std::vector<cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::conj(v[i]);
  return from_values(grid_, std::move(out));
}

ScalarField ScalarField::real_part() const {
  const auto& v = values();
  std::vector<cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = cplx(v[i].real(), 0.0);
  return from_values(grid_, std::move(out));
}

ScalarField ScalarField::imag_part() const {
  const auto& v = values();
  std::vector<cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = cplx(v[i].imag(), 0.0);
  return from_values(grid_, std::move(out));
}

ScalarField ScalarField::operator-() const { return *this * cplx(-1.0); }

ScalarField ScalarField::operator+(const ScalarField& o) const {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("grid mismatch");
  if (has_spec_ && o.has_spec_) {
    std::vector<cplx> out(spec_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec_[i] + o.spec_[i];
    return from_spectrum(grid_, std::move(out));
  }
  const auto& a = values();
  const auto& b = o.values();
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return from_values(grid_, std::move(out));
}

ScalarField ScalarField::operator-(const ScalarField& o) const {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("grid mismatch");
  if (has_spec_ && o.has_spec_) {
    std::vector<cplx> out(spec_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec_[i] - o.spec_[i];
    return from_spectrum(grid_, std::move(out));
  }
  const auto& a = values();
  const auto& b = o.values();
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return from_values(grid_, std::move(out));
}

ScalarField ScalarField::operator*(cplx s) const {
  if (has_spec_) {
    std::vector<cplx> out(spec_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec_[i] * s;
    return from_spectrum(grid_, std::move(out));
  }
  const auto& a = values();
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * s;
  return from_values(grid_, std::move(out));
}

ScalarField mul_raw(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("grid mismatch");
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<cplx> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return ScalarField::from_values(a.grid(), std::move(out));
}

ScalarField mul(const ScalarField& a, const ScalarField& b) {
  ScalarField p = mul_raw(a, b);
  if (a.grid().dealias_products) return dealias(p);
  return p;
}

ScalarField pointwise_div(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("grid mismatch");
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<cplx> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] / bv[i];
  return ScalarField::from_values(a.grid(), std::move(out));
}

ScalarField apply_multiplier(const ScalarField& f, const std::vector<cplx>& m) {
  const auto& c = f.spectrum();
  if (m.size() != c.size()) throw std::invalid_argument("multiplier size mismatch");
  std::vector<cplx> out(c.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c[i] * m[i];
  return ScalarField::from_spectrum(f.grid(), std::move(out));
}

}  // namespace hetsys
