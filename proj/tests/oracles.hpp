#pragma once

// Test-only oracles: independent slow reimplementations used to freeze
// expected values.  Nothing here touches the spectral code paths under test.

#include <array>
#include <complex>
#include <map>
#include <vector>

#include "hetsys/forms.hpp"
#include "hetsys/scalar_field.hpp"

namespace hetsys::oracle {

// 4th-order centered finite difference along real axis a (periodic).
inline ScalarField fd_axis_derivative(const ScalarField& f, int axis) {
  const GridSpec& g = f.grid();
  const auto& v = f.values();
  std::vector<cplx> out(v.size());
  GridIndexer ix(g);
  std::array<int, 6> idx;
  const double h = 1.0 / g.n[axis];
  auto at = [&](std::array<int, 6> id, int shift) {
    id[axis] = ((id[axis] + shift) % g.n[axis] + g.n[axis]) % g.n[axis];
    std::size_t flat = 0;
    for (int a = 0; a < 6; ++a)
      flat = flat * static_cast<std::size_t>(g.n[a]) + static_cast<std::size_t>(id[a]);
    return v[flat];
  };
  for (std::size_t i = 0; i < v.size(); ++i) {
    ix.decode(i, idx);
    out[i] = (8.0 * (at(idx, 1) - at(idx, -1)) - (at(idx, 2) - at(idx, -2))) / (12.0 * h);
  }
  return ScalarField::from_values(g, std::move(out));
}

// Finite-difference d/dz^a and d/dzbar^a.
inline ScalarField fd_holo(const ScalarField& f, int a) {
  return (fd_axis_derivative(f, 2 * a) - fd_axis_derivative(f, 2 * a + 1) * cplx(0, 1)) * cplx(0.5);
}
inline ScalarField fd_antiholo(const ScalarField& f, int a) {
  return (fd_axis_derivative(f, 2 * a) + fd_axis_derivative(f, 2 * a + 1) * cplx(0, 1)) * cplx(0.5);
}

// Plain sample mean, summed directly (trapezoid rule on a periodic grid).
inline cplx trapezoid_mean(const ScalarField& f) {
  cplx s(0.0);
  for (const auto& v : f.values()) s += v;
  return s / static_cast<double>(f.grid().size());
}

// Plane-wave field exp(2*pi*i k.x).
inline ScalarField plane_wave(const GridSpec& g, const std::array<int, 6>& k) {
  std::vector<cplx> spec(g.size(), cplx(0.0));
  std::size_t flat = 0;
  for (int a = 0; a < 6; ++a) {
    int bin = k[a] >= 0 ? k[a] : k[a] + g.n[a];
    flat = flat * static_cast<std::size_t>(g.n[a]) + static_cast<std::size_t>(bin);
  }
  spec[flat] = 1.0;
  return ScalarField::from_spectrum(g, std::move(spec));
}

// Naive exterior algebra over the ordered basis e0..e5 with e_{0..2} = dz^a,
// e_{3..5} = dzbar^a.  Completely independent of the typed wedge path.
struct NaiveForm {
  // key: strictly increasing index list into {0..5}
  std::map<std::vector<int>, ScalarField> terms;

  static NaiveForm from_complex_form(const ComplexForm& f) {
    NaiveForm out;
    const auto& I = multi::sets(f.p());
    const auto& J = multi::sets(f.q());
    for (std::size_t i = 0; i < I.size(); ++i)
      for (std::size_t j = 0; j < J.size(); ++j) {
        std::vector<int> key = I[i];
        for (int b : J[j]) key.push_back(b + 3);
        out.terms[key] = f.comp(static_cast<int>(i), static_cast<int>(j));
      }
    return out;
  }

  static int sort_sign(std::vector<int>& v) {
    int sign = 1;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      for (std::size_t j = 0; j + 1 < v.size() - i; ++j) {
        if (v[j] == v[j + 1]) return 0;
        if (v[j] > v[j + 1]) { std::swap(v[j], v[j + 1]); sign = -sign; }
      }
    return sign;
  }

  NaiveForm wedge_with(const NaiveForm& o) const {
    NaiveForm out;
    for (const auto& [ka, fa] : terms)
      for (const auto& [kb, fb] : o.terms) {
        std::vector<int> key = ka;
        key.insert(key.end(), kb.begin(), kb.end());
        const int s = sort_sign(key);
        if (s == 0) continue;
        ScalarField prod = mul_raw(fa, fb) * cplx(static_cast<double>(s));
        auto it = out.terms.find(key);
        if (it == out.terms.end()) out.terms.emplace(key, prod);
        else it->second = it->second + prod;
      }
    return out;
  }

  // Compare against a ComplexForm (assumes the result is pure (p,q)).
  double diff_norm(const ComplexForm& f) const {
    NaiveForm ref = from_complex_form(f);
    double s = 0.0;
    for (const auto& [k, v] : terms) {
      auto it = ref.terms.find(k);
      ScalarField d = (it != ref.terms.end()) ? (v - it->second) : v;
      const double n = hetsys::dealias(d).norm();
      s += n * n;
    }
    for (const auto& [k, v] : ref.terms) {
      if (terms.find(k) == terms.end()) { const double n = v.norm(); s += n * n; }
    }
    return std::sqrt(s);
  }
};

// Pointwise 3x3 determinant of a metric-like array of fields g[a][b].
inline ScalarField det3(const std::array<std::array<ScalarField, 3>, 3>& g) {
  auto m = [&](int a, int b) { return g[a][b]; };
  ScalarField d =
      mul_raw(m(0, 0), mul_raw(m(1, 1), m(2, 2)) - mul_raw(m(1, 2), m(2, 1))) -
      mul_raw(m(0, 1), mul_raw(m(1, 0), m(2, 2)) - mul_raw(m(1, 2), m(2, 0))) +
      mul_raw(m(0, 2), mul_raw(m(1, 0), m(2, 1)) - mul_raw(m(1, 1), m(2, 0)));
  return d;
}

}  // namespace hetsys::oracle
