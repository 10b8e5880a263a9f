#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hetsys {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

// Periodic grid on the square torus C^3/(Z^3 + iZ^3).  Real coordinates
// x^0..x^5 in [0,1) per axis; holomorphic coordinates z^a = x^{2a} + i x^{2a+1}.
struct GridSpec {
  std::array<int, 6> n{8, 8, 8, 8, 8, 8};
  double dealias_fraction = 2.0 / 3.0;
  bool dealias_products = true;

  GridSpec() = default;
  explicit GridSpec(int iso) { n.fill(iso); check(); }
  explicit GridSpec(std::array<int, 6> dims) : n(dims) { check(); }

  void check() const {
    for (int a = 0; a < 6; ++a) {
      if (n[a] < 4 || n[a] % 2 != 0)
        throw std::invalid_argument("grid resolution must be even and >= 4, got n[" +
                                    std::to_string(a) + "]=" + std::to_string(n[a]));
    }
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
      throw std::invalid_argument("dealias_fraction must lie in (0,1]");
  }

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < 6; ++a) s *= static_cast<std::size_t>(n[a]);
    return s;
  }

  // Signed integer frequency of FFT bin i on axis a, in [-n/2, n/2).
  int freq(int a, int i) const { return i < n[a] / 2 ? i : i - n[a]; }

  // Largest mode magnitude kept by the dealias rule on axis a.
  int dealias_limit(int a) const {
    return static_cast<int>(dealias_fraction * (n[a] / 2.0) + 1e-12);
  }

  bool operator==(const GridSpec& o) const {
    return n == o.n && dealias_fraction == o.dealias_fraction &&
           dealias_products == o.dealias_products;
  }
};

// Row-major iteration helper: decodes flat index into per-axis bins on demand.
struct GridIndexer {
  std::array<int, 6> n;
  explicit GridIndexer(const GridSpec& g) : n(g.n) {}
  void decode(std::size_t flat, std::array<int, 6>& idx) const {
    for (int a = 5; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % n[a]);
      flat /= n[a];
    }
  }
};

}  // namespace hetsys
