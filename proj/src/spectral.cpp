#include "hetsys/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hetsys {

ScalarField derivative(const ScalarField& f, Deriv which, int a) {
  if (a < 0 || a > 2) throw std::out_of_range("holomorphic index must be 0..2");
  const GridSpec& g = f.grid();
  const auto& c = f.spectrum();
  std::vector<cplx> out(c.size());
  GridIndexer ix(g);
  std::array<int, 6> idx;
  const double sgn = (which == Deriv::kHolo) ? -1.0 : 1.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    ix.decode(i, idx);
    const double kre = g.freq(2 * a, idx[2 * a]);
    const double kim = g.freq(2 * a + 1, idx[2 * a + 1]);
    // (1/2)(d_x -/+ i d_y) acting on exp(2*pi*i k.x)
    const cplx m = kPi * cplx(0.0, 1.0) * cplx(kre, sgn * kim);
    out[i] = c[i] * m;
  }
  return ScalarField::from_spectrum(g, std::move(out));
}

cplx integrate(const ScalarField& f) { return f.spectrum()[0]; }

namespace {

// Portable Gaussian pairs from raw 64-bit draws (std::normal_distribution is
// not reproducible across library implementations).
struct GaussianSource {
  std::mt19937_64 rng;
  explicit GaussianSource(std::uint64_t seed) : rng(seed) {}
  double uniform() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }
  cplx normal_pair() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return cplx(r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2));
  }
};

}  // namespace

ScalarField random_bandlimited(const GridSpec& g, int max_mode, std::uint64_t seed,
                               bool real) {
  for (int a = 0; a < 6; ++a) {
    if (max_mode > g.dealias_limit(a))
      throw std::invalid_argument("max_mode exceeds the dealias limit");
  }
  GaussianSource src(seed);
  std::vector<cplx> spec(g.size(), cplx(0.0));

  const int m = max_mode;
  std::array<int, 6> k;
  // Amplitudes normalize to ||f|| ~ 1.
  std::size_t total_modes = 1;
  for (int a = 0; a < 6; ++a) total_modes *= static_cast<std::size_t>(2 * m + 1);
  const double amp = 1.0 / std::sqrt(static_cast<double>(total_modes));

  auto flat_of_mode = [&](const std::array<int, 6>& kk) {
    std::size_t flat = 0;
    for (int a = 0; a < 6; ++a) {
      int bin = kk[a] >= 0 ? kk[a] : kk[a] + g.n[a];
      flat = flat * static_cast<std::size_t>(g.n[a]) + static_cast<std::size_t>(bin);
    }
    return flat;
  };

  // Lexicographic iteration over the band keeps the draw order (and hence the
  // field) deterministic for a fixed seed.
  for (k[0] = -m; k[0] <= m; ++k[0])
    for (k[1] = -m; k[1] <= m; ++k[1])
      for (k[2] = -m; k[2] <= m; ++k[2])
        for (k[3] = -m; k[3] <= m; ++k[3])
          for (k[4] = -m; k[4] <= m; ++k[4])
            for (k[5] = -m; k[5] <= m; ++k[5]) {
              if (!real) {
                spec[flat_of_mode(k)] = amp * src.normal_pair();
                continue;
              }
              // Real field: fill canonical representatives (first nonzero
              // component positive) and mirror the conjugate.
              int first_nonzero = 0;
              for (int a = 0; a < 6; ++a) {
                if (k[a] != 0) { first_nonzero = k[a]; break; }
              }
              if (first_nonzero < 0) continue;
              if (first_nonzero == 0) {
                spec[flat_of_mode(k)] = amp * src.normal_pair().real();
                continue;
              }
              const cplx z = amp * src.normal_pair();
              std::array<int, 6> nk;
              for (int a = 0; a < 6; ++a) nk[a] = -k[a];
              spec[flat_of_mode(k)] = z;
              spec[flat_of_mode(nk)] = std::conj(z);
            }
  return ScalarField::from_spectrum(g, std::move(spec));
}

ScalarField dealias(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const auto& c = f.spectrum();
  std::vector<cplx> out(c.size());
  GridIndexer ix(g);
  std::array<int, 6> idx;
  for (std::size_t i = 0; i < c.size(); ++i) {
    ix.decode(i, idx);
    bool keep = true;
    for (int a = 0; a < 6; ++a) {
      if (std::abs(g.freq(a, idx[a])) > g.dealias_limit(a)) { keep = false; break; }
    }
    out[i] = keep ? c[i] : cplx(0.0);
  }
  return ScalarField::from_spectrum(g, std::move(out));
}

bool is_bandlimited(const ScalarField& f, int max_mode, double tol) {
  const GridSpec& g = f.grid();
  const auto& c = f.spectrum();
  GridIndexer ix(g);
  std::array<int, 6> idx;
  for (std::size_t i = 0; i < c.size(); ++i) {
    ix.decode(i, idx);
    bool inside = true;
    for (int a = 0; a < 6; ++a) {
      if (std::abs(g.freq(a, idx[a])) > max_mode) { inside = false; break; }
    }
    if (!inside && std::abs(c[i]) > tol) return false;
  }
  return true;
}

}  // namespace hetsys
