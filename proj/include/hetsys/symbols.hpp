#pragma once

#include <Eigen/Dense>

#include "hetsys/forms.hpp"

namespace hetsys::symbols {

// Fourier multipliers of d/dz^a and d/dzbar^a at integer mode k.
inline cplx hol_mult(const std::array<int, 6>& k, int a) {
  return kPi * cplx(0.0, 1.0) * cplx(k[2 * a], -k[2 * a + 1]);
}
inline cplx anti_mult(const std::array<int, 6>& k, int a) {
  return kPi * cplx(0.0, 1.0) * cplx(k[2 * a], k[2 * a + 1]);
}

// Matrix of del: (p,q) -> (p+1,q) on increasing multi-index components.
Eigen::MatrixXcd partial_sym(int p, int q, const std::array<int, 6>& k);
// Matrix of dbar: (p,q) -> (p,q+1).
Eigen::MatrixXcd dbar_sym(int p, int q, const std::array<int, 6>& k);

// Modes inside the dealias band (the only ones bandlimited fields populate),
// cached per grid spec.
struct ModeSet {
  std::vector<std::size_t> flat;           // flat spectral index
  std::vector<std::array<int, 6>> k;       // signed frequencies
};
const ModeSet& banded_modes(const GridSpec& g);

// Gather/scatter one mode of a form's component vector.
Eigen::VectorXcd gather_mode(const ComplexForm& f, std::size_t flat);

}  // namespace hetsys::symbols
