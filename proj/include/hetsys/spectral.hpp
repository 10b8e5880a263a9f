#pragma once

#include <cstdint>

#include "hetsys/scalar_field.hpp"

namespace hetsys {

enum class Deriv { kHolo, kAntiholo };

// Spectral derivative d/dz^a or d/dzbar^a, a in {0,1,2}; exact for
// bandlimited fields.  z^a = x^{2a} + i x^{2a+1}, so the mode multipliers are
// pi*i*(k_{2a} -/+ i k_{2a+1}).
ScalarField derivative(const ScalarField& f, Deriv which, int a);

// Integral over the unit torus = mean of samples = zeroth Fourier mode.
cplx integrate(const ScalarField& f);

// Deterministic bandlimited Gaussian field: only modes with |k|_inf <= max_mode
// populated; conjugate-symmetric spectrum when real = true.
ScalarField random_bandlimited(const GridSpec& g, int max_mode, std::uint64_t seed,
                               bool real);

// Zero all modes above dealias_fraction * Nyquist on any axis.
ScalarField dealias(const ScalarField& f);

// True if every populated mode satisfies |k|_inf <= max_mode.
bool is_bandlimited(const ScalarField& f, int max_mode, double tol = 0.0);

}  // namespace hetsys
