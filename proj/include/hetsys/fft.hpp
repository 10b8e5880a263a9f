#pragma once

#include "hetsys/grid.hpp"

namespace hetsys {

// Unnormalized 6-D complex DFT. sign = -1: forward (space -> modes),
// sign = +1: backward.  Plans are cached per dimension tuple.
void fft6(const GridSpec& grid, const cplx* in, cplx* out, int sign);

}  // namespace hetsys
