#pragma once

#include <complex>

namespace smx {

// Working precision of the drivers (potential, sweep, spectrum, wavefunction).
// The slice and composition kernels are templates over the scalar and are
// instantiated for any floating type; only `double` is built here.
using real = double;
using complex = std::complex<real>;

} // namespace smx
