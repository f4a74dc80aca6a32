#pragma once

#include <span>

#include "dampsim/spectral_core.hpp"

// In-place transforms between nodal values and physical-phase Fourier
// coefficients, with the normalization documented on SpectralField. These are
// the unchecked kernels behind forward_transform/inverse_transform, used
// directly by the time steppers.
namespace dampsim::fft {

void forward(const GridSpec& grid, std::span<cplx> data);
void inverse(const GridSpec& grid, std::span<cplx> data);

/// Real input, complex output.
void forward_real(const GridSpec& grid, std::span<const double> in, std::span<cplx> out);
/// Real part of the inverse transform; the imaginary part is dropped unchecked.
void inverse_real(const GridSpec& grid, std::span<const cplx> in, std::span<double> out,
                  std::span<cplx> scratch);

}  // namespace dampsim::fft
