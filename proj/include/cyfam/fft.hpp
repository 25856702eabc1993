#pragma once

#include <complex>
#include <span>

namespace cyfam::fft {

using cplx = std::complex<double>;

/// In-place unnormalized forward DFT (sign -1) of a `dims`-dimensional cube
/// with `n` points per axis, row-major (last axis fastest).
void forward(std::span<cplx> data, int dims, int n);

/// In-place inverse DFT (sign +1), normalized by n^dims.
void inverse(std::span<cplx> data, int dims, int n);

}  // namespace cyfam::fft
