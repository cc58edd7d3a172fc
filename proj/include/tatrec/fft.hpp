#pragma once

#include <cstddef>

#include "tatrec/core.hpp"

namespace tatrec {

// Thin FFTW wrapper. Plans are cached per (shape, sign) and created with
// FFTW_ESTIMATE, so repeated runs of a pipeline are bitwise deterministic.
// Execution through new-array interfaces is safe from worker threads; plan
// creation is serialized internally.
//
// sign = +1 applies the kernel e^{+2*pi*i*j*k/n} (unscaled), sign = -1 the
// conjugate kernel. No normalization is applied.

void fft_inplace(cdouble* data, std::size_t n, int sign);

/// Transforms `count` contiguous rows of length n, in place, in parallel.
void fft_rows(cdouble* data, std::size_t count, std::size_t n, int sign);

void fft_2d(cdouble* data, std::size_t n0, std::size_t n1, int sign);
void fft_3d(cdouble* data, std::size_t n0, std::size_t n1, std::size_t n2, int sign);

}  // namespace tatrec
