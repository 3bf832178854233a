#pragma once

#include <cstddef>
#include <vector>

#include "dtnlab/common.hpp"

namespace dtnlab {

std::size_t next_pow2(std::size_t n);

// In-place radix-2 transform, unnormalized. sign=+1 uses exp(+i*2*pi*jk/N)
// (synthesis), sign=-1 uses exp(-i*2*pi*jk/N) (analysis). N must be a power
// of two. Hand-rolled so results are bit-reproducible across builds.
void fft_pow2(std::vector<cplx>& a, int sign);

// d-dimensional transform of a row-major array with extents dims (all powers
// of two), applying fft_pow2 along every axis.
void fftnd(std::vector<cplx>& a, const std::vector<std::size_t>& dims,
           int sign);

}  // namespace dtnlab
