#pragma once

#include <vector>

#include "types.hpp"

namespace pdk {

/// In-place radix-2 FFT; the length must be a power of two.
void fft_pow2(std::vector<cplx>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

}  // namespace pdk
