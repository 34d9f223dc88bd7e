#pragma once

#include <complex>
#include <vector>

namespace dlab::fft {

// Unnormalized in-place DFT over a row-major multi-dimensional array.
// sign -1 is the forward exponent convention, +1 the inverse. Plans are
// cached per shape and execution is safe from concurrent threads.
void dft(std::vector<std::complex<double>>& data, const std::vector<int>& dims, int sign);

} // namespace dlab::fft
