#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nldiff::detail {

/// Iterative radix-2 Cooley-Tukey; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

/// Full linear convolution c[m] = sum_a x[a] * y[m - a], length |x|+|y|-1.
std::vector<double> convolve_full(std::span<const double> x, std::span<const double> y);

}  // namespace nldiff::detail
