#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hearaug::fft {

// In-place radix-2 FFT. data.size() must be a power of two.
// inverse = true applies the 1/N scaling.
void transform(std::vector<std::complex<double>>& data, bool inverse);

std::size_t next_pow2(std::size_t n);
bool is_pow2(std::size_t n);

// One-sided DFT of a real signal, zero-padded (or truncated) to n points.
// n must be a power of two; returns n/2 + 1 bins.
std::vector<std::complex<double>> rfft(std::span<const double> x,
                                       std::size_t n);

// Inverse of rfft: reconstructs n real samples from n/2 + 1 one-sided bins.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum,
                          std::size_t n);

// Full linear convolution (length a + b - 1) computed via FFT.
std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b);

}  // namespace hearaug::fft
