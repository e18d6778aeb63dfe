#include "hearaug/fft.hpp"

#include <cmath>
#include <numbers>

#include "hearaug/errors.hpp"

namespace hearaug::fft {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void transform(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_pow2(n)) throw InvalidArgument("fft: size must be a power of two");
  if (n == 1) return;

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  // Twiddle table e^{-2*pi*i*k/n}; indexed directly per stage so no
  // rounding accumulates across butterflies.
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double angle = sign * 2.0 * std::numbers::pi *
                   static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = {std::cos(angle), std::sin(angle)};
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = twiddle[k * stride];
        std::complex<double>& a = data[start + k];
        std::complex<double>& b = data[start + k + len / 2];
        const std::complex<double> u = a;
        const std::complex<double> v = b * w;
        a = u + v;
        b = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& value : data) value *= scale;
  }
}

std::vector<std::complex<double>> rfft(std::span<const double> x,
                                       std::size_t n) {
  if (!is_pow2(n)) throw InvalidArgument("rfft: size must be a power of two");
  std::vector<std::complex<double>> buf(n);
  const std::size_t m = std::min(x.size(), n);
  for (std::size_t i = 0; i < m; ++i) buf[i] = x[i];
  transform(buf, false);
  buf.resize(n / 2 + 1);
  return buf;
}

std::vector<double> irfft(std::span<const std::complex<double>> spectrum,
                          std::size_t n) {
  if (!is_pow2(n)) throw InvalidArgument("irfft: size must be a power of two");
  if (spectrum.size() != n / 2 + 1)
    throw InvalidArgument("irfft: spectrum size does not match n");
  std::vector<std::complex<double>> buf(n);
  for (std::size_t k = 0; k <= n / 2; ++k) buf[k] = spectrum[k];
  for (std::size_t k = n / 2 + 1; k < n; ++k)
    buf[k] = std::conj(spectrum[n - k]);
  transform(buf, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real();
  return out;
}

std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b) {
  if (a.empty() || b.empty())
    throw InvalidArgument("convolve: empty input");
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t n = next_pow2(out_len);
  auto fa = rfft(a, n);
  auto fb = rfft(b, n);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  auto full = irfft(fa, n);
  full.resize(out_len);
  return full;
}

}  // namespace hearaug::fft
