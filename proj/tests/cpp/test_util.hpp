#pragma once

// Shared helpers for the unit suites: scratch directories, reference
// implementations used as oracles, and error norms.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hearaug/audio.hpp"
#include "hearaug/rng.hpp"

namespace testutil {

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("hearaug_test_" + tag + "_" +
             std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> white_signal(std::size_t n, uint64_t seed,
                                        double amplitude = 0.5) {
  hearaug::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = amplitude * (2.0 * rng.uniform() - 1.0);
  return x;
}

inline hearaug::AudioBuffer white_buffer(std::size_t n, uint64_t seed,
                                         int rate = 16000,
                                         double amplitude = 0.5) {
  return hearaug::make_mono(white_signal(n, seed, amplitude), rate);
}

inline double relative_l2(std::span<const double> a,
                          std::span<const double> b) {
  double num = 0.0, den = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    num += d * d;
    den += a[i] * a[i];
  }
  if (a.size() != b.size()) return 1.0;
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double max_abs_diff(std::span<const double> a,
                           std::span<const double> b) {
  double m = a.size() == b.size()
                 ? 0.0
                 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool bit_identical(std::span<const double> a,
                          std::span<const double> b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin());
}

// O(n^2) DFT used as the FFT oracle.
inline std::vector<std::complex<double>> naive_dft(
    std::span<const std::complex<double>> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      const double phase = -2.0 * std::numbers::pi *
                           static_cast<double>(k) * static_cast<double>(t) /
                           static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    out[k] = acc;
  }
  return out;
}

// O(n*m) direct convolution used as the fast-convolution oracle.
inline std::vector<double> naive_convolve(std::span<const double> a,
                                          std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

inline double energy(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace testutil
