#include "hearaug/stoi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hearaug/errors.hpp"
#include "hearaug/fft.hpp"

namespace hearaug {

namespace {

// Metric constants: 10 kHz rate, 256-sample frames with 50% overlap
// zero-padded to 512-point DFTs, 15 one-third-octave bands from 150 Hz,
// 30-frame (384 ms) segments, -15 dB clipping, 40 dB silence range.
constexpr int kStoiRate = 10000;
constexpr std::size_t kFrame = 256;
constexpr std::size_t kHop = 128;
constexpr std::size_t kNfft = 512;
constexpr std::size_t kBands = 15;
constexpr double kMinBandHz = 150.0;
constexpr std::size_t kSegFrames = 30;
constexpr double kClip = 5.623413251903491;  // 10^(15/20)
constexpr double kDynRangeDb = 40.0;
constexpr double kEps = 1e-15;

double bessel_i0(double x) {
  // Power series; converges quickly for the window's argument range.
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-21 * sum) break;
  }
  return sum;
}

// Symmetric Hann window without its zero endpoints: the core of a
// Hann of length n + 2.
std::vector<double> hann_core(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                static_cast<double>(i + 1) /
                                static_cast<double>(n + 1));
  return w;
}

// Frame starts mirror the reference implementation: the final frame
// starts strictly before length - frame.
std::vector<std::size_t> frame_starts(std::size_t length) {
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + kFrame < length; s += kHop) starts.push_back(s);
  return starts;
}

// Drops frames whose clean-signal energy is more than 40 dB below the
// loudest frame, then overlap-adds the kept frames of both signals.
void remove_silent_frames(std::vector<double>& x, std::vector<double>& y) {
  const std::vector<double> w = hann_core(kFrame);
  const std::vector<std::size_t> starts = frame_starts(x.size());
  if (starts.empty())
    throw InvalidArgument("signal too short for the intelligibility metric");

  std::vector<double> energies_db(starts.size());
  double peak_db = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < starts.size(); ++f) {
    double e = 0.0;
    for (std::size_t i = 0; i < kFrame; ++i) {
      const double v = w[i] * x[starts[f] + i];
      e += v * v;
    }
    energies_db[f] = 20.0 * std::log10(std::sqrt(e) + kEps);
    peak_db = std::max(peak_db, energies_db[f]);
  }

  std::vector<std::size_t> kept;
  for (std::size_t f = 0; f < starts.size(); ++f)
    if (energies_db[f] > peak_db - kDynRangeDb) kept.push_back(f);
  if (kept.empty())
    throw InvalidArgument("clean signal is silent; cannot score it");

  std::vector<double> xs((kept.size() - 1) * kHop + kFrame, 0.0);
  std::vector<double> ys(xs.size(), 0.0);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const std::size_t src = starts[kept[c]];
    const std::size_t dst = c * kHop;
    for (std::size_t i = 0; i < kFrame; ++i) {
      xs[dst + i] += w[i] * x[src + i];
      ys[dst + i] += w[i] * y[src + i];
    }
  }
  x = std::move(xs);
  y = std::move(ys);
}

// One-third-octave band filterbank over the one-sided 512-point DFT
// grid: band j spans the bins nearest 150 * 2^((2j -/+ 1) / 6) Hz.
std::vector<std::pair<std::size_t, std::size_t>> third_octave_bands() {
  const std::size_t bins = kNfft / 2 + 1;
  std::vector<double> f(bins);
  for (std::size_t k = 0; k < bins; ++k)
    f[k] = static_cast<double>(k) * kStoiRate / static_cast<double>(kNfft);

  auto nearest = [&](double hz) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < bins; ++k) {
      const double d = (f[k] - hz) * (f[k] - hz);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  };

  std::vector<std::pair<std::size_t, std::size_t>> bands(kBands);
  for (std::size_t j = 0; j < kBands; ++j) {
    const double lo = kMinBandHz * std::pow(2.0, (2.0 * j - 1.0) / 6.0);
    const double hi = kMinBandHz * std::pow(2.0, (2.0 * j + 1.0) / 6.0);
    bands[j] = {nearest(lo), nearest(hi)};
  }
  return bands;
}

// Band envelope matrix [band][frame]: root of the summed bin powers.
std::vector<std::vector<double>> band_envelopes(
    const std::vector<double>& x) {
  const std::vector<double> w = hann_core(kFrame);
  const std::vector<std::size_t> starts = frame_starts(x.size());
  const auto bands = third_octave_bands();

  std::vector<std::vector<double>> env(
      kBands, std::vector<double>(starts.size(), 0.0));
  std::vector<double> frame(kFrame);
  for (std::size_t t = 0; t < starts.size(); ++t) {
    for (std::size_t i = 0; i < kFrame; ++i)
      frame[i] = w[i] * x[starts[t] + i];
    const auto spec = fft::rfft(frame, kNfft);
    for (std::size_t j = 0; j < kBands; ++j) {
      double e = 0.0;
      for (std::size_t k = bands[j].first; k < bands[j].second; ++k)
        e += std::norm(spec[k]);
      env[j][t] = std::sqrt(e);
    }
  }
  return env;
}

}  // namespace

std::vector<double> stoi_resample_to_10k(std::span<const double> x_16k) {
  constexpr int kUp = 5;
  constexpr int kDown = 8;
  constexpr int kHalf = 10 * kDown;  // 10 * max(up, down)
  constexpr int kTaps = 2 * kHalf + 1;
  constexpr double kBeta = 5.0;
  const double cutoff = 1.0 / kDown;  // of the upsampled Nyquist

  static const std::vector<double> h = [&] {
    std::vector<double> taps(kTaps);
    const double i0_beta = bessel_i0(kBeta);
    for (int i = 0; i < kTaps; ++i) {
      const double t = i - kHalf;
      const double sinc =
          t == 0.0 ? 1.0
                   : std::sin(std::numbers::pi * cutoff * t) /
                         (std::numbers::pi * cutoff * t);
      const double r = t / kHalf;
      const double kaiser =
          bessel_i0(kBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
      taps[i] = kUp * cutoff * sinc * kaiser;
    }
    return taps;
  }();

  const auto n_in = static_cast<long long>(x_16k.size());
  const long long n_out = (n_in * kUp + kDown - 1) / kDown;
  std::vector<double> y(static_cast<std::size_t>(n_out), 0.0);
  for (long long m = 0; m < n_out; ++m) {
    // y[m] = sum_i x[i] h[m*down + half - i*up]
    const long long center = m * kDown + kHalf;
    const long long i_lo = std::max(0LL, (center - (kTaps - 1) + kUp - 1) / kUp);
    const long long i_hi = std::min(n_in - 1, center / kUp);
    double acc = 0.0;
    for (long long i = i_lo; i <= i_hi; ++i)
      acc += x_16k[static_cast<std::size_t>(i)] *
             h[static_cast<std::size_t>(center - i * kUp)];
    y[static_cast<std::size_t>(m)] = acc;
  }
  return y;
}

double stoi(const AudioBuffer& clean, const AudioBuffer& degraded) {
  require_sample_rate(clean, kPipelineSampleRate, "intelligibility input");
  require_sample_rate(degraded, kPipelineSampleRate,
                      "intelligibility input");
  auto c = mono_view(clean);
  auto d = mono_view(degraded);
  if (c.size() != d.size())
    throw InvalidArgument("intelligibility inputs must have equal lengths");
  if (signal_energy(c) == 0.0)
    throw InvalidArgument("clean signal is silent; cannot score it");

  std::vector<double> x = stoi_resample_to_10k(c);
  std::vector<double> y = stoi_resample_to_10k(d);
  remove_silent_frames(x, y);

  const auto xe = band_envelopes(x);
  const auto ye = band_envelopes(y);
  const std::size_t frames = xe[0].size();
  if (frames < kSegFrames)
    throw InvalidArgument(
        "too few active frames for the intelligibility metric (need 384 ms "
        "of speech)");

  double total = 0.0;
  std::size_t count = 0;
  std::vector<double> xn(kSegFrames), yn(kSegFrames);
  for (std::size_t m = kSegFrames; m <= frames; ++m) {
    for (std::size_t j = 0; j < kBands; ++j) {
      double ex = 0.0, ey = 0.0;
      for (std::size_t t = 0; t < kSegFrames; ++t) {
        xn[t] = xe[j][m - kSegFrames + t];
        yn[t] = ye[j][m - kSegFrames + t];
        ex += xn[t] * xn[t];
        ey += yn[t] * yn[t];
      }
      // Scale the degraded envelope to the clean energy, then clip it to
      // at most (1 + 10^(15/20)) times the clean envelope.
      const double alpha = std::sqrt(ex / std::max(ey, kEps));
      double mx = 0.0, my = 0.0;
      for (std::size_t t = 0; t < kSegFrames; ++t) {
        yn[t] = std::min(alpha * yn[t], (1.0 + kClip) * xn[t]);
        mx += xn[t];
        my += yn[t];
      }
      mx /= kSegFrames;
      my /= kSegFrames;
      double dot = 0.0, nx = 0.0, ny = 0.0;
      for (std::size_t t = 0; t < kSegFrames; ++t) {
        const double a = xn[t] - mx;
        const double b = yn[t] - my;
        dot += a * b;
        nx += a * a;
        ny += b * b;
      }
      if (nx > 0.0 && ny > 0.0)
        total += dot / std::sqrt(nx * ny);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace hearaug
