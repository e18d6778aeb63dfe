#include "hearaug/stft.hpp"

#include <cmath>
#include <numbers>

#include "hearaug/errors.hpp"
#include "hearaug/fft.hpp"

namespace hearaug {

void StftConfig::validate() const {
  if (frame_size <= 0 || !fft::is_pow2(static_cast<std::size_t>(frame_size)))
    throw InvalidArgument("StftConfig: frame_size must be a power of two");
  if (hop_size <= 0 || hop_size > frame_size)
    throw InvalidArgument("StftConfig: hop_size must be in (0, frame_size]");
  if (frame_size % hop_size != 0)
    throw InvalidArgument("StftConfig: frame_size must be a multiple of "
                          "hop_size for constant overlap-add");
}

std::vector<double> sqrt_hann_window(std::size_t length) {
  // Periodic Hann, so that w^2 sums to a constant at 50% overlap.
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                       static_cast<double>(n) /
                                       static_cast<double>(length));
    w[n] = std::sqrt(hann);
  }
  return w;
}

Spectrogram::Spectrogram(std::size_t channels, std::size_t frames,
                         StftConfig cfg, int sample_rate,
                         std::size_t source_length)
    : data_(channels * frames * cfg.num_bins()),
      channels_(channels),
      frames_(frames),
      bins_(cfg.num_bins()),
      config_(cfg),
      sample_rate_(sample_rate),
      source_length_(source_length) {}

namespace {

struct FramePlan {
  std::size_t pad_front;   // frame_size - hop_size
  std::size_t num_frames;  // frames starting at 0, hop, 2*hop, ...
  std::size_t padded_length;
};

FramePlan plan_frames(std::size_t signal_length, const StftConfig& cfg) {
  const auto frame = static_cast<std::size_t>(cfg.frame_size);
  const auto hop = static_cast<std::size_t>(cfg.hop_size);
  const std::size_t pad_front = frame - hop;
  // The last frame must start at or after the final padded input sample
  // so every sample is covered by a full set of overlapping windows.
  const std::size_t last_needed = signal_length + pad_front;  // exclusive end
  const std::size_t t_max =
      hop * ((last_needed + hop - 1) / hop);  // ceil to hop grid
  return {pad_front, t_max / hop + 1, t_max + frame};
}

}  // namespace

std::size_t stft_num_frames(std::size_t signal_length,
                            const StftConfig& config) {
  config.validate();
  if (signal_length == 0)
    throw InvalidArgument("stft: signal must contain at least one sample");
  return plan_frames(signal_length, config).num_frames;
}

Spectrogram stft(const AudioBuffer& buffer, const StftConfig& config) {
  config.validate();
  buffer.validate();
  if (buffer.num_samples() == 0)
    throw InvalidArgument("stft: signal must contain at least one sample");

  const auto frame = static_cast<std::size_t>(config.frame_size);
  const auto hop = static_cast<std::size_t>(config.hop_size);
  const FramePlan plan = plan_frames(buffer.num_samples(), config);
  const auto window = sqrt_hann_window(frame);

  Spectrogram spec(buffer.num_channels(), plan.num_frames, config,
                   buffer.sample_rate, buffer.num_samples());

  std::vector<double> padded(plan.padded_length, 0.0);
  std::vector<double> segment(frame);
  for (std::size_t c = 0; c < buffer.num_channels(); ++c) {
    std::fill(padded.begin(), padded.end(), 0.0);
    std::copy(buffer.samples[c].begin(), buffer.samples[c].end(),
              padded.begin() + static_cast<std::ptrdiff_t>(plan.pad_front));
    for (std::size_t l = 0; l < plan.num_frames; ++l) {
      const std::size_t start = l * hop;
      for (std::size_t n = 0; n < frame; ++n)
        segment[n] = padded[start + n] * window[n];
      auto bins = fft::rfft(segment, frame);
      for (std::size_t k = 0; k < bins.size(); ++k) spec.at(c, l, k) = bins[k];
    }
  }
  return spec;
}

AudioBuffer istft(const Spectrogram& spec) {
  const StftConfig& config = spec.config();
  config.validate();
  if (spec.num_bins() != config.num_bins())
    throw InvalidArgument("istft: bin count does not match config");

  const auto frame = static_cast<std::size_t>(config.frame_size);
  const auto hop = static_cast<std::size_t>(config.hop_size);
  const FramePlan plan = plan_frames(spec.source_length(), config);
  if (plan.num_frames != spec.num_frames())
    throw InvalidArgument("istft: frame count inconsistent with source "
                          "length and config");
  const auto window = sqrt_hann_window(frame);

  AudioBuffer out(spec.num_channels(), spec.source_length(),
                  spec.sample_rate());

  std::vector<double> acc(plan.padded_length);
  std::vector<double> cola(plan.padded_length);
  std::vector<std::complex<double>> bins(spec.num_bins());
  for (std::size_t c = 0; c < spec.num_channels(); ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(cola.begin(), cola.end(), 0.0);
    for (std::size_t l = 0; l < spec.num_frames(); ++l) {
      for (std::size_t k = 0; k < spec.num_bins(); ++k)
        bins[k] = spec.at(c, l, k);
      auto segment = fft::irfft(bins, frame);
      const std::size_t start = l * hop;
      for (std::size_t n = 0; n < frame; ++n) {
        acc[start + n] += segment[n] * window[n];
        cola[start + n] += window[n] * window[n];
      }
    }
    // Divide by the accumulated window power: exact COLA normalization
    // without assuming the analytic sum cancels in floating point.
    for (std::size_t i = 0; i < spec.source_length(); ++i) {
      const std::size_t p = i + plan.pad_front;
      out.samples[c][i] = acc[p] / cola[p];
    }
  }
  return out;
}

}  // namespace hearaug
