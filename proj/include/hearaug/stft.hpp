#pragma once

#include <complex>
#include <vector>

#include "hearaug/audio.hpp"

namespace hearaug {

// Analysis/synthesis configuration. The default is the pipeline setting:
// 512-sample frames (32 ms at 16 kHz), 50% overlap, square-root Hann on
// both sides so the window product satisfies constant overlap-add.
struct StftConfig {
  int frame_size = 512;
  int hop_size = 256;
  enum class Window { SqrtHann } window = Window::SqrtHann;

  void validate() const;
  std::size_t num_bins() const {
    return static_cast<std::size_t>(frame_size) / 2 + 1;
  }
  bool operator==(const StftConfig&) const = default;
};

// Periodic square-root Hann analysis window of the given length.
std::vector<double> sqrt_hann_window(std::size_t length);

// Complex one-sided STFT tensor, indexed (channel, frame, bin).
// source_length remembers the analyzed signal length so istft can trim
// the edge padding exactly.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t channels, std::size_t frames, StftConfig cfg,
              int sample_rate, std::size_t source_length);

  std::size_t num_channels() const { return channels_; }
  std::size_t num_frames() const { return frames_; }
  std::size_t num_bins() const { return bins_; }
  int sample_rate() const { return sample_rate_; }
  std::size_t source_length() const { return source_length_; }
  const StftConfig& config() const { return config_; }

  std::complex<double>& at(std::size_t channel, std::size_t frame,
                           std::size_t bin) {
    return data_[(channel * frames_ + frame) * bins_ + bin];
  }
  const std::complex<double>& at(std::size_t channel, std::size_t frame,
                                 std::size_t bin) const {
    return data_[(channel * frames_ + frame) * bins_ + bin];
  }

  std::vector<std::complex<double>>& raw() { return data_; }
  const std::vector<std::complex<double>>& raw() const { return data_; }

 private:
  std::vector<std::complex<double>> data_;
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  StftConfig config_;
  int sample_rate_ = 0;
  std::size_t source_length_ = 0;
};

// Windowed one-sided DFT per frame per channel. The signal is padded with
// frame_size - hop_size zeros on both ends (plus hop alignment at the
// tail) so every input sample receives full overlap-add weight; istft
// trims the padding again.
Spectrogram stft(const AudioBuffer& buffer, const StftConfig& config = {});

// Weighted overlap-add reconstruction. Round-trips stft() up to
// floating-point error over the full signal.
AudioBuffer istft(const Spectrogram& spec);

// Number of frames stft() produces for a signal of the given length.
std::size_t stft_num_frames(std::size_t signal_length,
                            const StftConfig& config);

}  // namespace hearaug
