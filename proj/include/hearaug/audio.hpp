#pragma once

#include <span>
#include <string>
#include <vector>

namespace hearaug {

// Multi-channel PCM waveform. Samples are dimensionless amplitudes at
// full scale +-1.0; integer WAV depths are converted symmetrically by
// 2^(bits-1) on load/save.
struct AudioBuffer {
  std::vector<std::vector<double>> samples;  // [channel][sample]
  int sample_rate = 0;
  std::vector<std::string> channel_labels;  // empty or one label per channel

  AudioBuffer() = default;
  AudioBuffer(std::size_t channels, std::size_t length, int rate);

  std::size_t num_channels() const { return samples.size(); }
  std::size_t num_samples() const {
    return samples.empty() ? 0 : samples[0].size();
  }
  std::vector<double>& channel(std::size_t c) { return samples.at(c); }
  const std::vector<double>& channel(std::size_t c) const {
    return samples.at(c);
  }

  // Throws InvalidArgument if channels have unequal lengths or the rate
  // is not positive.
  void validate() const;
};

// Wraps a single-channel signal.
AudioBuffer make_mono(std::vector<double> samples, int sample_rate,
                      std::string label = "");

// The single channel of a mono buffer; throws if not mono.
std::span<const double> mono_view(const AudioBuffer& buffer);

// 10*log10(mean squared amplitude). An all-zero (or empty-energy) channel
// yields -infinity, which callers can test for directly.
double energy_db(const AudioBuffer& buffer, std::size_t channel = 0);

// Sum of squares / root mean square over a raw sample span.
double signal_energy(std::span<const double> x);
double rms(std::span<const double> x);

// Pipeline entry points accept 16 kHz only; this throws InvalidArgument
// with a message telling the user to resample offline.
void require_sample_rate(const AudioBuffer& buffer, int expected,
                         const std::string& context);

constexpr int kPipelineSampleRate = 16000;

}  // namespace hearaug
