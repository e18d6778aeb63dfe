#include "hearaug/audio.hpp"

#include <cmath>
#include <limits>

#include "hearaug/errors.hpp"

namespace hearaug {

AudioBuffer::AudioBuffer(std::size_t channels, std::size_t length, int rate)
    : samples(channels, std::vector<double>(length, 0.0)), sample_rate(rate) {}

void AudioBuffer::validate() const {
  if (sample_rate <= 0)
    throw InvalidArgument("AudioBuffer: sample rate must be positive");
  for (const auto& ch : samples) {
    if (ch.size() != num_samples())
      throw InvalidArgument("AudioBuffer: channels have unequal lengths");
  }
  if (!channel_labels.empty() && channel_labels.size() != samples.size())
    throw InvalidArgument("AudioBuffer: label count does not match channels");
}

AudioBuffer make_mono(std::vector<double> samples, int sample_rate,
                      std::string label) {
  AudioBuffer buffer;
  buffer.samples.push_back(std::move(samples));
  buffer.sample_rate = sample_rate;
  if (!label.empty()) buffer.channel_labels.push_back(std::move(label));
  return buffer;
}

std::span<const double> mono_view(const AudioBuffer& buffer) {
  if (buffer.num_channels() != 1)
    throw InvalidArgument("expected a mono buffer, got " +
                          std::to_string(buffer.num_channels()) +
                          " channels");
  return buffer.samples[0];
}

double signal_energy(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::sqrt(signal_energy(x) / static_cast<double>(x.size()));
}

double energy_db(const AudioBuffer& buffer, std::size_t channel) {
  const auto& ch = buffer.channel(channel);
  if (ch.empty()) throw InvalidArgument("energy_db: empty channel");
  const double mean_sq = signal_energy(ch) / static_cast<double>(ch.size());
  if (mean_sq <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mean_sq);
}

void require_sample_rate(const AudioBuffer& buffer, int expected,
                         const std::string& context) {
  if (buffer.sample_rate != expected) {
    throw InvalidArgument(
        context + ": requires " + std::to_string(expected) +
        " Hz input, got " + std::to_string(buffer.sample_rate) +
        " Hz; resample the file offline before running the pipeline");
  }
}

}  // namespace hearaug
