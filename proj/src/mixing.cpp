#include "hearaug/mixing.hpp"

#include <algorithm>
#include <cmath>

#include "hearaug/errors.hpp"

namespace hearaug {

void SpeechPair::validate() const {
  require_sample_rate(s_om, kPipelineSampleRate, "speech (outer mic)");
  require_sample_rate(s_im, kPipelineSampleRate, "speech (inner mic)");
  mono_view(s_om);
  mono_view(s_im);
  if (s_om.num_samples() != s_im.num_samples())
    throw InvalidArgument("speech pair channels have unequal lengths");
  if (body_im.has_value()) {
    require_sample_rate(*body_im, kPipelineSampleRate, "body noise");
    mono_view(*body_im);
    if (body_im->num_samples() != s_om.num_samples())
      throw InvalidArgument("body noise length differs from speech length");
  }
}

AudioBuffer cut_at(const AudioBuffer& buffer, std::size_t offset,
                   std::size_t target_length) {
  buffer.validate();
  const std::size_t n = buffer.num_samples();
  if (offset > n)
    throw InvalidArgument("cut offset lies past the end of the signal");
  AudioBuffer out(buffer.num_channels(), target_length, buffer.sample_rate);
  out.channel_labels = buffer.channel_labels;
  const std::size_t avail = std::min(target_length, n - offset);
  for (std::size_t c = 0; c < buffer.num_channels(); ++c) {
    const auto& src = buffer.channel(c);
    std::copy(src.begin() + static_cast<std::ptrdiff_t>(offset),
              src.begin() + static_cast<std::ptrdiff_t>(offset + avail),
              out.channel(c).begin());
  }
  return out;
}

CutResult cut_utterance(const AudioBuffer& buffer, double length_s,
                        Rng& rng) {
  buffer.validate();
  if (!(length_s > 0.0))
    throw InvalidArgument("cut length must be positive");
  const auto target = static_cast<std::size_t>(
      std::llround(length_s * buffer.sample_rate));
  const std::size_t n = buffer.num_samples();

  CutResult result;
  if (n > target)
    result.offset = rng.pick_index(n - target + 1);
  result.padded_samples = n >= target ? 0 : target - n;
  result.buffer = cut_at(buffer, result.offset, target);
  return result;
}

double snr_gain(const AudioBuffer& s_om, const AudioBuffer& n_om,
                double target_snr_db) {
  const double speech_rms = rms(mono_view(s_om));
  const double noise_rms = rms(mono_view(n_om));
  if (speech_rms <= 0.0)
    throw InvalidArgument("cannot set an SNR against zero-energy speech");
  if (noise_rms <= 0.0)
    throw InvalidArgument("cannot set an SNR with zero-energy noise");
  return std::pow(10.0, -target_snr_db / 20.0) * speech_rms / noise_rms;
}

std::pair<std::vector<double>, NormStats> mean_var_normalize(
    std::span<const double> channel) {
  if (channel.empty())
    throw InvalidArgument("cannot normalize an empty channel");
  const double n = static_cast<double>(channel.size());
  double sum = 0.0;
  for (double x : channel) sum += x;
  const double mean = sum / n;
  double sq = 0.0;
  for (double x : channel) sq += (x - mean) * (x - mean);
  const double variance = sq / n;

  NormStats stats;
  stats.mean = mean;
  stats.eps_guarded = variance < kVarianceEps;
  stats.std = std::sqrt(stats.eps_guarded ? kVarianceEps : variance);

  std::vector<double> out(channel.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (channel[i] - mean) / stats.std;
  return {std::move(out), stats};
}

std::vector<double> denormalize(std::span<const double> normalized,
                                const NormStats& stats) {
  std::vector<double> out(normalized.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = normalized[i] * stats.std + stats.mean;
  return out;
}

std::vector<double> scale_target(std::span<const double> s_om,
                                 const NormStats& om_stats) {
  std::vector<double> out(s_om.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = s_om[i] / om_stats.std;
  return out;
}

MixResult mix(const SpeechPair& speech, const NoisePair& noise,
              double target_snr_db) {
  speech.validate();
  noise.om.validate();
  noise.im.validate();
  const std::size_t n = speech.num_samples();
  if (noise.om.num_samples() != n || noise.im.num_samples() != n)
    throw InvalidArgument(
        "speech and noise lengths differ; cut both to a common window "
        "before mixing");

  auto s_om = mono_view(speech.s_om);
  auto s_im = mono_view(speech.s_im);
  auto n_om = mono_view(noise.om);
  auto n_im = mono_view(noise.im);

  MixResult result;
  result.snr_db_requested = target_snr_db;
  result.snr_out_of_range =
      target_snr_db < kSnrRangeMinDb || target_snr_db > kSnrRangeMaxDb;
  const double g = snr_gain(speech.s_om, noise.om, target_snr_db);
  result.noise_gain = g;

  // Composition order is part of the contract: (s + g*n) then + body.
  std::vector<double> raw_om(n);
  std::vector<double> raw_im(n);
  for (std::size_t i = 0; i < n; ++i) raw_om[i] = s_om[i] + g * n_om[i];
  if (speech.body_im.has_value()) {
    auto body = mono_view(*speech.body_im);
    for (std::size_t i = 0; i < n; ++i)
      raw_im[i] = s_im[i] + g * n_im[i] + body[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) raw_im[i] = s_im[i] + g * n_im[i];
  }

  // Achieved SNR recomputed from the composed channel rather than assumed
  // from the gain formula.
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = raw_om[i] - s_om[i];
  result.snr_db_achieved =
      10.0 * std::log10(signal_energy(s_om) / signal_energy(residual));

  auto [norm_om, om_stats] = mean_var_normalize(raw_om);
  auto [norm_im, im_stats] = mean_var_normalize(raw_im);
  result.om_stats = om_stats;
  result.im_stats = im_stats;

  const int rate = speech.s_om.sample_rate;
  result.raw_y_om = make_mono(std::move(raw_om), rate, "y_om_raw");
  result.raw_y_im = make_mono(std::move(raw_im), rate, "y_im_raw");
  result.y_om = make_mono(std::move(norm_om), rate, "y_om");
  result.y_im = make_mono(std::move(norm_im), rate, "y_im");
  result.target =
      make_mono(scale_target(s_om, om_stats), rate, "target");
  return result;
}

}  // namespace hearaug
