#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hearaug/audio.hpp"
#include "hearaug/augment.hpp"
#include "hearaug/rng.hpp"

namespace hearaug {

// Pipeline-wide mixing constants: utterance length and the SNR range the
// dataset draws from.
constexpr double kUtteranceSeconds = 3.0;
constexpr double kSnrRangeMinDb = -10.0;
constexpr double kSnrRangeMaxDb = 25.0;
constexpr double kVarianceEps = 1e-12;

// Own-voice recording triple: clean speech at the outer mic, the same
// speech as picked up inside the occluded ear canal, and (optionally)
// body-produced noise that rides along on the inner mic.
struct SpeechPair {
  AudioBuffer s_om;
  AudioBuffer s_im;
  std::optional<AudioBuffer> body_im;
  std::string talker_id;

  void validate() const;  // equal lengths, mono channels, 16 kHz
  std::size_t num_samples() const { return s_om.num_samples(); }
};

// Per-channel mean/variance normalization parameters. Inversion:
// x = normalized * std + mean.
struct NormStats {
  double mean = 0.0;
  double std = 1.0;
  bool eps_guarded = false;  // variance fell below kVarianceEps
};

struct MixResult {
  AudioBuffer y_om;  // normalized noisy outer channel
  AudioBuffer y_im;  // normalized noisy inner channel
  AudioBuffer target;  // clean OM speech scaled by the OM channel gain

  // Pre-normalization compositions, kept so the exact mixing algebra
  // y = s + g*n (+ body) can be audited bit for bit.
  AudioBuffer raw_y_om;
  AudioBuffer raw_y_im;

  double noise_gain = 0.0;
  NormStats om_stats;
  NormStats im_stats;
  double snr_db_requested = 0.0;
  double snr_db_achieved = 0.0;
  bool snr_out_of_range = false;  // outside [-10, 25] dB; warning only
};

// A fixed-length window cut from a longer recording (or the recording
// zero-padded at the end if too short).
struct CutResult {
  AudioBuffer buffer;
  std::size_t offset = 0;           // start sample in the source
  std::size_t padded_samples = 0;   // trailing zeros appended
};

// Deterministic core: window of target_length samples starting at offset.
AudioBuffer cut_at(const AudioBuffer& buffer, std::size_t offset,
                   std::size_t target_length);

// Seeded random window of length_s seconds; shorter inputs are padded.
CutResult cut_utterance(const AudioBuffer& buffer,
                        double length_s, Rng& rng);

// Gain g with 10*log10(energy(s_om) / energy(g*n_om)) = target_snr_db.
double snr_gain(const AudioBuffer& s_om, const AudioBuffer& n_om,
                double target_snr_db);

// (x - mean) / std with std from the population variance; a variance
// below kVarianceEps is clamped to it and flagged.
std::pair<std::vector<double>, NormStats> mean_var_normalize(
    std::span<const double> channel);

// Undoes mean_var_normalize given its stats.
std::vector<double> denormalize(std::span<const double> normalized,
                                const NormStats& stats);

// target = s_om / std: the same multiplicative gain the noisy OM channel
// received. The mean shift applies only to the noisy channel.
std::vector<double> scale_target(std::span<const double> s_om,
                                 const NormStats& om_stats);

// Composes the noisy channels at the requested OM SNR: one gain applied
// to both noise channels, per-channel mean-variance normalization, target
// scaled by the OM gain. Inputs must already be cut to a common length.
// Fully deterministic; contains no random draws.
MixResult mix(const SpeechPair& speech, const NoisePair& noise,
              double target_snr_db);

}  // namespace hearaug
