#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hearaug/audio.hpp"
#include "hearaug/stft.hpp"

namespace hearaug {

// ---------------------------------------------------------------------
// Magnitude-squared coherence.

struct WelchConfig {
  int segment_size = 256;
  int hop_size = 128;

  void validate() const;
  std::size_t num_bins() const {
    return static_cast<std::size_t>(segment_size) / 2 + 1;
  }
};

// |S_xy|^2 / (S_xx * S_yy) per frequency bin with Welch-averaged
// Hann-windowed periodograms. Bins where either auto-spectrum is zero
// report 0. Needs at least two full segments.
std::vector<double> msc(const AudioBuffer& x, const AudioBuffer& y,
                        const WelchConfig& config = {});

double mean_msc(const AudioBuffer& x, const AudioBuffer& y,
                const WelchConfig& config = {});

// ---------------------------------------------------------------------
// Oracle masks.

enum class MaskVariant { Om, Im, OmAuxIm, OmIm };

std::string to_string(MaskVariant v);
MaskVariant mask_variant_from_string(const std::string& s);

constexpr double kDefaultMaskClip = 5.0;

// Complex per-(frame, bin) masks for the two channels. Variants using a
// single channel leave the other mask all zero.
struct MaskPair {
  std::vector<std::complex<double>> m_om;
  std::vector<std::complex<double>> m_im;
  std::size_t frames = 0;
  std::size_t bins = 0;
  MaskVariant variant = MaskVariant::Om;
  double clip_magnitude = kDefaultMaskClip;

  std::complex<double>& om(std::size_t frame, std::size_t bin) {
    return m_om[frame * bins + bin];
  }
  std::complex<double>& im(std::size_t frame, std::size_t bin) {
    return m_im[frame * bins + bin];
  }
  const std::complex<double>& om(std::size_t frame, std::size_t bin) const {
    return m_om[frame * bins + bin];
  }
  const std::complex<double>& im(std::size_t frame, std::size_t bin) const {
    return m_im[frame * bins + bin];
  }
};

// Masks with access to the clean OM spectrogram: single-channel variants
// take S_o / Y_m; the two-channel variant solves
// M_o Y_o + M_i Y_i = S_o with the minimum-norm least-squares masks.
// Magnitudes are clipped to clip_magnitude (phase preserved).
MaskPair oracle_masks(const AudioBuffer& clean_om,
                      const AudioBuffer& noisy_om,
                      const AudioBuffer& noisy_im, MaskVariant variant,
                      double clip_magnitude = kDefaultMaskClip,
                      const StftConfig& config = {});

// S_hat = sum over the variant's channels of M_m * Y_m, back to time
// domain via the inverse STFT.
AudioBuffer apply_masks(const MaskPair& masks, const AudioBuffer& noisy_om,
                        const AudioBuffer& noisy_im,
                        const StftConfig& config = {});

// ---------------------------------------------------------------------
// Losses and SNR.

// Mean |difference| in the time domain plus mean complex |difference| in
// the STFT domain, weighted 1:1 by default.
double combined_l1_loss(const AudioBuffer& estimate,
                        const AudioBuffer& target,
                        double stft_weight = 1.0,
                        const StftConfig& config = {});

// 10*log10(energy(clean) / energy(degraded - clean)); +inf when the
// signals are identical.
double snr_db(const AudioBuffer& clean, const AudioBuffer& degraded);

}  // namespace hearaug
