#include "hearaug/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hearaug/errors.hpp"
#include "hearaug/fft.hpp"

namespace hearaug {

// ---------------------------------------------------------------------
// Welch coherence.

void WelchConfig::validate() const {
  if (segment_size <= 0 || !fft::is_pow2(static_cast<std::size_t>(segment_size)))
    throw InvalidArgument("Welch segment size must be a power of two");
  if (hop_size <= 0 || hop_size > segment_size)
    throw InvalidArgument("Welch hop must be in (0, segment_size]");
}

std::vector<double> msc(const AudioBuffer& x, const AudioBuffer& y,
                        const WelchConfig& config) {
  config.validate();
  auto xs = mono_view(x);
  auto ys = mono_view(y);
  if (xs.size() != ys.size())
    throw InvalidArgument("coherence inputs must have equal lengths");
  if (x.sample_rate != y.sample_rate)
    throw InvalidArgument("coherence inputs must share a sample rate");

  const auto seg = static_cast<std::size_t>(config.segment_size);
  const auto hop = static_cast<std::size_t>(config.hop_size);
  if (xs.size() < seg + hop)
    throw InvalidArgument(
        "signal too short for Welch averaging: need at least two segments");

  // Periodic Hann window.
  std::vector<double> window(seg);
  for (std::size_t i = 0; i < seg; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                     static_cast<double>(i) /
                                     static_cast<double>(seg));

  const std::size_t bins = config.num_bins();
  std::vector<double> sxx(bins, 0.0), syy(bins, 0.0);
  std::vector<std::complex<double>> sxy(bins, 0.0);
  std::vector<double> fx(seg), fy(seg);

  for (std::size_t start = 0; start + seg <= xs.size(); start += hop) {
    for (std::size_t i = 0; i < seg; ++i) {
      fx[i] = window[i] * xs[start + i];
      fy[i] = window[i] * ys[start + i];
    }
    auto X = fft::rfft(fx, seg);
    auto Y = fft::rfft(fy, seg);
    for (std::size_t k = 0; k < bins; ++k) {
      sxx[k] += std::norm(X[k]);
      syy[k] += std::norm(Y[k]);
      sxy[k] += X[k] * std::conj(Y[k]);
    }
  }

  std::vector<double> coherence(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    const double denom = sxx[k] * syy[k];
    if (denom > 0.0)
      coherence[k] = std::min(1.0, std::norm(sxy[k]) / denom);
  }
  return coherence;
}

double mean_msc(const AudioBuffer& x, const AudioBuffer& y,
                const WelchConfig& config) {
  const std::vector<double> profile = msc(x, y, config);
  double sum = 0.0;
  for (double v : profile) sum += v;
  return sum / static_cast<double>(profile.size());
}

// ---------------------------------------------------------------------
// Oracle masks.

std::string to_string(MaskVariant v) {
  switch (v) {
    case MaskVariant::Om: return "om";
    case MaskVariant::Im: return "im";
    case MaskVariant::OmAuxIm: return "om-aux-im";
    case MaskVariant::OmIm: return "om-im";
  }
  throw InvalidArgument("unknown mask variant enum value");
}

MaskVariant mask_variant_from_string(const std::string& s) {
  if (s == "om") return MaskVariant::Om;
  if (s == "im") return MaskVariant::Im;
  if (s == "om-aux-im") return MaskVariant::OmAuxIm;
  if (s == "om-im") return MaskVariant::OmIm;
  throw InvalidArgument("unknown mask variant '" + s +
                        "' (expected om, im, om-aux-im, om-im)");
}

namespace {

std::complex<double> clip_complex(std::complex<double> z, double clip) {
  const double mag = std::abs(z);
  if (mag > clip) return z * (clip / mag);
  return z;
}

// S / Y with the magnitude clipped; never returns NaN, even at Y = 0.
std::complex<double> ratio_clipped(std::complex<double> s,
                                   std::complex<double> y, double clip) {
  const double ay = std::abs(y);
  if (ay == 0.0 || std::abs(s) >= ay * clip) {
    if (s == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
    const double angle =
        ay == 0.0 ? std::arg(s) : std::arg(s * std::conj(y));
    return std::polar(clip, angle);
  }
  return s / y;
}

}  // namespace

MaskPair oracle_masks(const AudioBuffer& clean_om,
                      const AudioBuffer& noisy_om,
                      const AudioBuffer& noisy_im, MaskVariant variant,
                      double clip_magnitude, const StftConfig& config) {
  if (!(clip_magnitude > 0.0))
    throw InvalidArgument("mask clip magnitude must be positive");
  if (clean_om.num_samples() != noisy_om.num_samples() ||
      noisy_om.num_samples() != noisy_im.num_samples())
    throw InvalidArgument("mask inputs must have equal lengths");

  const Spectrogram s = stft(clean_om, config);
  const Spectrogram yo = stft(noisy_om, config);
  const Spectrogram yi = stft(noisy_im, config);

  MaskPair masks;
  masks.frames = s.num_frames();
  masks.bins = s.num_bins();
  masks.variant = variant;
  masks.clip_magnitude = clip_magnitude;
  masks.m_om.assign(masks.frames * masks.bins, {0.0, 0.0});
  masks.m_im.assign(masks.frames * masks.bins, {0.0, 0.0});

  for (std::size_t t = 0; t < masks.frames; ++t) {
    for (std::size_t k = 0; k < masks.bins; ++k) {
      const std::complex<double> sv = s.at(0, t, k);
      const std::complex<double> yov = yo.at(0, t, k);
      const std::complex<double> yiv = yi.at(0, t, k);
      switch (variant) {
        case MaskVariant::Om:
        case MaskVariant::OmAuxIm:
          masks.om(t, k) = ratio_clipped(sv, yov, clip_magnitude);
          break;
        case MaskVariant::Im:
          masks.im(t, k) = ratio_clipped(sv, yiv, clip_magnitude);
          break;
        case MaskVariant::OmIm: {
          const double denom = std::norm(yov) + std::norm(yiv);
          if (denom > 0.0) {
            masks.om(t, k) =
                clip_complex(sv * std::conj(yov) / denom, clip_magnitude);
            masks.im(t, k) =
                clip_complex(sv * std::conj(yiv) / denom, clip_magnitude);
          }
          break;
        }
      }
    }
  }
  return masks;
}

AudioBuffer apply_masks(const MaskPair& masks, const AudioBuffer& noisy_om,
                        const AudioBuffer& noisy_im,
                        const StftConfig& config) {
  if (noisy_om.num_samples() != noisy_im.num_samples())
    throw InvalidArgument("noisy channels must have equal lengths");
  const Spectrogram yo = stft(noisy_om, config);
  const Spectrogram yi = stft(noisy_im, config);
  if (masks.frames != yo.num_frames() || masks.bins != yo.num_bins())
    throw InvalidArgument("mask shape does not match the noisy STFT");

  Spectrogram estimate(1, masks.frames, config, noisy_om.sample_rate,
                       yo.source_length());
  for (std::size_t t = 0; t < masks.frames; ++t) {
    for (std::size_t k = 0; k < masks.bins; ++k) {
      std::complex<double> v{0.0, 0.0};
      switch (masks.variant) {
        case MaskVariant::Om:
        case MaskVariant::OmAuxIm:
          v = masks.om(t, k) * yo.at(0, t, k);
          break;
        case MaskVariant::Im:
          v = masks.im(t, k) * yi.at(0, t, k);
          break;
        case MaskVariant::OmIm:
          v = masks.om(t, k) * yo.at(0, t, k) +
              masks.im(t, k) * yi.at(0, t, k);
          break;
      }
      estimate.at(0, t, k) = v;
    }
  }
  AudioBuffer out = istft(estimate);
  out.channel_labels = {"s_hat"};
  return out;
}

// ---------------------------------------------------------------------
// Loss and SNR.

double combined_l1_loss(const AudioBuffer& estimate,
                        const AudioBuffer& target, double stft_weight,
                        const StftConfig& config) {
  auto e = mono_view(estimate);
  auto t = mono_view(target);
  if (e.size() != t.size())
    throw InvalidArgument("loss inputs must have equal lengths");
  if (e.empty()) throw InvalidArgument("loss inputs are empty");

  double time_sum = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    time_sum += std::abs(e[i] - t[i]);
  const double time_l1 = time_sum / static_cast<double>(e.size());

  const Spectrogram se = stft(estimate, config);
  const Spectrogram st = stft(target, config);
  double spec_sum = 0.0;
  const std::size_t cells = se.num_frames() * se.num_bins();
  for (std::size_t t_i = 0; t_i < se.num_frames(); ++t_i)
    for (std::size_t k = 0; k < se.num_bins(); ++k)
      spec_sum += std::abs(se.at(0, t_i, k) - st.at(0, t_i, k));
  const double spec_l1 = spec_sum / static_cast<double>(cells);

  return time_l1 + stft_weight * spec_l1;
}

double snr_db(const AudioBuffer& clean, const AudioBuffer& degraded) {
  auto c = mono_view(clean);
  auto d = mono_view(degraded);
  if (c.size() != d.size())
    throw InvalidArgument("SNR inputs must have equal lengths");
  std::vector<double> residual(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) residual[i] = d[i] - c[i];
  const double res_energy = signal_energy(residual);
  if (res_energy == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal_energy(c) / res_energy);
}

}  // namespace hearaug
