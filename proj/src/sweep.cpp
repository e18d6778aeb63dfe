#include "hearaug/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hearaug/errors.hpp"
#include "hearaug/fft.hpp"

namespace hearaug {

namespace {

// Short raised-cosine ramps keep the sweep ends click-free and reduce
// band-edge ripple in the deconvolved response.
constexpr double kFadeSeconds = 0.01;

std::vector<double> raw_sweep(const SweepSpec& spec) {
  const std::size_t len = spec.num_samples();
  const double rate_log = std::log(spec.f_end / spec.f_start);
  const double fs = static_cast<double>(spec.sample_rate);
  std::vector<double> x(len);
  for (std::size_t n = 0; n < len; ++n) {
    const double t = static_cast<double>(n) / fs;
    // Phase of the exponential sweep: instantaneous frequency runs
    // f_start * exp(t * log(f_end/f_start) / duration).
    const double phase = 2.0 * std::numbers::pi * spec.f_start *
                         spec.duration / rate_log *
                         (std::exp(t * rate_log / spec.duration) - 1.0);
    x[n] = spec.amplitude * std::sin(phase);
  }
  const auto fade = static_cast<std::size_t>(kFadeSeconds * fs);
  const std::size_t ramp = std::min(fade, len / 4);
  for (std::size_t n = 0; n < ramp; ++n) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi *
                                          static_cast<double>(n) /
                                          static_cast<double>(ramp));
    x[n] *= g;
    x[len - 1 - n] *= g;
  }
  return x;
}

}  // namespace

void SweepSpec::validate() const {
  if (sample_rate <= 0)
    throw InvalidArgument("SweepSpec: sample rate must be positive");
  if (!(f_start > 0.0) || !(f_end > f_start))
    throw InvalidArgument("SweepSpec: need 0 < f_start < f_end");
  if (f_end > static_cast<double>(sample_rate) / 2.0)
    throw InvalidArgument("SweepSpec: f_end exceeds Nyquist frequency");
  if (!(duration > 0.0))
    throw InvalidArgument("SweepSpec: duration must be positive");
  if (!(amplitude > 0.0) || amplitude > 1.0)
    throw InvalidArgument("SweepSpec: amplitude must be in (0, 1]");
}

std::size_t SweepSpec::num_samples() const {
  return static_cast<std::size_t>(
      std::llround(duration * static_cast<double>(sample_rate)));
}

SweepSignals generate_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto x = raw_sweep(spec);
  const std::size_t len = x.size();
  const double rate_log = std::log(spec.f_end / spec.f_start);

  // Time-reversed sweep with a -6 dB/octave envelope so the product
  // spectrum is flat across the sweep band (Farina's inverse filter).
  std::vector<double> inv(len);
  for (std::size_t n = 0; n < len; ++n) {
    const double tau = static_cast<double>(n) /
                       static_cast<double>(spec.sample_rate);
    inv[n] = x[len - 1 - n] * std::exp(-tau * rate_log / spec.duration);
  }

  // Calibrate so that sweep (*) inverse has value 1 at lag 0
  // (index len - 1 of the full convolution).
  const auto reference = fft::convolve(x, inv);
  const double peak = reference[len - 1];
  if (peak == 0.0)
    throw InvalidArgument("generate_sweep: degenerate inverse filter");
  for (auto& v : inv) v /= peak;

  SweepSignals out;
  out.sweep = make_mono(x, spec.sample_rate, "sweep");
  out.inverse_filter = make_mono(std::move(inv), spec.sample_rate, "inverse");
  return out;
}

std::vector<double> deconvolve_ir(const AudioBuffer& recording,
                                  const SweepSpec& spec,
                                  std::size_t ir_length) {
  spec.validate();
  const auto rec = mono_view(recording);
  if (recording.sample_rate != spec.sample_rate)
    throw InvalidArgument("deconvolve_ir: recording rate does not match "
                          "the sweep spec");
  const std::size_t sweep_len = spec.num_samples();
  if (rec.size() < sweep_len)
    throw InvalidArgument("deconvolve_ir: recording is shorter than the "
                          "sweep");
  if (ir_length == 0)
    throw InvalidArgument("deconvolve_ir: ir_length must be positive");
  if (signal_energy(rec) == 0.0)
    throw InvalidArgument("deconvolve_ir: recording is silent");

  const auto signals = generate_sweep(spec);
  const auto full = fft::convolve(rec, mono_view(signals.inverse_filter));

  // Lag 0 of the acoustic path sits at index sweep_len - 1; negative lags
  // (harmonic images) are discarded.
  const std::size_t origin = sweep_len - 1;
  std::vector<double> ir(ir_length, 0.0);
  const std::size_t avail = full.size() > origin ? full.size() - origin : 0;
  const std::size_t n = std::min(ir_length, avail);
  std::copy_n(full.begin() + static_cast<std::ptrdiff_t>(origin), n,
              ir.begin());

  // Raised-cosine fade over the last eighth of the window to avoid a hard
  // truncation edge in stored responses.
  const std::size_t fade = ir_length / 8;
  for (std::size_t i = 0; i < fade && i < ir.size(); ++i) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi *
                                          static_cast<double>(i + 1) /
                                          static_cast<double>(fade + 1));
    ir[ir_length - 1 - i] *= g;
  }
  return ir;
}

}  // namespace hearaug
